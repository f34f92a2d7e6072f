#pragma once

#include <iosfwd>

namespace latticeglow {

struct SelftestOptions {
    int max_nm = 5;           // N = M runs over 2..max_nm
    double tolerance = 1e-10; // relative
};

// True when |a - b| <= max(tol * max(|a|, |b|), tol / 100).
// tol = 0 demands exact equality.
bool agrees(double a, double b, double tol);

// Compares every closed form against exhaustive enumeration and prints a
// per-suite table. Returns 0 when all comparisons pass, 1 otherwise.
// Throws std::invalid_argument unless 2 <= max_nm <= 8.
int run_selftest(const SelftestOptions& options, std::ostream& out);

} // namespace latticeglow
