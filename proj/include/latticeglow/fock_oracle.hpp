#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

#include "latticeglow/atom_states.hpp"
#include "latticeglow/mode_geometry.hpp"

namespace latticeglow {

// Thrown when an exhaustive basis would exceed the configured entry cap.
class BasisTooLarge : public std::length_error {
public:
    using std::length_error::length_error;
};

// Probability-weighted list of occupation vectors q = (q_1, ..., q_M).
// Entries are stored in descending lexicographic order of q.
class OccupationDistribution {
public:
    OccupationDistribution(int sites, std::vector<std::uint32_t> occupations,
                           std::vector<double> probabilities, double truncation_deficit);

    int sites() const { return sites_; }
    std::size_t size() const { return probabilities_.size(); }
    std::span<const std::uint32_t> occupation(std::size_t entry) const {
        return {occupations_.data() + entry * static_cast<std::size_t>(sites_),
                static_cast<std::size_t>(sites_)};
    }
    double probability(std::size_t entry) const { return probabilities_[entry]; }
    const std::vector<double>& probabilities() const { return probabilities_; }

    // 1 - (total probability); zero up to rounding for MI and SF.
    double truncation_deficit() const { return truncation_deficit_; }

    // Writes "q1,...,qM,p" rows after a header line.
    void write_csv(std::ostream& out) const;

private:
    int sites_;
    std::vector<std::uint32_t> occupations_;
    std::vector<double> probabilities_;
    double truncation_deficit_;
};

struct EnumerateOptions {
    // Coherent states only: bound on the discarded Poisson tail, 0 < tail <= 1e-6.
    double cutoff_tail = 1e-12;
    std::size_t max_entries = 10'000'000;
};

// Number of compositions of N atoms into M sites, C(N + M - 1, M - 1), as a double.
double superfluid_basis_size(std::int64_t atoms, std::int64_t sites);

OccupationDistribution enumerate(const AtomState& state, const EnumerateOptions& options = {});

// Exact moments of D = sum_i A_i n_i evaluated as classical averages over
// the occupation distribution.
struct OracleMoments {
    complex amp;            // <D>
    double intensity = 0;   // <D* D>
    double fourth = 0;      // <D*^2 D^2>
    double noise_r = 0;     // <|D - <D>|^2>
    double fourth_var = 0;  // <(|D|^2 - <|D|^2>)^2>
    double quad_mean = 0;   // <X_beta>
    double quad_var = 0;    // <(X_beta - <X_beta>)^2>
};

OracleMoments oracle_d_moments(const OccupationDistribution& dist, const GeometryCoefficients& coeffs,
                               double beta = 0.0);

// <prod_r q_{site_r}^{power_r}> for distinct 1-based site indices.
double oracle_raw_moment(const OccupationDistribution& dist, std::span<const int> sites,
                         std::span<const int> powers);

} // namespace latticeglow
