#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

namespace latticeglow {

enum class StateKind { mott_insulator, superfluid, coherent };

std::string to_string(StateKind kind);
StateKind parse_state_kind(const std::string& name);

// N atoms on M sites in one of the three reference many-body states.
// Mott insulators must be commensurate (N divisible by M).
class AtomState {
public:
    AtomState(StateKind kind, std::int64_t atoms, std::int64_t sites);

    static AtomState mott_insulator(std::int64_t atoms, std::int64_t sites) {
        return {StateKind::mott_insulator, atoms, sites};
    }
    static AtomState superfluid(std::int64_t atoms, std::int64_t sites) {
        return {StateKind::superfluid, atoms, sites};
    }
    static AtomState coherent(std::int64_t atoms, std::int64_t sites) {
        return {StateKind::coherent, atoms, sites};
    }

    StateKind kind() const { return kind_; }
    std::int64_t atoms() const { return atoms_; }
    std::int64_t sites() const { return sites_; }
    double filling() const { return static_cast<double>(atoms_) / static_cast<double>(sites_); }

private:
    StateKind kind_;
    std::int64_t atoms_;
    std::int64_t sites_;
};

// Site-independent occupation moments on distinct sites a, b, c, d.
// Entries needing more distinct sites than the lattice has are absent.
struct MomentSet {
    double m1 = 0;                 // <n_a>
    double m2 = 0;                 // <n_a^2>
    std::optional<double> m11;     // <n_a n_b>
    double m4 = 0;                 // <n_a^4>
    std::optional<double> m31;     // <n_a^3 n_b>
    std::optional<double> m22;     // <n_a^2 n_b^2>
    std::optional<double> m211;    // <n_a^2 n_b n_c>
    std::optional<double> m1111;   // <n_a n_b n_c n_d>

    double site_variance() const { return m2 - m1 * m1; }
    // <dn_a dn_b>; zero when M = 1 since the term never appears.
    double pair_covariance() const { return m11 ? *m11 - m1 * m1 : 0.0; }
    bool has_fourth_order() const { return m31 && m22 && m211 && m1111; }
};

inline constexpr int max_stirling_order = 16;

// Stirling numbers of the second kind S(p, j) for 0 <= j <= p <= 16.
double stirling2(int p, int j);

// <prod_r b_r^{+p_r} b_r^{p_r}> over distinct sites r.
double falling_factorial_moment(const AtomState& state, std::span<const int> powers);

// <prod_r n_r^{p_r}> over distinct sites r.
double raw_moment(const AtomState& state, std::span<const int> powers);

MomentSet moment_set(const AtomState& state);

struct CountStatistics {
    double mean = 0;
    double variance = 0;
};

// Mean and variance of N_K, the atom number on K sites.
CountStatistics n_k_statistics(const AtomState& state, int illuminated);

} // namespace latticeglow
