#include "latticeglow/atom_states.hpp"

#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace latticeglow {

namespace {

using StirlingTable = std::array<std::array<double, max_stirling_order + 1>, max_stirling_order + 1>;

constexpr StirlingTable make_stirling_table() {
    StirlingTable s{};
    s[0][0] = 1.0;
    for (int p = 1; p <= max_stirling_order; ++p)
        for (int j = 1; j <= p; ++j)
            s[p][j] = j * s[p - 1][j] + s[p - 1][j - 1];
    return s;
}

constexpr StirlingTable stirling_table = make_stirling_table();

// x (x - 1) ... (x - p + 1) as an iterated product.
double falling_factorial(double x, int p) {
    double result = 1.0;
    for (int k = 0; k < p; ++k)
        result *= x - k;
    return result;
}

void check_powers(const AtomState& state, std::span<const int> powers) {
    if (powers.empty())
        throw std::invalid_argument("moment needs a non-empty list of powers");
    if (static_cast<std::int64_t>(powers.size()) > state.sites())
        throw std::invalid_argument("moment over " + std::to_string(powers.size()) +
                                    " distinct sites exceeds M=" + std::to_string(state.sites()));
    for (int p : powers)
        if (p < 1)
            throw std::invalid_argument("moment powers must be positive");
}

} // namespace

std::string to_string(StateKind kind) {
    switch (kind) {
    case StateKind::mott_insulator: return "mi";
    case StateKind::superfluid: return "sf";
    case StateKind::coherent: return "coherent";
    }
    return "unknown";
}

StateKind parse_state_kind(const std::string& name) {
    if (name == "mi" || name == "mott" || name == "mott_insulator")
        return StateKind::mott_insulator;
    if (name == "sf" || name == "superfluid")
        return StateKind::superfluid;
    if (name == "coherent" || name == "coh")
        return StateKind::coherent;
    throw std::invalid_argument("unknown state kind '" + name + "' (expected mi, sf or coherent)");
}

AtomState::AtomState(StateKind kind, std::int64_t atoms, std::int64_t sites)
    : kind_(kind), atoms_(atoms), sites_(sites) {
    if (atoms < 1)
        throw std::invalid_argument("atom number N must be >= 1, got " + std::to_string(atoms));
    if (sites < 1)
        throw std::invalid_argument("site count M must be >= 1, got " + std::to_string(sites));
    if (kind == StateKind::mott_insulator && atoms % sites != 0)
        throw std::invalid_argument("Mott insulator needs commensurate filling: N=" + std::to_string(atoms) +
                                    " is not divisible by M=" + std::to_string(sites));
}

double stirling2(int p, int j) {
    if (p < 0 || p > max_stirling_order || j < 0 || j > p)
        throw std::out_of_range("Stirling number S(" + std::to_string(p) + "," + std::to_string(j) +
                                ") outside the tabulated range");
    return stirling_table[static_cast<std::size_t>(p)][static_cast<std::size_t>(j)];
}

double falling_factorial_moment(const AtomState& state, std::span<const int> powers) {
    check_powers(state, powers);
    const int total = std::accumulate(powers.begin(), powers.end(), 0);
    const double sites = static_cast<double>(state.sites());

    switch (state.kind()) {
    case StateKind::mott_insulator: {
        const double n = static_cast<double>(state.atoms() / state.sites());
        double result = 1.0;
        for (int p : powers)
            result *= falling_factorial(n, p);
        return result;
    }
    case StateKind::superfluid: {
        if (total > state.atoms())
            return 0.0;
        // N(N-1)...(N-s+1) / M^s, interleaved to stay in range for large N.
        double result = 1.0;
        for (int k = 0; k < total; ++k)
            result *= (static_cast<double>(state.atoms()) - k) / sites;
        return result;
    }
    case StateKind::coherent:
        return std::pow(state.filling(), total);
    }
    return 0.0;
}

double raw_moment(const AtomState& state, std::span<const int> powers) {
    check_powers(state, powers);
    for (int p : powers)
        if (p > max_stirling_order)
            throw std::out_of_range("raw_moment supports powers up to " + std::to_string(max_stirling_order));

    // n^p = sum_j S(p, j) b^{+j} b^j on each site; expand the product over
    // all index tuples j_r in [1, p_r].
    std::vector<int> orders(powers.size(), 1);
    double total = 0.0;
    while (true) {
        double weight = 1.0;
        for (std::size_t r = 0; r < powers.size(); ++r)
            weight *= stirling2(powers[r], orders[r]);
        total += weight * falling_factorial_moment(state, orders);

        std::size_t r = 0;
        while (r < orders.size() && orders[r] == powers[r]) {
            orders[r] = 1;
            ++r;
        }
        if (r == orders.size())
            break;
        ++orders[r];
    }
    return total;
}

MomentSet moment_set(const AtomState& state) {
    const auto moment = [&state](std::initializer_list<int> powers) -> std::optional<double> {
        if (static_cast<std::int64_t>(powers.size()) > state.sites())
            return std::nullopt;
        return raw_moment(state, std::span<const int>(powers.begin(), powers.size()));
    };

    MomentSet m;
    m.m1 = *moment({1});
    m.m2 = *moment({2});
    m.m4 = *moment({4});
    m.m11 = moment({1, 1});
    m.m31 = moment({3, 1});
    m.m22 = moment({2, 2});
    m.m211 = moment({2, 1, 1});
    m.m1111 = moment({1, 1, 1, 1});
    return m;
}

CountStatistics n_k_statistics(const AtomState& state, int illuminated) {
    if (illuminated < 1 || illuminated > state.sites())
        throw std::invalid_argument("n_k_statistics needs 1 <= K <= M, got K=" + std::to_string(illuminated) +
                                    ", M=" + std::to_string(state.sites()));
    const MomentSet m = moment_set(state);
    const double k = illuminated;
    CountStatistics stats;
    stats.mean = m.m1 * k;
    stats.variance = k * m.site_variance() + k * (k - 1.0) * m.pair_covariance();
    if (stats.variance < 0.0 && stats.variance > -1e-9 * (1.0 + stats.mean))
        stats.variance = 0.0;
    return stats;
}

} // namespace latticeglow
