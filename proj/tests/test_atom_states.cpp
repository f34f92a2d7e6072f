#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <functional>
#include <vector>

#include "latticeglow/atom_states.hpp"

using namespace latticeglow;

namespace {

// Moments by brute force over every way of dropping N atoms into M sites:
// each of the M^N placements is equally likely.
double placement_moment(int atoms, int sites, const std::vector<int>& powers) {
    std::vector<int> where(static_cast<std::size_t>(atoms), 0);
    double sum = 0.0;
    long count = 0;
    while (true) {
        std::vector<int> q(static_cast<std::size_t>(sites), 0);
        for (int w : where)
            ++q[static_cast<std::size_t>(w)];
        double term = 1.0;
        for (std::size_t r = 0; r < powers.size(); ++r)
            term *= std::pow(q[r], powers[r]);
        sum += term;
        ++count;
        std::size_t i = 0;
        while (i < where.size() && where[i] == sites - 1)
            where[i++] = 0;
        if (i == where.size())
            break;
        ++where[i];
    }
    return sum / static_cast<double>(count);
}

// Poisson(lambda) moment by direct series.
double poisson_moment(double lambda, int power) {
    double sum = 0.0;
    double p = std::exp(-lambda);
    for (int q = 0; q < 200; ++q) {
        sum += p * std::pow(q, power);
        p *= lambda / (q + 1);
    }
    return sum;
}

} // namespace

TEST_CASE("falling-factorial moments") {
    const int pair[] = {1, 1};
    CHECK(falling_factorial_moment(AtomState::superfluid(4, 4), pair) == doctest::Approx(0.75));
    const int two[] = {2};
    CHECK(falling_factorial_moment(AtomState::coherent(4, 4), two) == doctest::Approx(1.0));
    CHECK(falling_factorial_moment(AtomState::mott_insulator(3, 3), two) == 0.0);
    const int many[] = {3, 2};
    CHECK(falling_factorial_moment(AtomState::superfluid(4, 4), many) == 0.0);
    const int four[] = {1, 1, 1, 1};
    CHECK(falling_factorial_moment(AtomState::superfluid(4, 4), four) == doctest::Approx(24.0 / 256.0));
}

TEST_CASE("raw moments") {
    const int two[] = {2};
    CHECK(raw_moment(AtomState::superfluid(4, 4), two) == doctest::Approx(1.75));
    const int four[] = {4};
    CHECK(raw_moment(AtomState::coherent(3, 3), four) == doctest::Approx(15.0));
    const int three_one[] = {3, 1};
    CHECK(raw_moment(AtomState::mott_insulator(6, 3), three_one) == doctest::Approx(16.0));
}

TEST_CASE("raw moments agree with brute-force placement counting") {
    const std::vector<std::vector<int>> tuples = {{1}, {2}, {3}, {4}, {1, 1}, {2, 1}, {3, 1}, {2, 2}, {1, 2},
                                                  {2, 1, 1}, {1, 1, 1}, {1, 1, 1, 1}};
    for (int n = 2; n <= 5; ++n) {
        const AtomState sf = AtomState::superfluid(n, n);
        for (const auto& powers : tuples) {
            if (static_cast<int>(powers.size()) > n)
                continue;
            CAPTURE(n);
            CAPTURE(powers.size());
            CHECK(raw_moment(sf, powers) == doctest::Approx(placement_moment(n, n, powers)).epsilon(1e-12));
        }
    }
}

TEST_CASE("coherent raw moments are Poisson moments") {
    for (double lambda : {0.5, 1.0, 2.5}) {
        const AtomState coh(StateKind::coherent, static_cast<std::int64_t>(lambda * 4), 4);
        for (int p = 1; p <= 8; ++p) {
            const int powers[] = {p};
            CHECK(raw_moment(coh, powers) == doctest::Approx(poisson_moment(lambda, p)).epsilon(1e-12));
        }
        const int split[] = {2, 3};
        CHECK(raw_moment(coh, split) ==
              doctest::Approx(poisson_moment(lambda, 2) * poisson_moment(lambda, 3)).epsilon(1e-12));
    }
}

TEST_CASE("Stirling numbers of the second kind") {
    CHECK(stirling2(0, 0) == 1.0);
    CHECK(stirling2(4, 2) == 7.0);
    CHECK(stirling2(5, 3) == 25.0);
    CHECK(stirling2(6, 0) == 0.0);
    // Row sums are the Bell numbers.
    const double bell[] = {1, 1, 2, 5, 15, 52, 203, 877, 4140};
    for (int p = 0; p <= 8; ++p) {
        double sum = 0;
        for (int j = 0; j <= p; ++j)
            sum += stirling2(p, j);
        CHECK(sum == bell[p]);
    }
    CHECK_THROWS_AS(stirling2(17, 2), std::out_of_range);
    CHECK_THROWS_AS(stirling2(3, 4), std::out_of_range);
}

TEST_CASE("moment sets") {
    const MomentSet mi = moment_set(AtomState::mott_insulator(5, 5));
    for (double v : {mi.m1, mi.m2, *mi.m11, mi.m4, *mi.m31, *mi.m22, *mi.m211, *mi.m1111})
        CHECK(v == 1.0);
    CHECK(mi.site_variance() == 0.0);

    const MomentSet sf = moment_set(AtomState::superfluid(4, 4));
    CHECK(*sf.m11 == doctest::Approx(0.75));
    CHECK(sf.m2 == doctest::Approx(1.75));
    CHECK(*sf.m1111 == doctest::Approx(0.09375));
    CHECK(sf.has_fourth_order());

    const MomentSet small = moment_set(AtomState::superfluid(3, 3));
    CHECK_FALSE(small.m1111.has_value());
    CHECK(small.m211.has_value());
    CHECK_FALSE(small.has_fourth_order());

    const MomentSet single = moment_set(AtomState::coherent(2, 1));
    CHECK_FALSE(single.m11.has_value());
    CHECK(single.pair_covariance() == 0.0);
    CHECK(single.m2 == doctest::Approx(6.0));
}

TEST_CASE("atom-number statistics on the illuminated block") {
    const CountStatistics full = n_k_statistics(AtomState::superfluid(30, 30), 30);
    CHECK(full.mean == doctest::Approx(30.0));
    CHECK(std::abs(full.variance) < 1e-12);

    const CountStatistics half = n_k_statistics(AtomState::superfluid(30, 30), 15);
    CHECK(half.variance == doctest::Approx(15.0 * (1.0 - 15.0 / 30.0)).epsilon(1e-12));
    // N_K is Binomial(N, K/M) in the superfluid.
    CHECK(n_k_statistics(AtomState::superfluid(4, 4), 2).variance == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(n_k_statistics(AtomState::superfluid(2, 2), 1).variance == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(n_k_statistics(AtomState::superfluid(12, 6), 2).variance ==
          doctest::Approx(12.0 * (1.0 / 3.0) * (2.0 / 3.0)).epsilon(1e-12));

    CHECK(n_k_statistics(AtomState::coherent(30, 30), 15).variance == doctest::Approx(15.0));
    CHECK(n_k_statistics(AtomState::mott_insulator(60, 30), 15).variance == 0.0);

    CHECK_THROWS_AS(n_k_statistics(AtomState::superfluid(4, 4), 5), std::invalid_argument);
    CHECK_THROWS_AS(n_k_statistics(AtomState::superfluid(4, 4), 0), std::invalid_argument);
}

TEST_CASE("state construction and parsing") {
    CHECK_THROWS_AS(AtomState::mott_insulator(5, 3), std::invalid_argument);
    CHECK_THROWS_AS(AtomState::superfluid(0, 3), std::invalid_argument);
    CHECK_THROWS_AS(AtomState::coherent(3, 0), std::invalid_argument);
    CHECK(AtomState::mott_insulator(6, 3).filling() == 2.0);

    CHECK(parse_state_kind("mi") == StateKind::mott_insulator);
    CHECK(parse_state_kind("superfluid") == StateKind::superfluid);
    CHECK(parse_state_kind("coh") == StateKind::coherent);
    CHECK_THROWS_AS(parse_state_kind("bec"), std::invalid_argument);
    for (StateKind k : {StateKind::mott_insulator, StateKind::superfluid, StateKind::coherent})
        CHECK(parse_state_kind(to_string(k)) == k);

    const int too_many[] = {1, 1, 1};
    CHECK_THROWS_AS(raw_moment(AtomState::superfluid(2, 2), too_many), std::invalid_argument);
    const int zero[] = {0};
    CHECK_THROWS_AS(raw_moment(AtomState::superfluid(2, 2), zero), std::invalid_argument);
}
