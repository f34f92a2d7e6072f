#include "latticeglow/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "latticeglow/atom_states.hpp"
#include "latticeglow/fock_oracle.hpp"
#include "latticeglow/mode_geometry.hpp"
#include "latticeglow/observables.hpp"

namespace latticeglow {

namespace {

constexpr double pi = std::numbers::pi;
constexpr int angle_count = 64;
// Coherent truncation tight enough that the dropped Poisson tail moves
// fourth-order moments by well under 1e-12 relative.
constexpr double reference_cutoff = 1e-16;

std::string num(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

struct Suite {
    std::string name;
    double tol;
    long cases = 0;
    long failures = 0;
    long skipped = 0;
    double worst = 0.0; // largest |a - b| / max(|a|, |b|, 1)
    std::optional<std::string> first_failure;

    Suite(std::string suite_name, double tolerance) : name(std::move(suite_name)), tol(tolerance) {}

    void check(double closed, double reference, const std::string& context) {
        ++cases;
        const double diff = std::abs(closed - reference);
        worst = std::max(worst, diff / std::max({std::abs(closed), std::abs(reference), 1.0}));
        if (agrees(closed, reference, tol))
            return;
        ++failures;
        if (!first_failure)
            first_failure = context + ": closed form " + num(closed) + ", reference " + num(reference) +
                            ", |diff| " + num(diff);
    }
};

std::vector<double> angle_grid() {
    std::vector<double> out;
    for (int i = 0; i < angle_count; ++i)
        out.push_back(-pi + 2.0 * pi * i / angle_count);
    return out;
}

struct Geometry {
    const char* name;
    ModeSpec pump;
    ModeKind probe_kind;
};

const Geometry geometries[] = {
    {"traveling/traveling theta0=0", {ModeKind::traveling, 0.0}, ModeKind::traveling},
    {"traveling theta0=0.1pi/standing", {ModeKind::traveling, 0.1 * pi}, ModeKind::standing},
    {"standing theta0=0.1pi/standing", {ModeKind::standing, 0.1 * pi}, ModeKind::standing},
};

std::string state_label(StateKind kind, int n) {
    return to_string(kind) + " N=M=" + std::to_string(n);
}

// Enumerates the exhaustive distribution or reports why it is skipped.
std::optional<OccupationDistribution> try_enumerate(const AtomState& state) {
    try {
        EnumerateOptions options;
        options.cutoff_tail = reference_cutoff;
        return enumerate(state, options);
    } catch (const BasisTooLarge&) {
        return std::nullopt;
    }
}

void geometry_suite(Suite& suite) {
    for (int k = 1; k <= 12; ++k) {
        std::vector<double> alphas = angle_grid();
        for (int l = -3; l <= 3; ++l)
            alphas.push_back(2.0 * pi * l);
        for (double alpha : alphas) {
            complex direct;
            for (int m = 1; m <= k; ++m)
                direct += std::polar(1.0, m * alpha);
            const complex closed = closed_form_traveling_sum(alpha, k);
            const std::string ctx = "traveling sum K=" + std::to_string(k) + " alpha=" + num(alpha);
            suite.check(closed.real(), direct.real(), ctx + " (re)");
            suite.check(closed.imag(), direct.imag(), ctx + " (im)");
            suite.check(std::abs(dirichlet_ratio(alpha, k)), std::abs(direct), ctx + " |ratio|");
        }
    }
    for (const Geometry& g : geometries) {
        for (double theta : angle_grid()) {
            const ModeSpec probe{g.probe_kind, theta};
            const LatticeSpec lattice{9, 7, 2};
            const GeometryCoefficients c = coefficients(g.pump, probe, lattice);
            complex sum;
            double abs2 = 0;
            for (int m = lattice.offset; m <= lattice.last_site(); ++m) {
                const complex a = std::conj(mode_function(probe, m)) * mode_function(g.pump, m);
                sum += a;
                abs2 += std::norm(a);
            }
            const std::string ctx = std::string("coefficients ") + g.name + " theta1=" + num(theta);
            suite.check(c.sum_a.real(), sum.real(), ctx + " sum A (re)");
            suite.check(c.sum_a.imag(), sum.imag(), ctx + " sum A (im)");
            suite.check(c.sum_abs2, abs2, ctx + " sum |A|^2");
        }
    }
}

void raw_moment_suite(Suite& suite, int max_nm) {
    // Power tuples of total order <= 4, each power >= 1.
    std::vector<std::vector<int>> tuples;
    std::vector<int> current;
    const auto grow = [&](auto&& self, int budget) -> void {
        if (!current.empty())
            tuples.push_back(current);
        for (int p = 1; p <= budget; ++p) {
            current.push_back(p);
            self(self, budget - p);
            current.pop_back();
        }
    };
    grow(grow, 4);

    for (StateKind kind : {StateKind::mott_insulator, StateKind::superfluid, StateKind::coherent}) {
        for (int n = 2; n <= max_nm; ++n) {
            const AtomState state(kind, n, n);
            const auto dist = try_enumerate(state);
            if (!dist) {
                ++suite.skipped;
                continue;
            }
            for (const auto& powers : tuples) {
                const int r = static_cast<int>(powers.size());
                if (r > n)
                    continue;
                // Leading sites and trailing sites in reverse order.
                std::vector<int> lead, trail;
                for (int i = 0; i < r; ++i) {
                    lead.push_back(i + 1);
                    trail.push_back(n - i);
                }
                const double closed = raw_moment(state, powers);
                std::string ctx = state_label(kind, n) + " powers=(";
                for (std::size_t i = 0; i < powers.size(); ++i)
                    ctx += (i ? "," : "") + std::to_string(powers[i]);
                ctx += ")";
                suite.check(closed, oracle_raw_moment(*dist, lead, powers), ctx + " leading sites");
                suite.check(closed, oracle_raw_moment(*dist, trail, powers), ctx + " trailing sites");
            }
        }
    }
}

void d_moment_suite(Suite& suite, Suite& traveling, int max_nm) {
    const double betas[] = {0.0, pi / 4.0, pi / 2.0, 3.0 * pi / 4.0};
    for (StateKind kind : {StateKind::mott_insulator, StateKind::superfluid, StateKind::coherent}) {
        for (int n = 2; n <= max_nm; ++n) {
            const AtomState state(kind, n, n);
            const auto dist = try_enumerate(state);
            if (!dist) {
                ++suite.skipped;
                ++traveling.skipped;
                continue;
            }
            const MomentSet moments = moment_set(state);
            for (int k = 1; k <= n; ++k) {
                const int offset = k % 2 == 0 ? n - k + 1 : 1;
                const LatticeSpec lattice{n, k, offset};
                for (const Geometry& g : geometries) {
                    int index = 0;
                    for (double theta : angle_grid()) {
                        const double beta = betas[index++ % 4];
                        const ModeSpec probe{g.probe_kind, theta};
                        const GeometryCoefficients c = coefficients(g.pump, probe, lattice);
                        const OracleMoments o = oracle_d_moments(*dist, c, beta);
                        const QuadratureStats q = quadrature_stats(c, beta, moments);
                        const std::string ctx = state_label(kind, n) + " K=" + std::to_string(k) +
                                                " offset=" + std::to_string(offset) + " " + g.name +
                                                " theta1=" + num(theta) + " beta=" + num(beta);
                        const complex amp = expected_amplitude(c, moments);
                        suite.check(amp.real(), o.amp.real(), ctx + " amp (re)");
                        suite.check(amp.imag(), o.amp.imag(), ctx + " amp (im)");
                        suite.check(intensity(c, moments), o.intensity, ctx + " intensity");
                        suite.check(noise_r(c, moments), o.noise_r, ctx + " noise R");
                        suite.check(q.mean, o.quad_mean, ctx + " quadrature mean");
                        suite.check(q.variance, o.quad_var, ctx + " quadrature variance");
                        if (!moments.has_fourth_order())
                            continue;
                        const double fourth = fourth_moment(c, moments);
                        suite.check(fourth, o.fourth, ctx + " fourth moment");
                        if (g.probe_kind == ModeKind::traveling && g.pump.kind == ModeKind::traveling) {
                            traveling.check(fourth_moment_traveling(c.alpha_minus, k, moments), fourth,
                                            ctx + " traveling fourth moment");
                            traveling.check(noise_r_traveling(c.alpha_minus, k, moments), noise_r(c, moments),
                                            ctx + " traveling noise R");
                        }
                    }
                }
            }
        }
    }
}

void normalization_suite(Suite& suite, int max_nm) {
    for (StateKind kind : {StateKind::mott_insulator, StateKind::superfluid, StateKind::coherent}) {
        for (int n = 2; n <= max_nm; ++n) {
            const AtomState state(kind, n, n);
            const auto dist = try_enumerate(state);
            if (!dist) {
                ++suite.skipped;
                continue;
            }
            const std::string label = state_label(kind, n);
            double total = 0.0;
            for (double p : dist->probabilities())
                total += p;
            suite.check(total + dist->truncation_deficit(), 1.0, label + " total probability");
            if (kind == StateKind::superfluid)
                suite.check(static_cast<double>(dist->size()), superfluid_basis_size(n, n), label + " basis size");
            for (int k = 1; k <= n; ++k) {
                const GeometryCoefficients ones = make_coefficients(std::vector<complex>(k, 1.0), 1);
                const OracleMoments o = oracle_d_moments(*dist, ones);
                const CountStatistics stats = n_k_statistics(state, k);
                const std::string ctx = label + " K=" + std::to_string(k);
                suite.check(stats.mean, o.amp.real(), ctx + " <N_K>");
                suite.check(stats.variance, o.noise_r, ctx + " var N_K");
            }
        }
    }
}

} // namespace

bool agrees(double a, double b, double tol) {
    return std::abs(a - b) <= std::max(tol * std::max(std::abs(a), std::abs(b)), tol / 100.0);
}

int run_selftest(const SelftestOptions& options, std::ostream& out) {
    if (options.max_nm < 2 || options.max_nm > 8)
        throw std::invalid_argument("max_nm must lie in 2..8, got " + std::to_string(options.max_nm));
    if (!(options.tolerance >= 0.0))
        throw std::invalid_argument("tolerance must be nonnegative");

    std::vector<Suite> suites;
    const double tol = options.tolerance;
    suites.emplace_back("geometry", tol);
    suites.emplace_back("raw moments", tol);
    suites.emplace_back("D moments", tol);
    suites.emplace_back("traveling forms", tol);
    suites.emplace_back("normalization", tol);

    geometry_suite(suites[0]);
    raw_moment_suite(suites[1], options.max_nm);
    d_moment_suite(suites[2], suites[3], options.max_nm);
    normalization_suite(suites[4], options.max_nm);

    char line[160];
    std::snprintf(line, sizeof line, "%-18s %9s %9s %8s %12s  %s\n", "suite", "cases", "failed", "skipped",
                  "worst rel", "status");
    out << line;
    const Suite* failing = nullptr;
    for (const Suite& s : suites) {
        std::snprintf(line, sizeof line, "%-18s %9ld %9ld %8ld %12.3e  %s\n", s.name.c_str(), s.cases, s.failures,
                      s.skipped, s.worst, s.failures == 0 ? "PASS" : "FAIL");
        out << line;
        if (s.failures && !failing)
            failing = &s;
    }
    out << "max_nm=" << options.max_nm << " tolerance=" << num(tol) << '\n';
    if (failing) {
        out << "first failure [" << failing->name << "]: " << *failing->first_failure << '\n';
        return 1;
    }
    out << "all suites passed\n";
    return 0;
}

} // namespace latticeglow
