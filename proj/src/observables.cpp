#include "latticeglow/observables.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>

#include "latticeglow/parallel.hpp"

namespace latticeglow {

namespace {

// Zeroes small negative values whose size is within rounding of `scale`.
double clamp_roundoff(double value, double scale) {
    if (value < 0.0 && value > -roundoff_clamp * std::max(1.0, std::abs(scale)))
        return 0.0;
    return value;
}

int checked_int(std::int64_t value, const char* what) {
    if (value > std::numeric_limits<int>::max())
        throw std::invalid_argument(std::string(what) + " too large for a lattice index");
    return static_cast<int>(value);
}

std::string format_angle(double theta) {
    std::ostringstream os;
    os.precision(17);
    os << theta;
    return os.str();
}

} // namespace

void ScatterModel::validate() const {
    if (!(kappa > 0.0))
        throw std::invalid_argument("scatter model needs kappa > 0");
    if (!(std::abs(delta_0a) > 0.0))
        throw std::invalid_argument("scatter model needs a nonzero pump-atom detuning delta_0a");
}

complex ScatterModel::coupling() const {
    validate();
    return complex(0.0, -1.0) * g0 * g0 * a0 / (delta_0a * complex(kappa, -delta_01));
}

complex expected_amplitude(const GeometryCoefficients& coeffs, const MomentSet& moments) {
    return moments.m1 * coeffs.sum_a;
}

double intensity(const GeometryCoefficients& coeffs, const MomentSet& moments) {
    // With M = 1 the pair term is absent and K = 1 makes its prefactor vanish.
    const double pair = moments.m11.value_or(0.0);
    return pair * std::norm(coeffs.sum_a) + (moments.m2 - pair) * coeffs.sum_abs2;
}

double noise_r(const GeometryCoefficients& coeffs, const MomentSet& moments) {
    const double cov = moments.pair_covariance();
    const double value = cov * std::norm(coeffs.sum_a) + (moments.site_variance() - cov) * coeffs.sum_abs2;
    return clamp_roundoff(value, moments.m2 * coeffs.sum_abs2);
}

double noise_r_traveling(double alpha_minus, int illuminated, const MomentSet& moments) {
    const double s = dirichlet_ratio(alpha_minus, illuminated);
    const double cov = moments.pair_covariance();
    const double value = cov * s * s + (moments.site_variance() - cov) * illuminated;
    return clamp_roundoff(value, moments.m2 * illuminated);
}

double incoherent_intensity(const AtomState& state, int illuminated, ModeKind pump, ModeKind probe) {
    if (illuminated < 1 || illuminated > state.sites())
        throw std::invalid_argument("incoherent_intensity needs 1 <= K <= M");
    double p0 = 1.0;
    if (pump == ModeKind::standing)
        p0 *= 0.5;
    if (probe == ModeKind::standing)
        p0 *= 0.5;
    const int second[] = {2};
    return p0 * illuminated * raw_moment(state, second);
}

QuadratureStats quadrature_stats(const GeometryCoefficients& coeffs, double beta, const MomentSet& moments) {
    const QuadratureCoefficients q = quadrature_coefficients(coeffs, beta);
    double sum_sq = 0.0;
    for (double a : q.a)
        sum_sq += a * a;
    const double cov = moments.pair_covariance();
    QuadratureStats stats;
    stats.mean = moments.m1 * q.sum;
    stats.variance = clamp_roundoff(cov * q.sum * q.sum + (moments.site_variance() - cov) * sum_sq,
                                    moments.m2 * sum_sq);
    return stats;
}

double light_quadrature_variance(const ScatterModel& model, double d_quadrature_variance) {
    if (d_quadrature_variance < 0.0)
        throw std::invalid_argument("quadrature variance of D must be nonnegative");
    return 0.25 + model.coupling_norm2() * d_quadrature_variance;
}

double fourth_moment(const GeometryCoefficients& coeffs, const MomentSet& moments) {
    if (!moments.has_fourth_order())
        throw std::domain_error("closed-form fourth moment needs four distinct sites (M >= 4); "
                                "use the exhaustive oracle for smaller lattices");
    const double abcd = *moments.m1111;
    const double aabc = *moments.m211;
    const double aaab = *moments.m31;
    const double aabb = *moments.m22;
    const double aaaa = moments.m4;

    const double abs_a2 = std::norm(coeffs.sum_a);
    const complex conj_a = std::conj(coeffs.sum_a);

    const double cubic = 2.0 * (coeffs.sum_abs2_a * conj_a).real();          // (S|A|^2A)(SA*) + c.c.
    const double square = 2.0 * (coeffs.sum_sq * conj_a * conj_a).real();     // (SA^2)(SA*)^2 + c.c.
    const double pair_block = abcd - 2.0 * aabc + aabb;

    return abs_a2 * abs_a2 * abcd
         + 2.0 * cubic * (2.0 * abcd - 3.0 * aabc + aaab)
         + square * (aabc - abcd)
         + 2.0 * coeffs.sum_abs2 * coeffs.sum_abs2 * pair_block
         + std::norm(coeffs.sum_sq) * pair_block
         + 4.0 * abs_a2 * coeffs.sum_abs2 * (aabc - abcd)
         + coeffs.sum_abs4 * (-6.0 * abcd + 12.0 * aabc - 4.0 * aaab - 3.0 * aabb + aaaa);
}

double fourth_moment_traveling(double alpha_minus, int illuminated, const MomentSet& moments) {
    if (!moments.has_fourth_order())
        throw std::domain_error("closed-form fourth moment needs four distinct sites (M >= 4)");
    const double abcd = *moments.m1111;
    const double aabc = *moments.m211;
    const double aaab = *moments.m31;
    const double aabb = *moments.m22;
    const double aaaa = moments.m4;
    const double k = illuminated;

    const double s = dirichlet_ratio(alpha_minus, illuminated);
    // sin(K alpha)/sin(alpha) = s cos(K alpha/2)/cos(alpha/2), kept finite at alpha = pi.
    const double s2 = dirichlet_ratio(2.0 * alpha_minus, illuminated);
    const double pair_block = abcd - 2.0 * aabc + aabb;

    return s * s * s * s * abcd
         + 2.0 * s * s * s2 * (aabc - abcd)
         - 4.0 * s * s * ((k - 2.0) * abcd - (k - 3.0) * aabc - aaab)
         + s2 * s2 * pair_block
         + 2.0 * k * k * pair_block
         + k * (-6.0 * abcd + 12.0 * aabc - 4.0 * aaab - 3.0 * aabb + aaaa);
}

double fourth_moment(const GeometryCoefficients& coeffs, const AtomState& state) {
    const MomentSet moments = moment_set(state);
    if (moments.has_fourth_order())
        return fourth_moment(coeffs, moments);
    return oracle_d_moments(enumerate(state), coeffs).fourth;
}

double photon_number_variance(const ScatterModel& model, double fourth, double intensity) {
    if (fourth < 0.0 || intensity < 0.0)
        throw std::invalid_argument("photon_number_variance needs nonnegative moments");
    const double c2 = model.coupling_norm2();
    return c2 * c2 * (fourth - intensity * intensity) + c2 * intensity;
}

CavityExample cavity_example(const AtomState& state, int illuminated) {
    if (illuminated % 2 != 0)
        throw std::invalid_argument("cavity example assumes an even number of illuminated sites K so that "
                                    "neighbouring sites cancel pairwise; got K=" + std::to_string(illuminated));
    const LatticeSpec lattice{checked_int(state.sites(), "M"), illuminated, 1};
    const ModeSpec pump{ModeKind::traveling, 0.0, 0.5, 0.0};
    const ModeSpec probe{ModeKind::traveling, std::numbers::pi / 2.0, 0.5, 0.0};
    const GeometryCoefficients coeffs = coefficients(pump, probe, lattice);
    const MomentSet moments = moment_set(state);

    CavityExample out;
    out.amp = expected_amplitude(coeffs, moments);
    out.intensity = intensity(coeffs, moments);
    const double fourth = fourth_moment(coeffs, state);
    out.fourth_var = clamp_roundoff(fourth - out.intensity * out.intensity, fourth);
    // Period-doubled Mott state: every illuminated atom radiates in phase, D = N_K.
    const double n_k = state.filling() * illuminated;
    out.selforg_intensity = n_k * n_k;
    return out;
}

QuadratureStats dispersion_shift_stats(const AtomState& state, const ModeSpec& probe, const LatticeSpec& lattice) {
    probe.validate();
    lattice.validate();
    if (lattice.sites != state.sites())
        throw std::invalid_argument("lattice and state disagree on the site count M");
    std::vector<complex> weights;
    for (int m = lattice.offset; m <= lattice.last_site(); ++m)
        weights.emplace_back(std::norm(mode_function(probe, m)), 0.0);
    return quadrature_stats(make_coefficients(std::move(weights), lattice.offset), 0.0, moment_set(state));
}

std::vector<ObservableRow> angular_scan(const ScanRequest& request, const AtomState& state,
                                        std::span<const double> grid) {
    if (grid.empty())
        throw std::invalid_argument("angular scan needs a non-empty angle grid");
    request.pump.validate();
    request.lattice.validate();
    request.model.validate();
    if (request.lattice.sites != state.sites())
        throw std::invalid_argument("lattice and state disagree on the site count M");

    const MomentSet moments = moment_set(state);
    const double incoherent =
        incoherent_intensity(state, request.lattice.illuminated, request.pump.kind, request.probe.kind);
    std::optional<OccupationDistribution> dist;
    if (request.with_fourth && !moments.has_fourth_order())
        dist = enumerate(state);

    std::vector<ObservableRow> rows(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        try {
            ModeSpec probe = request.probe;
            probe.theta = grid[i];
            const GeometryCoefficients coeffs = coefficients(request.pump, probe, request.lattice);
            ObservableRow& row = rows[i];
            row.theta1 = grid[i];
            row.amp = expected_amplitude(coeffs, moments);
            row.intensity = intensity(coeffs, moments);
            row.noise_r = noise_r(coeffs, moments);
            row.incoherent = incoherent;
            const QuadratureStats quad = quadrature_stats(coeffs, request.beta, moments);
            row.quad_mean = quad.mean;
            row.quad_var = quad.variance;
            if (request.with_fourth) {
                row.fourth = dist ? oracle_d_moments(*dist, coeffs).fourth : fourth_moment(coeffs, moments);
                row.fourth_var_raw = row.fourth - row.intensity * row.intensity;
                row.fourth_var = clamp_roundoff(row.fourth_var_raw, row.fourth);
                row.photon_var = photon_number_variance(request.model, row.fourth, row.intensity);
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("theta1=" + format_angle(grid[i]) + ": " + e.what());
        }
    });
    return rows;
}

} // namespace latticeglow
