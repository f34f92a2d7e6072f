#include "latticeglow/mode_geometry.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace latticeglow {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Below this |sin(alpha/2)| the Dirichlet kernel is replaced by its limit.
constexpr double singular_guard = 1e-9;

// Splits alpha = reduced + 2 pi l with reduced in [-pi, pi]; returns the
// reduced angle and whether l is odd.
std::pair<double, bool> reduce_angle(double alpha) {
    const double reduced = std::remainder(alpha, two_pi);
    const double turns = std::round((alpha - reduced) / two_pi);
    return {reduced, std::fmod(std::abs(turns), 2.0) == 1.0};
}

} // namespace

double ModeSpec::lattice_phase() const {
    return two_pi * wavelength_ratio * std::sin(theta);
}

void ModeSpec::validate() const {
    if (!(wavelength_ratio > 0.0) || !std::isfinite(wavelength_ratio))
        throw std::invalid_argument("mode wavelength_ratio (d/lambda) must be positive, got " +
                                    std::to_string(wavelength_ratio));
    if (!std::isfinite(theta))
        throw std::invalid_argument("mode theta must be finite");
    if (!std::isfinite(phase))
        throw std::invalid_argument("mode phase must be finite");
}

void LatticeSpec::validate() const {
    if (sites < 1)
        throw std::invalid_argument("lattice must have M >= 1 sites, got " + std::to_string(sites));
    if (illuminated < 1 || illuminated > sites)
        throw std::invalid_argument("illuminated site count must satisfy 1 <= K <= M, got K=" +
                                    std::to_string(illuminated) + ", M=" + std::to_string(sites));
    if (offset < 1)
        throw std::invalid_argument("illumination offset must be >= 1, got " + std::to_string(offset));
    if (last_site() > sites)
        throw std::invalid_argument("illuminated window must fit the lattice: offset + K - 1 <= M, got " +
                                    std::to_string(last_site()) + " > " + std::to_string(sites));
}

complex mode_function(const ModeSpec& mode, int site_index) {
    const double arg = site_index * mode.lattice_phase() + mode.phase;
    if (mode.kind == ModeKind::traveling)
        return {std::cos(arg), std::sin(arg)};
    return {std::cos(arg), 0.0};
}

GeometryCoefficients make_coefficients(std::vector<complex> a, int first_site) {
    GeometryCoefficients c;
    c.a = std::move(a);
    c.first_site = first_site;
    for (const complex& ai : c.a) {
        const double abs2 = std::norm(ai);
        c.sum_a += ai;
        c.sum_abs2 += abs2;
        c.sum_sq += ai * ai;
        c.sum_abs2_a += abs2 * ai;
        c.sum_abs4 += abs2 * abs2;
    }
    return c;
}

GeometryCoefficients coefficients(const ModeSpec& pump, const ModeSpec& probe,
                                  const LatticeSpec& lattice) {
    pump.validate();
    probe.validate();
    lattice.validate();

    std::vector<complex> a;
    a.reserve(static_cast<std::size_t>(lattice.illuminated));
    for (int m = lattice.offset; m <= lattice.last_site(); ++m)
        a.push_back(std::conj(mode_function(probe, m)) * mode_function(pump, m));

    GeometryCoefficients c = make_coefficients(std::move(a), lattice.offset);
    c.alpha_minus = pump.lattice_phase() - probe.lattice_phase();
    c.alpha_plus = pump.lattice_phase() + probe.lattice_phase();
    return c;
}

double dirichlet_ratio(double alpha, int count) {
    const auto [reduced, odd_turns] = reduce_angle(alpha);
    // sin(K(r + 2 pi l)/2) / sin((r + 2 pi l)/2) = (-1)^{l(K-1)} sin(K r/2) / sin(r/2)
    const double sign = (odd_turns && count % 2 == 0) ? -1.0 : 1.0;
    const double denom = std::sin(0.5 * reduced);
    if (std::abs(denom) < singular_guard)
        return sign * count;
    return sign * std::sin(0.5 * count * reduced) / denom;
}

complex closed_form_traveling_sum(double alpha_minus, int count) {
    if (count < 1)
        throw std::invalid_argument("closed_form_traveling_sum needs K >= 1");
    // exp(i m 2 pi l) = 1, so the sum only sees the reduced angle.
    const double reduced = reduce_angle(alpha_minus).first;
    const double denom = std::sin(0.5 * reduced);
    if (std::abs(denom) < singular_guard)
        return {static_cast<double>(count), 0.0};
    const double ratio = std::sin(0.5 * count * reduced) / denom;
    const double phase = 0.5 * (count + 1) * reduced;
    return ratio * complex(std::cos(phase), std::sin(phase));
}

QuadratureCoefficients quadrature_coefficients(const GeometryCoefficients& coeffs, double beta) {
    QuadratureCoefficients q;
    q.a.reserve(coeffs.a.size());
    const complex rotation = std::polar(1.0, -beta);
    for (const complex& ai : coeffs.a) {
        const double projected = (ai * rotation).real();
        q.a.push_back(projected);
        q.sum += projected;
    }
    return q;
}

} // namespace latticeglow
