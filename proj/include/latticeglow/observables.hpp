#pragma once

#include <optional>
#include <span>
#include <vector>

#include "latticeglow/atom_states.hpp"
#include "latticeglow/fock_oracle.hpp"
#include "latticeglow/mode_geometry.hpp"

namespace latticeglow {

// Parameters of the stationary scattered field a1 = C D with
// C = -i g0^2 a0 / (Delta_0a (kappa - i Delta_01)).
// The defaults give |C| = 1.
struct ScatterModel {
    double g0 = 1.0;
    complex a0 = {1.0, 0.0};
    double delta_0a = 1.0;
    double kappa = 1.0;
    double delta_01 = 0.0;

    void validate() const;
    complex coupling() const;
    double coupling_norm2() const { return std::norm(coupling()); }
};

// Variance-like results closer to zero than this from below are rounding
// residue and are reported as zero.
inline constexpr double roundoff_clamp = 1e-9;

struct QuadratureStats {
    double mean = 0;
    double variance = 0;
};

// <D> = n A
complex expected_amplitude(const GeometryCoefficients& coeffs, const MomentSet& moments);

// <D* D> = <n_a n_b> |A|^2 + (<n^2> - <n_a n_b>) sum |A_i|^2
double intensity(const GeometryCoefficients& coeffs, const MomentSet& moments);

// R = <D* D> - |<D>|^2 in fluctuation form.
double noise_r(const GeometryCoefficients& coeffs, const MomentSet& moments);

// Two traveling waves: R through the Dirichlet kernel of alpha_-.
double noise_r_traveling(double alpha_minus, int illuminated, const MomentSet& moments);

// Intensity averaged over random mode phases: p0 K <n^2> with
// p0 = 1, 1/2, 1/4 for zero, one, two standing modes.
double incoherent_intensity(const AtomState& state, int illuminated, ModeKind pump, ModeKind probe);

QuadratureStats quadrature_stats(const GeometryCoefficients& coeffs, double beta, const MomentSet& moments);

// (Delta X_phi)^2 = 1/4 + |C|^2 (Delta X^D_beta)^2
double light_quadrature_variance(const ScatterModel& model, double d_quadrature_variance);

// <D*^2 D^2> from the site-independent moments. Needs M >= 4 so that every
// fourth-order entry is defined; throws std::domain_error otherwise.
double fourth_moment(const GeometryCoefficients& coeffs, const MomentSet& moments);

// Same quantity for two traveling waves written in terms of alpha_-.
double fourth_moment_traveling(double alpha_minus, int illuminated, const MomentSet& moments);

// <D*^2 D^2> for a state, falling back to exhaustive enumeration when the
// closed form is unavailable (M < 4).
double fourth_moment(const GeometryCoefficients& coeffs, const AtomState& state);

// (Delta n_ph)^2 = |C|^4 (<D*^2 D^2> - <D* D>^2) + |C|^2 <D* D>
double photon_number_variance(const ScatterModel& model, double fourth, double intensity);

struct CavityExample {
    complex amp;
    double intensity = 0;
    double fourth_var = 0;
    double selforg_intensity = 0;
};

// Transverse pump (theta0 = 0) scattering into a cavity along the lattice
// axis (theta1 = pi/2) with d = lambda/2. Needs even K.
CavityExample cavity_example(const AtomState& state, int illuminated);

// Mean and variance of sum_i |u1(x_i)|^2 n_i over the illuminated sites.
QuadratureStats dispersion_shift_stats(const AtomState& state, const ModeSpec& probe, const LatticeSpec& lattice);

struct ObservableRow {
    double theta1 = 0;
    complex amp;
    double intensity = 0;
    double noise_r = 0;
    double incoherent = 0;
    double quad_mean = 0;
    double quad_var = 0;
    double fourth = 0;
    double fourth_var = 0;
    double fourth_var_raw = 0;
    double photon_var = 0;
};

struct ScanRequest {
    ModeSpec pump;
    ModeSpec probe; // theta is replaced by each grid value
    LatticeSpec lattice;
    ScatterModel model;
    double beta = 0.0;
    bool with_fourth = true;
};

// One row per grid angle, in grid order. Rows are evaluated in parallel.
std::vector<ObservableRow> angular_scan(const ScanRequest& request, const AtomState& state,
                                        std::span<const double> grid);

} // namespace latticeglow
