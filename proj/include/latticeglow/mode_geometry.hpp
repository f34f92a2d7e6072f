#pragma once

#include <complex>
#include <vector>

namespace latticeglow {

using complex = std::complex<double>;

enum class ModeKind { traveling, standing };

// One plane-wave optical mode. theta is measured from the normal to the
// lattice axis; wavelength_ratio is d/lambda.
struct ModeSpec {
    ModeKind kind = ModeKind::traveling;
    double theta = 0.0;
    double wavelength_ratio = 0.5;
    double phase = 0.0;

    // k_x d = 2 pi (d/lambda) sin(theta)
    double lattice_phase() const;
    void validate() const;
};

// A 1D lattice of `sites` sites (x_m = m d, m = 1..sites) of which the
// contiguous block [offset, offset + illuminated - 1] is lit.
struct LatticeSpec {
    int sites = 1;
    int illuminated = 1;
    int offset = 1;

    int last_site() const { return offset + illuminated - 1; }
    void validate() const;
};

// Per-site coefficients A_i = u1*(x_i) u0(x_i) over the illuminated window
// together with the aggregate sums the moment formulas consume.
struct GeometryCoefficients {
    std::vector<complex> a;
    int first_site = 1;

    complex sum_a;       // sum A_i
    double sum_abs2 = 0; // sum |A_i|^2
    complex sum_sq;      // sum A_i^2
    complex sum_abs2_a;  // sum |A_i|^2 A_i
    double sum_abs4 = 0; // sum |A_i|^4

    double alpha_minus = 0;
    double alpha_plus = 0;

    int size() const { return static_cast<int>(a.size()); }
};

// u(x_m): exp(i(m k_x d + phi)) for traveling modes, cos(m k_x d + phi)
// for standing modes.
complex mode_function(const ModeSpec& mode, int site_index);

GeometryCoefficients coefficients(const ModeSpec& pump, const ModeSpec& probe,
                                  const LatticeSpec& lattice);

// Builds the aggregate sums for an arbitrary coefficient list. The phase
// parameters are left at zero.
GeometryCoefficients make_coefficients(std::vector<complex> a, int first_site = 1);

// sin(K a / 2) / sin(a / 2), continued through the removable singularities
// at a = 2 pi l where it equals K (-1)^{l (K - 1)}.
double dirichlet_ratio(double alpha, int count);

// sum_{m=1..K} exp(i m alpha) in closed form.
complex closed_form_traveling_sum(double alpha_minus, int count);

struct QuadratureCoefficients {
    std::vector<double> a;
    double sum = 0;
};

// A_i^beta = |A_i| cos(arg A_i - beta) = Re(A_i e^{-i beta}).
QuadratureCoefficients quadrature_coefficients(const GeometryCoefficients& coeffs,
                                               double beta);

} // namespace latticeglow
