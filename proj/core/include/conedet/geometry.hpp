#pragma once

// The curvature-one metric on the sphere with three cone points of angle pi
// at 0, 1, inf, its pull-back to the double cover branched over {0, 1, inf, t}
// and the resulting conformal factor on the flat torus C / (Z + sigma Z).

#include <array>
#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "conedet/moduli.hpp"
#include "conedet/specialfn.hpp"

namespace conedet {

/// w = ((1 + z^2) / (1 - z^2))^2. Sends the quarter disk {|z| <= 1,
/// 0 <= arg z <= pi/2} onto the closed upper half-plane, with i, 0, 1 going
/// to 0, 1, inf. Throws DomainError at the poles z = +-1.
cplx conformal_map(cplx z);
cplx conformal_map_d1(cplx z);
cplx conformal_map_d2(cplx z);

/// rho(w) = 1 / (|w| |w - 1| (|sqrt w + 1| + |sqrt w - 1|)^2), the conformal
/// factor of the base metric rho |dw|^2. Throws DomainError at w = 0, 1.
double metric_rho(cplx w);
double log_metric_rho(cplx w);

/// Gaussian curvature -(2 / rho) d dbar log rho of rho |dw|^2 by a 5-point
/// Laplacian with one Richardson step (h and h/2).
double gauss_curvature(cplx w, double h);

/// Same scheme for an arbitrary conformal factor f |dw|^2 at w.
/// `log_increment(d)` returns log f(w + d) - log f(w); passing the difference
/// rather than log f lets the caller avoid cancellation. No singular-point
/// guard is applied.
double gauss_curvature_of(const std::function<double(cplx)>& log_increment, double factor_at_w,
                          double h);

/// Degree-two elliptic function on C / (Z + sigma Z) branched over
/// {0, 1, inf, t}, built as an affine normalization of
/// P(z) = (theta[1,0](z) / theta[1,1](z))^2, which differs from the
/// Weierstrass p-function of the lattice by an affine change.
///
/// The pole (over inf) sits at z = 0. The three half-periods 1/2, sigma/2,
/// (1 + sigma)/2 are assigned to 0, 1 and t by searching the six labelings
/// for the one whose fourth branch value equals t.
class CoveringMap {
public:
    /// Throws DomainError unless t lies in the orbit of the curve's modulus
    /// to within 1e-8.
    CoveringMap(const PeriodRatio& sigma, const ModulusPoint& t);

    [[nodiscard]] cplx operator()(cplx z) const;
    [[nodiscard]] cplx derivative(cplx z) const;
    /// rho(mu(z)) |mu'(z)|^2, finite at the pole of mu.
    [[nodiscard]] double conformal_factor(cplx z) const;

    [[nodiscard]] const PeriodRatio& sigma() const { return sigma_; }
    [[nodiscard]] cplx t() const { return t_; }
    /// Branch value recovered from the theta values at the half-periods.
    [[nodiscard]] cplx recovered_t() const { return recovered_t_; }
    /// Half-periods lying over 0, 1 and t.
    [[nodiscard]] const std::array<cplx, 3>& half_periods() const { return half_periods_; }
    /// Indices (0: 1/2, 1: sigma/2, 2: (1+sigma)/2) of the half-periods over 0, 1, t.
    [[nodiscard]] const std::array<int, 3>& labeling() const { return labeling_; }
    [[nodiscard]] cplx cone_point() const { return half_periods_[2]; }

private:
    struct Thetas {
        cplx num, den, dnum, dden;
    };
    [[nodiscard]] Thetas thetas(cplx z) const;
    [[nodiscard]] cplx p_value(cplx z) const;

    PeriodRatio sigma_;
    cplx t_;
    cplx recovered_t_;
    cplx offset_ = 0.0;  // P value at the half-period over 0
    cplx scale_ = 1.0;   // P(over 1) - P(over 0)
    std::array<cplx, 3> half_periods_{};
    std::array<int, 3> labeling_{};
};

/// mu(z) for the covering realized on the given lattice.
cplx covering_map_torus(cplx z, const PeriodRatio& sigma, const ModulusPoint& t);

struct SingularPoint {
    cplx z;
    int grid_i;  // nearest sample index along the first period
    int grid_j;  // nearest sample index along sigma
    int vanishing_order;
};

/// Samples of exp(2 phi) = rho(mu(z)) |mu'(z)|^2 at the cell centres
/// z = (i + 1/2)/N1 + sigma (j + 1/2)/N2, row-major in (i, j).
struct ConformalField {
    PeriodRatio sigma{cplx(0.0, 1.0)};
    cplx t;
    std::array<int, 2> grid_shape{};
    std::vector<double> values;
    std::vector<SingularPoint> singular_points;
    std::array<int, 3> labeling{};

    [[nodiscard]] double at(int i, int j) const {
        return values[static_cast<std::size_t>(i) * grid_shape[1] + j];
    }
    [[nodiscard]] double cell_area() const {
        return sigma.imag() / (static_cast<double>(grid_shape[0]) * grid_shape[1]);
    }
    /// Midpoint-rule area; tends to 2 pi.
    [[nodiscard]] double area() const;
};

ConformalField conformal_factor_on_torus(const PeriodRatio& sigma, const ModulusPoint& t,
                                         std::array<int, 2> grid_shape);

/// Plain-text grid file: a header with sigma, t, shape, labeling and
/// singular points followed by N1 rows of N2 values (see docs/field_format.md).
void write_field(std::ostream& out, const ConformalField& field);
ConformalField read_field(std::istream& in);

}  // namespace conedet
