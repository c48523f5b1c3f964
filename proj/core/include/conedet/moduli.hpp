#pragma once

// Coordinates on the moduli space of genus-one curves: the fourth branch
// point t of y^2 = w (w - 1)(w - t) and the period ratio sigma.

#include <array>
#include <complex>

#include "conedet/specialfn.hpp"

namespace conedet {

/// Branch point t in C \ {0, 1}.
class ModulusPoint {
public:
    /// Throws DomainError for t = 0, t = 1 or non-finite t.
    explicit ModulusPoint(cplx t);
    [[nodiscard]] cplx value() const { return t_; }

private:
    cplx t_;
};

/// The orbit of t under the anharmonic group generated by t -> 1/t and
/// t -> 1 - t. `members` are, in order, t, 1/t, 1-t, 1/(1-t), t/(t-1), (t-1)/t.
struct GOrbit {
    std::array<cplx, 6> members;
    cplx canonical;
};

/// sigma = i K(1 - t) / K(t). Real t on (-inf, 0) or (1, inf) is read as t + i0.
PeriodRatio sigma_from_t(const ModulusPoint& t);

/// t = -(theta[1,0](0|sigma) / theta[0,1](0|sigma))^4. This is an orbit
/// member of the Legendre value, not its inverse; see same_moduli_point.
ModulusPoint t_from_sigma(const PeriodRatio& sigma);

GOrbit g_orbit(const ModulusPoint& t);

/// True iff t2 is within tol * max(1, |t2|) of an orbit member of t1.
bool same_moduli_point(const ModulusPoint& t1, const ModulusPoint& t2, double tol);

}  // namespace conedet
