#pragma once

// Closed-form determinant of the Friedrichs Laplacian on a genus-one
// surface with the curvature-one metric having one conical point of angle
// 4 pi, and the local quantities that enter its variational derivation.
//
// Determinants are carried as logarithms. Every value is defined up to one
// additive constant that is the same for all t, so only differences are
// meaningful.

#include <complex>

#include "conedet/moduli.hpp"
#include "conedet/numdiff.hpp"
#include "conedet/specialfn.hpp"

namespace conedet {

struct DetValue {
    double log_value = 0.0;
    /// Always true here; the universal additive constant is not known.
    bool up_to_constant = true;
};

/// Coefficients of u = A x + B x^3 + O(x^5) where x^2 = w - t, u^2 = z - s and
/// w = ((1 + z^2) / (1 - z^2))^2.
struct LocalTaylorData {
    cplx s;
    cplx A;
    cplx B;
};

/// F(t) = |t|^{1/24} |t-1|^{1/24} / (|sqrt t - 1| + |sqrt t + 1|)^{1/4}.
double F(const ModulusPoint& t);
double log_F(const ModulusPoint& t);

/// log(Im sigma |eta(sigma)|^4): the flat unit-area torus determinant.
DetValue flat_det(const PeriodRatio& sigma);

/// log(Im sigma |eta(sigma)|^4 F(t)) with sigma = sigma_from_t(t).
DetValue det_value(const ModulusPoint& t);

/// Bergman tau-function eta(sigma)^2 (t (t - 1))^{1/12}, up to a constant
/// factor. The 1/12 root is continued along the straight segment from
/// 1/4 + i/4; sigma is the principal Legendre value.
cplx tau_bergman(const ModulusPoint& t);

/// log(Im sigma |tau|^2 (|t| |t-1| (|sqrt t + 1| + |sqrt t - 1|)^2)^{-1/8}).
DetValue det_prelim(const ModulusPoint& t);

/// Preimage s of t under conformal_map, taken in the closed quarter disk
/// {|s| <= 1, 0 <= arg s <= pi/2} when Im t >= 0 and in its mirror image
/// {|s| <= 1, -pi/2 <= arg s <= 0} when Im t < 0 (the quarter disk covers
/// only the closed upper half-plane).
cplx s_from_t(const ModulusPoint& t);

LocalTaylorData taylor_AB(const ModulusPoint& t);

/// A^2 conj(s) / (2 (1 + |s|^2)) - B / A.
cplx b_minus_inf_from_AB(const LocalTaylorData& data);
cplx b_minus_inf_from_AB(const ModulusPoint& t);

/// d/dt log (|t| |t-1| (|sqrt t + 1| + |sqrt t - 1|)^2)^{1/4}, Wirtinger
/// finite differences.
cplx b_minus_inf_closed(const ModulusPoint& t, const WirtingerSteps& steps = {});

/// b(0) = 2 d/dt log tau + 2 d/dt log Im sigma, both by Wirtinger finite
/// differences with sigma held on the analytic branch of the centre point.
cplx schiffer_b0(const ModulusPoint& t, const WirtingerSteps& steps = {});

/// d/dt of det_value(t).log_value.
cplx det_log_derivative(const ModulusPoint& t, const WirtingerSteps& steps = {});

/// Square of the normalized holomorphic differential dw / (4 K(t) y) at the
/// branch point over t, in the local parameter sqrt(w - t).
cplx normalized_differential_sq(const ModulusPoint& t);

}  // namespace conedet
