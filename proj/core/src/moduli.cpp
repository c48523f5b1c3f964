#include "conedet/moduli.hpp"

#include <algorithm>
#include <cmath>

#include "conedet/errors.hpp"

namespace conedet {

ModulusPoint::ModulusPoint(cplx t) : t_(t) {
    if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
        throw DomainError("modulus point must be finite");
    }
    if (t == cplx(0.0) || t == cplx(1.0)) {
        throw DomainError("modulus point t must avoid the branch points 0 and 1");
    }
}

PeriodRatio sigma_from_t(const ModulusPoint& tp) {
    const cplx t = tp.value();
    // K(t) has its cut at t in [1, inf), K(1 - t) at t in (-inf, 0].
    // With t -> t + i0, 1 - t approaches its cut from below.
    const cplx k = elliptic_K_limit(t, CutSide::kAbove);
    const cplx k_comp = elliptic_K_limit(1.0 - t, CutSide::kBelow);
    const cplx sigma = cplx(0.0, 1.0) * k_comp / k;
    if (!(sigma.imag() > 0.0)) {
        throw InternalError("sigma_from_t: period ratio left the upper half-plane");
    }
    return PeriodRatio(sigma);
}

ModulusPoint t_from_sigma(const PeriodRatio& sigma) {
    const cplx num = theta(ThetaCharacteristic(1, 0), 0.0, sigma);
    const cplx den = theta(ThetaCharacteristic(0, 1), 0.0, sigma);
    const cplx r = num / den;
    const cplx r2 = r * r;
    return ModulusPoint(-(r2 * r2));
}

GOrbit g_orbit(const ModulusPoint& tp) {
    const cplx t = tp.value();
    GOrbit orbit{{t, 1.0 / t, 1.0 - t, 1.0 / (1.0 - t), t / (t - 1.0), (t - 1.0) / t}, t};

    // Lexicographic (|t|, Re t, Im t) with a relative tolerance on each key so
    // rounding differences between orbit members do not change the choice.
    constexpr double kTol = 1e-12;
    auto less = [](cplx x, cplx y) {
        const double ax = std::abs(x), ay = std::abs(y);
        const double scale = std::max({1.0, ax, ay});
        if (std::abs(ax - ay) > kTol * scale) return ax < ay;
        if (std::abs(x.real() - y.real()) > kTol * scale) return x.real() < y.real();
        if (std::abs(x.imag() - y.imag()) > kTol * scale) return x.imag() < y.imag();
        return false;
    };
    orbit.canonical = *std::min_element(orbit.members.begin(), orbit.members.end(), less);
    return orbit;
}

bool same_moduli_point(const ModulusPoint& t1, const ModulusPoint& t2, double tol) {
    const cplx target = t2.value();
    const double scale = std::max(1.0, std::abs(target));
    const GOrbit orbit = g_orbit(t1);
    return std::any_of(orbit.members.begin(), orbit.members.end(),
                       [&](cplx m) { return std::abs(m - target) <= tol * scale; });
}

}  // namespace conedet
