#include "conedet/detformula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "conedet/errors.hpp"
#include "conedet/geometry.hpp"

namespace conedet {

namespace {

const cplx kTauBase{0.25, 0.25};

// |sqrt t + 1| + |sqrt t - 1|; independent of the sign of the root.
double root_sum(cplx t) {
    const cplx r = std::sqrt(t);
    return std::abs(r + 1.0) + std::abs(r - 1.0);
}

// log(|t| |t - 1| root_sum(t)^2), the reciprocal conformal factor of the
// base metric.
double log_inverse_conformal_factor(cplx t) {
    return std::log(std::abs(t)) + std::log(std::abs(t - 1.0)) + 2.0 * std::log(root_sum(t));
}

// log(t (t - 1)) continued along the segment from kTauBase.
cplx continued_log_tt1(cplx t) {
    auto f = [](cplx u) { return u * (u - 1.0); };
    // Distance from the segment to the zeros of f.
    auto seg_dist = [&](cplx p) {
        const cplx d = t - kTauBase;
        const double len2 = std::norm(d);
        double s = len2 > 0.0 ? ((std::conj(d) * (p - kTauBase)).real() / len2) : 0.0;
        s = std::clamp(s, 0.0, 1.0);
        return std::abs(kTauBase + s * d - p);
    };
    const double clearance = std::min(seg_dist(0.0), seg_dist(1.0));
    if (clearance < 1e-12) {
        throw DomainError("tau_bergman: continuation path passes through a branch point");
    }
    // Step length small against the clearance keeps each increment's
    // argument well inside (-pi, pi).
    const double len = std::abs(t - kTauBase);
    const int steps = std::max(8, static_cast<int>(std::ceil(8.0 * len / clearance)));
    cplx acc = std::log(f(kTauBase));
    cplx prev = kTauBase;
    for (int k = 1; k <= steps; ++k) {
        const cplx next = kTauBase + (t - kTauBase) * (static_cast<double>(k) / steps);
        acc += std::log(f(next) / f(prev));
        prev = next;
    }
    return acc;
}

cplx sigma_near(cplx t, cplx reference) {
    const cplx s = sigma_from_t(ModulusPoint(t)).value();
    return nearest_equivalent(s, reference);
}

}  // namespace

double log_F(const ModulusPoint& tp) {
    const cplx t = tp.value();
    return (std::log(std::abs(t)) + std::log(std::abs(t - 1.0))) / 24.0 - 0.25 * std::log(root_sum(t));
}

double F(const ModulusPoint& t) { return std::exp(log_F(t)); }

DetValue flat_det(const PeriodRatio& sigma) {
    return {std::log(sigma.imag()) + 4.0 * log_dedekind_eta(sigma).real(), true};
}

DetValue det_value(const ModulusPoint& t) {
    return {flat_det(sigma_from_t(t)).log_value + log_F(t), true};
}

cplx tau_bergman(const ModulusPoint& tp) {
    const PeriodRatio sigma = sigma_from_t(tp);
    return std::exp(2.0 * log_dedekind_eta(sigma) + continued_log_tt1(tp.value()) / 12.0);
}

DetValue det_prelim(const ModulusPoint& tp) {
    const cplx t = tp.value();
    const PeriodRatio sigma = sigma_from_t(tp);
    const double log_abs_tau_sq =
        4.0 * log_dedekind_eta(sigma).real() + std::log(std::abs(t * (t - 1.0))) / 6.0;
    return {std::log(sigma.imag()) + log_abs_tau_sq - log_inverse_conformal_factor(t) / 8.0, true};
}

cplx s_from_t(const ModulusPoint& tp) {
    const cplx t = tp.value();
    const bool upper = t.imag() >= 0.0;
    const double lo = upper ? 0.0 : -0.5 * kPi;
    const double hi = upper ? 0.5 * kPi : 0.0;

    cplx best = 0.0;
    double best_violation = std::numeric_limits<double>::infinity();
    const cplx root = std::sqrt(t);
    for (const cplx r : {root, -root}) {
        if (r == cplx(-1.0)) continue;
        // (1 + s^2) / (1 - s^2) = r  <=>  s^2 = (r - 1) / (r + 1)
        const cplx s_sq = (r - 1.0) / (r + 1.0);
        for (const cplx s : {std::sqrt(s_sq), -std::sqrt(s_sq)}) {
            double violation = std::max(0.0, std::abs(s) - 1.0);
            if (std::abs(s) > 0.0) {
                const double arg = std::arg(s);
                violation += std::max({0.0, lo - arg, arg - hi});
            }
            if (violation < best_violation) {
                best_violation = violation;
                best = s;
            }
        }
    }
    if (best_violation > 1e-8) throw InternalError("s_from_t: no preimage in the quarter disk");
    return best;
}

LocalTaylorData taylor_AB(const ModulusPoint& t) {
    const cplx s = s_from_t(t);
    const cplx w1 = conformal_map_d1(s);
    if (std::abs(w1) < 1e-14) throw DomainError("taylor_AB: map derivative vanishes at s");
    const cplx w2 = conformal_map_d2(s);
    const cplx A = 1.0 / std::sqrt(w1);
    const cplx B = -w2 * A / (4.0 * w1 * w1);
    return {s, A, B};
}

cplx b_minus_inf_from_AB(const LocalTaylorData& d) {
    const cplx b_hat = std::conj(d.s) / (2.0 * (1.0 + std::norm(d.s)));
    return d.A * d.A * b_hat - d.B / d.A;
}

cplx b_minus_inf_from_AB(const ModulusPoint& t) { return b_minus_inf_from_AB(taylor_AB(t)); }

cplx b_minus_inf_closed(const ModulusPoint& t, const WirtingerSteps& steps) {
    return wirtinger_dt([](cplx u) { return 0.25 * log_inverse_conformal_factor(u); }, t.value(),
                        steps);
}

cplx schiffer_b0(const ModulusPoint& tp, const WirtingerSteps& steps) {
    const cplx t = tp.value();
    const cplx ref = sigma_from_t(tp).value();

    const cplx dlog_eta = wirtinger_dlog(
        [&](cplx u) { return dedekind_eta(PeriodRatio(sigma_near(u, ref))); }, t, steps);
    const cplx dlog_alg = wirtinger_dlog([](cplx u) { return u * (u - 1.0); }, t, steps);
    const cplx dlog_tau = 2.0 * dlog_eta + dlog_alg / 12.0;

    const cplx dlog_im_sigma =
        wirtinger_dt([&](cplx u) { return std::log(sigma_near(u, ref).imag()); }, t, steps);

    return 2.0 * dlog_tau + 2.0 * dlog_im_sigma;
}

cplx det_log_derivative(const ModulusPoint& t, const WirtingerSteps& steps) {
    return wirtinger_dt([](cplx u) { return det_value(ModulusPoint(u)).log_value; }, t.value(),
                        steps);
}

cplx normalized_differential_sq(const ModulusPoint& tp) {
    const cplx t = tp.value();
    const cplx k = elliptic_K_limit(t, CutSide::kAbove);
    return 1.0 / (4.0 * k * k * t * (t - 1.0));
}

}  // namespace conedet
