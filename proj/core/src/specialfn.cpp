#include "conedet/specialfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "conedet/errors.hpp"

namespace conedet {

namespace {

constexpr cplx kI{0.0, 1.0};

// Sum over n of c(n) * exp(i pi nu^2 sigma + 2 pi i nu (z + b/2)), nu = n + a/2.
// `with_derivative` multiplies each term by 2 pi i nu.
cplx theta_series(ThetaCharacteristic ch, cplx z, const PeriodRatio& sigma,
                  const SeriesOptions& opts, bool with_derivative) {
    const cplx s = sigma.value();
    const double half_a = 0.5 * ch.a();
    const cplx shift = z + 0.5 * ch.b();
    const double im_s = s.imag();
    const double im_z = z.imag();

    auto term = [&](long n) {
        const double nu = static_cast<double>(n) + half_a;
        cplx v = std::exp(kI * kPi * nu * nu * s + 2.0 * kI * kPi * nu * shift);
        if (with_derivative) v *= 2.0 * kI * kPi * nu;
        return v;
    };
    // Modulus of exp(...) without the derivative prefactor; the ratio of
    // consecutive moduli in direction dir is exp(-pi im_s (2 nu dir + 1) - 2 pi dir im_z).
    auto log_mod = [&](double nu) { return -kPi * im_s * nu * nu - 2.0 * kPi * nu * im_z; };

    cplx sum = 0.0;
    double largest = 0.0;
    bool up_done = false;
    bool down_done = false;
    // n = k going up, n = -k - 1 going down; together they cover Z once.
    for (long k = 0; k <= opts.max_terms; ++k) {
        if (!up_done) {
            const cplx v = term(k);
            sum += v;
            largest = std::max(largest, std::abs(v));
        }
        if (!down_done) {
            const cplx v = term(-k - 1);
            sum += v;
            largest = std::max(largest, std::abs(v));
        }
        const double scale = opts.tail_tolerance * std::max(std::abs(sum), largest);
        // Tail in one direction starting at next nu: geometric bound valid
        // once the consecutive ratio is < 1, which is monotone from there on.
        auto tail_ok = [&](double nu_next, double dir) {
            const double ratio =
                std::exp(-kPi * im_s * (2.0 * nu_next * dir + 1.0) - 2.0 * kPi * dir * im_z);
            if (ratio >= 1.0) return false;
            const double head = std::exp(log_mod(nu_next));
            // sum_j |prefactor(nu_next + j dir)| head ratio^j
            const double bound =
                with_derivative
                    ? 2.0 * kPi * head *
                          (std::abs(nu_next) / (1.0 - ratio) + ratio / ((1.0 - ratio) * (1.0 - ratio)))
                    : head / (1.0 - ratio);
            return bound < scale;
        };
        if (!up_done) up_done = tail_ok(static_cast<double>(k + 1) + half_a, 1.0);
        if (!down_done) down_done = tail_ok(static_cast<double>(-k - 2) + half_a, -1.0);
        if (up_done && down_done) return sum;
    }
    throw ConvergenceError("theta: series needs more than " + std::to_string(opts.max_terms) +
                           " terms (Im sigma = " + std::to_string(im_s) + ")");
}

}  // namespace

cplx Unimodular::apply(cplx sigma) const {
    return (static_cast<double>(a) * sigma + static_cast<double>(b)) /
           (static_cast<double>(c) * sigma + static_cast<double>(d));
}

Unimodular Unimodular::operator*(const Unimodular& r) const {
    return {a * r.a + b * r.c, a * r.b + b * r.d, c * r.a + d * r.c, c * r.b + d * r.d};
}

PeriodRatio::PeriodRatio(cplx sigma) : sigma_(sigma) {
    if (!std::isfinite(sigma.real()) || !std::isfinite(sigma.imag()) || !(sigma.imag() > 0.0)) {
        throw DomainError("period ratio must lie in the upper half-plane");
    }
}

PeriodRatio::PeriodRatio(cplx sigma, Reduction reduced) : PeriodRatio(sigma) {
    if (reduced.matrix.det() != 1) throw InternalError("reduction matrix must have determinant 1");
    reduced_ = reduced;
}

ThetaCharacteristic::ThetaCharacteristic(int a, int b) : a_(a), b_(b) {
    if ((a != 0 && a != 1) || (b != 0 && b != 1)) {
        throw DomainError("theta characteristic entries must be 0 or 1");
    }
}

// Nullwerte are pulled into the fundamental domain first:
//   theta[0,b](sigma + 1) = theta[0,b+1](sigma), theta[1,b](sigma + 1) = exp(i pi / 4) theta[1,b](sigma),
//   theta[a,b](-1/sigma) = sqrt(-i sigma) theta[b,a](sigma).
// Near the real axis the direct sum cancels badly, the reduced one does not.
cplx theta(ThetaCharacteristic ch, cplx z, const PeriodRatio& sigma, const SeriesOptions& opts) {
    if (z != cplx(0.0)) return theta_series(ch, z, sigma, opts, false);
    int a = ch.a();
    int b = ch.b();
    if (a == 1 && b == 1) return 0.0;
    cplx s = sigma.value();
    cplx factor = 1.0;
    for (int iter = 0; iter < 10000; ++iter) {
        const double n = std::round(s.real());
        if (n != 0.0) {
            if (a == 0) {
                b = (b + static_cast<int>(std::fmod(std::abs(n), 2.0))) % 2;
            } else {
                factor *= std::exp(kI * kPi * n / 4.0);
            }
            s -= n;
        }
        if (a == 1 && b == 1) return 0.0;
        if (std::norm(s) >= 1.0) break;
        // theta[a,b](s) = theta[a,b](-1/s') with s' = -1/s
        const cplx sp = -1.0 / s;
        factor *= std::sqrt(-kI * sp);
        std::swap(a, b);
        s = sp;
    }
    return factor * theta_series(ThetaCharacteristic(a, b), 0.0, PeriodRatio(s), opts, false);
}

cplx theta_dz(ThetaCharacteristic ch, cplx z, const PeriodRatio& sigma,
              const SeriesOptions& opts) {
    return theta_series(ch, z, sigma, opts, true);
}

cplx log_dedekind_eta(const PeriodRatio& sigma) {
    cplx z = sigma.value();
    cplx acc = 0.0;
    for (int iter = 0; iter < 10000; ++iter) {
        const double n = std::round(z.real());
        if (n != 0.0) {
            // eta(z + n) = exp(i pi n / 12) eta(z)
            acc += kI * kPi * n / 12.0;
            z -= n;
        }
        if (std::norm(z) >= 1.0) break;
        // eta(z) = sqrt(i / z) eta(-1 / z); i / z has positive real part.
        acc += 0.5 * std::log(kI / z);
        z = -1.0 / z;
    }
    const cplx q = std::exp(2.0 * kI * kPi * z);
    cplx log_prod = 0.0;
    cplx qn = q;
    for (int n = 1; n < 200; ++n) {
        log_prod += std::log(1.0 - qn);
        if (std::abs(qn) < 1e-18) break;
        qn *= q;
    }
    return acc + kI * kPi * z / 12.0 + log_prod;
}

cplx dedekind_eta(const PeriodRatio& sigma) { return std::exp(log_dedekind_eta(sigma)); }

namespace {

cplx agm_K(cplx kprime, const AgmOptions& opts) {
    cplx a = 1.0;
    cplx b = kprime;
    for (int i = 0; i < opts.max_iterations; ++i) {
        if (std::abs(a - b) <= opts.tolerance * std::abs(a)) return kPi / (2.0 * a);
        const cplx an = 0.5 * (a + b);
        cplx bn = std::sqrt(a * b);
        // right choice: the root closer to the new arithmetic mean
        if (std::abs(an - bn) > std::abs(an + bn)) bn = -bn;
        a = an;
        b = bn;
    }
    throw ConvergenceError("elliptic_K: AGM did not converge");
}

bool on_cut(cplx m) { return m.imag() == 0.0 && m.real() >= 1.0; }

}  // namespace

cplx elliptic_K(cplx m, const AgmOptions& opts) {
    if (!std::isfinite(m.real()) || !std::isfinite(m.imag())) {
        throw DomainError("elliptic_K: non-finite parameter");
    }
    if (on_cut(m)) throw DomainError("elliptic_K: parameter on the branch cut [1, inf)");
    return agm_K(std::sqrt(1.0 - m), opts);
}

cplx elliptic_K_limit(cplx m, CutSide side, const AgmOptions& opts) {
    if (!on_cut(m)) return elliptic_K(m, opts);
    if (m.real() == 1.0) throw DomainError("elliptic_K: logarithmic singularity at m = 1");
    // 1 - (m +/- i0) = -(m - 1) -/+ i0
    const double r = std::sqrt(m.real() - 1.0);
    const cplx kprime = side == CutSide::kAbove ? cplx(0.0, -r) : cplx(0.0, r);
    return agm_K(kprime, opts);
}

PeriodRatio reduce_to_fundamental_domain(const PeriodRatio& sigma) {
    cplx z = sigma.value();
    Unimodular g;  // accumulated map, z = g(sigma)
    for (int iter = 0; iter < 100000; ++iter) {
        const double n = std::abs(z.real()) > 0.5 ? std::round(z.real()) : 0.0;
        if (n != 0.0) {
            z -= n;
            const auto shift = static_cast<long>(n);
            g = Unimodular{1, -shift, 0, 1} * g;
        }
        // On the unit circle S maps the domain boundary to itself; stopping
        // there (up to rounding) avoids cycling between z and -1/z.
        if (std::norm(z) >= 1.0 - 1e-14) {
            return PeriodRatio(sigma.value(), {z, g});
        }
        z = -1.0 / z;
        g = Unimodular{0, -1, 1, 0} * g;
    }
    throw ConvergenceError("reduce_to_fundamental_domain: no convergence");
}

cplx nearest_equivalent(cplx sigma, cplx reference) {
    const PeriodRatio rs = reduce_to_fundamental_domain(PeriodRatio(sigma));
    const PeriodRatio rr = reduce_to_fundamental_domain(PeriodRatio(reference));
    const Unimodular to_ref = rr.reduced()->matrix.inverse();
    const Unimodular from_sigma = rs.reduced()->matrix;
    // Reduced points that are close may still differ by a boundary
    // identification of the fundamental domain.
    static const Unimodular kBoundary[] = {
        {1, 0, 0, 1}, {1, 1, 0, 1}, {1, -1, 0, 1}, {0, -1, 1, 0},
        {1, -1, 1, 0}, {0, -1, 1, 1}, {1, 1, -1, 0}, {0, 1, -1, 1},
    };
    cplx best = sigma;
    double best_dist = std::abs(sigma - reference);
    for (const auto& h : kBoundary) {
        const cplx cand = (to_ref * h * from_sigma).apply(sigma);
        const double dist = std::abs(cand - reference);
        if (dist < best_dist) {
            best = cand;
            best_dist = dist;
        }
    }
    return best;
}

}  // namespace conedet
