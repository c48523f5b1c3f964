#pragma once

// Wirtinger derivative d/dt = (d/dx - i d/dy) / 2 by central differences
// with one Richardson step. Works for real-valued (non-holomorphic)
// functions of t and, through the ratio form, for log-derivatives of
// complex functions with a local branch ambiguity.

#include <complex>
#include <utility>

namespace conedet {

struct WirtingerSteps {
    double coarse = 1e-4;
    double fine = 1e-5;
};

namespace detail {

template <class Diff>
std::complex<double> richardson(Diff&& diff, const WirtingerSteps& steps) {
    const double h1 = steps.coarse;
    const double h2 = steps.fine;
    const std::complex<double> d1 = diff(h1);
    const std::complex<double> d2 = diff(h2);
    return (h1 * h1 * d2 - h2 * h2 * d1) / (h1 * h1 - h2 * h2);
}

}  // namespace detail

/// d/dt f(t) for real-valued f.
template <class F>
std::complex<double> wirtinger_dt(F&& f, std::complex<double> t, const WirtingerSteps& steps = {}) {
    const std::complex<double> i(0.0, 1.0);
    auto diff = [&](double h) {
        const double fx = (f(t + h) - f(t - h)) / (2.0 * h);
        const double fy = (f(t + i * h) - f(t - i * h)) / (2.0 * h);
        return 0.5 * std::complex<double>(fx, -fy);
    };
    return detail::richardson(diff, steps);
}

/// d/dt log g(t) for complex-valued g, via principal logs of ratios
/// g(t + dh) / g(t - dh); g only has to be continuous across the stencil.
template <class G>
std::complex<double> wirtinger_dlog(G&& g, std::complex<double> t,
                                    const WirtingerSteps& steps = {}) {
    const std::complex<double> i(0.0, 1.0);
    auto diff = [&](double h) {
        const std::complex<double> dx = std::log(g(t + h) / g(t - h)) / (2.0 * h);
        const std::complex<double> dy = std::log(g(t + i * h) / g(t - i * h)) / (2.0 * h);
        return 0.5 * (dx - i * dy);
    };
    return detail::richardson(diff, steps);
}

}  // namespace conedet
