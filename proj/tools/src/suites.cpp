#include "conedet_tools/suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "conedet/detformula.hpp"
#include "conedet/geometry.hpp"
#include "conedet/moduli.hpp"
#include "conedet/spectral.hpp"

namespace conedet::tools {

namespace {

class Check {
public:
    Check(std::string name, const Tolerances& tol, std::string key)
        : r_{std::move(name), 0, 0, 0.0, key, tol.at(key)} {}

    void add(double residual) {
        ++r_.count;
        if (residual <= r_.tolerance) ++r_.passed;
        // NaN must not hide behind max().
        if (std::isnan(residual) || residual > r_.max_residual) r_.max_residual = residual;
    }
    [[nodiscard]] CheckResult result() const { return r_; }

private:
    CheckResult r_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

double scaled(cplx a, cplx b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

// Distance between two points of the closed fundamental domain, treating
// identified boundary points as equal.
double domain_distance(cplx a, cplx b) {
    return std::min({std::abs(a - b), std::abs(a - (b + 1.0)), std::abs(a - (b - 1.0)),
                     std::abs(a + 1.0 / b)});
}

cplx reduced(cplx sigma) {
    return reduce_to_fundamental_domain(PeriodRatio(sigma)).reduced()->sigma_reduced;
}

std::vector<CheckResult> symmetry_suite(const Tolerances& tol, std::mt19937_64& rng) {
    Check c("F(t) = F(1/t) = F(1-t)", tol, "f_symmetry");
    for (int k = 0; k < 200; ++k) {
        const cplx t = sample_t(rng);
        const double f = F(ModulusPoint(t));
        c.add(std::max(rel(f, F(ModulusPoint(1.0 / t))), rel(f, F(ModulusPoint(1.0 - t)))));
    }
    return {c.result()};
}

std::vector<CheckResult> roundtrip_suite(const Tolerances& tol, std::mt19937_64& rng) {
    Check rt("t -> sigma -> t lands in the orbit of t", tol, "roundtrip");
    Check eq("sigma(t), sigma(1/t), sigma(1-t) reduce to one point", tol, "roundtrip");
    Check cov("covering map branch values reproduce t", tol, "cover_t");
    Check per("covering map is doubly periodic", tol, "periodicity");
    for (int k = 0; k < 50; ++k) {
        const cplx t = sample_t(rng);
        const ModulusPoint tp(t);
        const PeriodRatio s = sigma_from_t(tp);
        const cplx back = t_from_sigma(s).value();
        double best = std::numeric_limits<double>::infinity();
        for (cplx m : g_orbit(tp).members) best = std::min(best, scaled(back, m));
        rt.add(best);
        const cplx r0 = reduced(s.value());
        eq.add(std::max(domain_distance(r0, reduced(sigma_from_t(ModulusPoint(1.0 / t)).value())),
                        domain_distance(r0, reduced(sigma_from_t(ModulusPoint(1.0 - t)).value()))));
    }
    for (int k = 0; k < 10; ++k) {
        const cplx t = sample_t(rng);
        const PeriodRatio s(reduced(sigma_from_t(ModulusPoint(t)).value()));
        const CoveringMap mu(s, ModulusPoint(t));
        cov.add(scaled(mu.recovered_t(), t));
        const cplx z = cplx(0.1 + 0.8 * uniform01(rng), 0.0) + s.value() * (0.1 + 0.8 * uniform01(rng));
        const cplx v = mu(z);
        per.add(std::max(scaled(mu(z + 1.0), v), scaled(mu(z + s.value()), v)));
    }
    return {rt.result(), eq.result(), cov.result(), per.result()};
}

std::vector<CheckResult> variational_suite(const Tolerances& tol, std::mt19937_64& rng) {
    Check var("d/dt log det = (b(0) - b(-inf)) / 2", tol, "variational");
    Check dual("b(-inf): closed form vs Taylor data", tol, "b_dual");
    Check inv("det_value constant on orbits", tol, "orbit_log");
    Check pre("det_prelim - det_value is constant (std)", tol, "prelim_std");
    for (int k = 0; k < 20; ++k) {
        const ModulusPoint t(sample_t(rng));
        const cplx lhs = det_log_derivative(t);
        const cplx rhs = 0.5 * (schiffer_b0(t) - b_minus_inf_closed(t));
        var.add(scaled(lhs, rhs));
    }
    for (int k = 0; k < 30; ++k) {
        const ModulusPoint t(sample_t(rng));
        dual.add(scaled(b_minus_inf_from_AB(t), b_minus_inf_closed(t)));
    }
    for (int k = 0; k < 50; ++k) {
        const ModulusPoint t(sample_t(rng));
        const double d0 = det_value(t).log_value;
        double worst = 0.0;
        for (cplx m : g_orbit(t).members) {
            worst = std::max(worst, std::abs(det_value(ModulusPoint(m)).log_value - d0));
        }
        inv.add(worst);
    }
    std::vector<double> diffs;
    for (int k = 0; k < 50; ++k) {
        const ModulusPoint t(sample_t(rng));
        diffs.push_back(det_prelim(t).log_value - det_value(t).log_value);
    }
    double mean = 0.0;
    for (double d : diffs) mean += d;
    mean /= static_cast<double>(diffs.size());
    double var_sum = 0.0;
    for (double d : diffs) var_sum += (d - mean) * (d - mean);
    pre.add(std::sqrt(var_sum / static_cast<double>(diffs.size() - 1)));
    return {var.result(), dual.result(), inv.result(), pre.result()};
}

std::vector<CheckResult> curvature_suite(const Tolerances& tol, std::mt19937_64& rng) {
    Check curv("Gauss curvature of rho |dw|^2 is 1", tol, "curvature");
    Check push("round metric pushes forward to rho", tol, "pushforward");
    int accepted = 0;
    while (accepted < 100) {
        const cplx w = std::polar(0.05 * std::exp(std::log(200.0) * uniform01(rng)), 2.0 * kPi * uniform01(rng));
        if (std::abs(w - 1.0) < 0.05) continue;
        curv.add(std::abs(gauss_curvature(w, 1e-3) - 1.0));
        ++accepted;
    }
    for (int k = 0; k < 50; ++k) {
        const double r = 0.05 + 0.9 * uniform01(rng);
        const double a = 0.05 + (kPi / 2 - 0.1) * uniform01(rng);
        const cplx z = std::polar(r, a);
        const double lhs = metric_rho(conformal_map(z)) * std::norm(conformal_map_d1(z));
        const double rhs = 4.0 / ((1.0 + r * r) * (1.0 + r * r));
        push.add(rel(lhs, rhs));
    }
    return {curv.result(), push.result()};
}

std::vector<CheckResult> spectral_suite(const Tolerances& tol, const SuiteOptions& opts) {
    const ModulusPoint t(opts.t.value_or(cplx(0.3, 0.0)));
    Check area("metric area is 2 pi (relative)", tol, "area_rel");
    Check zero("constant mode: lambda_0 / lambda_1", tol, "zero_mode");
    Check weyl("Weyl slope within tolerance of 1/2", tol, "weyl_slope");
    Check iso("t and 1/t isospectral (first 15 modes)", tol, "isospectral");
    const SpectrumResult spec = spectrum_for_t(t, opts.grid, opts.modes);
    area.add(std::abs(spec.area - 2.0 * kPi) / (2.0 * kPi));
    zero.add(spec.diagnostics.zero_mode_residual);
    weyl.add(std::abs(weyl_check(spec) - 0.5));
    iso.add(isospectral_orbit_check(t, GroupElement::kInvert, opts.grid, 16));
    return {area.result(), zero.result(), weyl.result(), iso.result()};
}

}  // namespace

Tolerances Tolerances::defaults() {
    Tolerances t;
    t.values_ = {
        {"f_symmetry", 1e-12}, {"orbit_log", 1e-9},    {"roundtrip", 1e-9},
        {"b_dual", 1e-8},      {"variational", 1e-6},  {"prelim_std", 1e-8},
        {"curvature", 1e-6},   {"pushforward", 1e-10}, {"cover_t", 1e-8},
        {"periodicity", 1e-10}, {"area_rel", 1e-2},    {"zero_mode", 1e-8},
        {"weyl_slope", 0.05},  {"isospectral", 1e-2},
    };
    return t;
}

double Tolerances::at(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown tolerance '" + key + "'");
    return it->second;
}

void Tolerances::set(const std::string& key, double value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw std::invalid_argument("unknown tolerance '" + key + "'");
    if (!(value > 0.0) || !std::isfinite(value)) {
        throw std::invalid_argument("tolerance '" + key + "' must be positive");
    }
    it->second = value;
}

const std::vector<std::string>& suite_names() {
    static const std::vector<std::string> names{"symmetry", "variational", "curvature",
                                                "roundtrip", "spectral"};
    return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const Tolerances& tol,
                                   const SuiteOptions& opts) {
    std::mt19937_64 rng(opts.seed);
    if (name == "symmetry") return symmetry_suite(tol, rng);
    if (name == "roundtrip") return roundtrip_suite(tol, rng);
    if (name == "variational") return variational_suite(tol, rng);
    if (name == "curvature") return curvature_suite(tol, rng);
    if (name == "spectral") return spectral_suite(tol, opts);
    throw std::invalid_argument("unknown suite '" + name + "'");
}

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

cplx sample_t(std::mt19937_64& rng) {
    for (;;) {
        const double r = 0.05 * std::exp(std::log(400.0) * uniform01(rng));
        const double a = 2.0 * kPi * uniform01(rng);
        const cplx t = std::polar(r, a);
        const double d = std::abs(t - 1.0);
        if (r > 0.05 && r < 20.0 && d > 0.05 && d < 20.0) return t;
    }
}

}  // namespace conedet::tools
