#include "conedet/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "conedet/errors.hpp"

namespace conedet {

namespace {

double root_sum(cplx w) {
    const cplx r = std::sqrt(w);
    return std::abs(r + 1.0) + std::abs(r - 1.0);
}

// rho without the singular-point guard; used on grids that avoid 0 and 1.
double rho_unchecked(cplx w) {
    const double rs = root_sum(w);
    return 1.0 / (std::abs(w) * std::abs(w - 1.0) * rs * rs);
}

// log |1 + u| without cancellation for small u.
double log_abs_1p(cplx u) { return 0.5 * std::log1p(2.0 * u.real() + std::norm(u)); }

// log rho(w + d) - log rho(w), accurate to a few ulps of O(1) even when
// log rho itself is large.
double log_rho_increment(cplx w, cplx d) {
    // root_sum(w + d) - root_sum(w) with every difference taken in closed form.
    const cplx r0 = std::sqrt(w);
    cplx r1 = std::sqrt(w + d);
    if (std::abs(r1 - r0) > std::abs(r1 + r0)) r1 = -r1;  // root_sum is even in r
    const cplx dr = d / (r1 + r0);
    const double dmod = (2.0 * (std::conj(w) * d).real() + std::norm(d)) / (std::abs(w + d) + std::abs(w));
    const double a0 = std::abs(r0 + 1.0);
    const double b0 = std::abs(r0 - 1.0);
    const double da = (dmod + 2.0 * dr.real()) / (std::abs(r1 + 1.0) + a0);
    const double db = (dmod - 2.0 * dr.real()) / (std::abs(r1 - 1.0) + b0);
    return -(log_abs_1p(d / w) + log_abs_1p(d / (w - 1.0)) + 2.0 * std::log1p((da + db) / (a0 + b0)));
}

template <class Increment>
double richardson_laplacian(Increment&& inc, double h) {
    auto lap = [&](double step) {
        return (inc(cplx(step, 0.0)) + inc(cplx(-step, 0.0)) + inc(cplx(0.0, step)) +
                inc(cplx(0.0, -step))) /
               (step * step);
    };
    return (4.0 * lap(0.5 * h) - lap(h)) / 3.0;
}

}  // namespace

cplx conformal_map(cplx z) {
    const cplx den = 1.0 - z * z;
    if (std::abs(den) == 0.0) throw DomainError("conformal_map: pole at z = +-1");
    const cplx g = (1.0 + z * z) / den;
    return g * g;
}

cplx conformal_map_d1(cplx z) {
    const cplx den = 1.0 - z * z;
    if (std::abs(den) == 0.0) throw DomainError("conformal_map: pole at z = +-1");
    return 8.0 * z * (1.0 + z * z) / (den * den * den);
}

cplx conformal_map_d2(cplx z) {
    const cplx den = 1.0 - z * z;
    if (std::abs(den) == 0.0) throw DomainError("conformal_map: pole at z = +-1");
    const cplx g = (1.0 + z * z) / den;
    const cplx g1 = 4.0 * z / (den * den);
    const cplx g2 = (4.0 + 12.0 * z * z) / (den * den * den);
    return 2.0 * g1 * g1 + 2.0 * g * g2;
}

double metric_rho(cplx w) {
    if (w == cplx(0.0) || w == cplx(1.0)) {
        throw DomainError("metric_rho: conical point (rho = +inf)");
    }
    return rho_unchecked(w);
}

double log_metric_rho(cplx w) {
    if (w == cplx(0.0) || w == cplx(1.0)) {
        throw DomainError("metric_rho: conical point (rho = +inf)");
    }
    const double rs = root_sum(w);
    return -(std::log(std::abs(w)) + std::log(std::abs(w - 1.0)) + 2.0 * std::log(rs));
}

double gauss_curvature(cplx w, double h) {
    if (!(h > 0.0)) throw DomainError("gauss_curvature: step must be positive");
    if (std::abs(w) < 10.0 * h || std::abs(w - 1.0) < 10.0 * h) {
        throw DomainError("gauss_curvature: step too large for the distance to a conical point");
    }
    const double lap = richardson_laplacian([&](cplx d) { return log_rho_increment(w, d); }, h);
    return -lap / (2.0 * metric_rho(w));
}

double gauss_curvature_of(const std::function<double(cplx)>& log_increment, double factor_at_w,
                          double h) {
    return -richardson_laplacian(log_increment, h) / (2.0 * factor_at_w);
}

CoveringMap::CoveringMap(const PeriodRatio& sigma, const ModulusPoint& t)
    : sigma_(sigma), t_(t.value()) {
    const cplx s = sigma.value();
    const std::array<cplx, 3> hp{0.5, 0.5 * s, 0.5 * (1.0 + s)};
    std::array<cplx, 3> pv{};
    for (int k = 0; k < 3; ++k) pv[k] = p_value(hp[k]);

    double best = std::numeric_limits<double>::infinity();
    std::array<int, 3> perm{0, 1, 2};
    do {
        const cplx scale = pv[perm[1]] - pv[perm[0]];
        const cplx rec = (pv[perm[2]] - pv[perm[0]]) / scale;
        const double err = std::abs(rec - t_);
        if (err < best) {
            best = err;
            labeling_ = perm;
            recovered_t_ = rec;
            offset_ = pv[perm[0]];
            scale_ = scale;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    if (!(best <= 1e-8 * std::max(1.0, std::abs(t_)))) {
        std::ostringstream msg;
        msg << "CoveringMap: t = " << t_ << " is not a branch value of the lattice with sigma = " << s
            << " (closest labeling gives " << recovered_t_ << ")";
        throw DomainError(msg.str());
    }
    for (int k = 0; k < 3; ++k) half_periods_[k] = hp[labeling_[k]];
}

CoveringMap::Thetas CoveringMap::thetas(cplx z) const {
    const ThetaCharacteristic c_num(1, 0);
    const ThetaCharacteristic c_den(1, 1);
    return {theta(c_num, z, sigma_), theta(c_den, z, sigma_), theta_dz(c_num, z, sigma_),
            theta_dz(c_den, z, sigma_)};
}

cplx CoveringMap::p_value(cplx z) const {
    const cplx r = theta(ThetaCharacteristic(1, 0), z, sigma_) /
                   theta(ThetaCharacteristic(1, 1), z, sigma_);
    return r * r;
}

cplx CoveringMap::operator()(cplx z) const {
    const Thetas th = thetas(z);
    const cplx r = th.num / th.den;
    return (r * r - offset_) / scale_;
}

cplx CoveringMap::derivative(cplx z) const {
    const Thetas th = thetas(z);
    const cplx r = th.num / th.den;
    const cplx dr = (th.dnum * th.den - th.num * th.dden) / (th.den * th.den);
    return 2.0 * r * dr / scale_;
}

double CoveringMap::conformal_factor(cplx z) const {
    const Thetas th = thetas(z);
    const cplx r = th.num / th.den;
    const cplx p = r * r;
    const cplx dp = 2.0 * r * (th.dnum * th.den - th.num * th.dden) / (th.den * th.den);
    const cplx mu = (p - offset_) / scale_;
    if (std::abs(mu) <= 1.0) {
        return rho_unchecked(mu) * std::norm(dp / scale_);
    }
    // Near the pole: with g = 1/mu, rho(mu)|mu'|^2 = |mu'/mu|^2 |g| / (|1-g| rs(g)^2)
    // where rs(g) = |1 + sqrt g| + |1 - sqrt g|; every factor stays bounded
    // except mu'/mu ~ 1/z, which is cancelled by |g| ~ |z|^2.
    const cplx g = scale_ / (p - offset_);
    const cplx log_deriv = dp / (p - offset_);
    const double rs = root_sum(g);
    return std::norm(log_deriv) * std::abs(g) / (std::abs(1.0 - g) * rs * rs);
}

cplx covering_map_torus(cplx z, const PeriodRatio& sigma, const ModulusPoint& t) {
    return CoveringMap(sigma, t)(z);
}

double ConformalField::area() const {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum * cell_area();
}

ConformalField conformal_factor_on_torus(const PeriodRatio& sigma, const ModulusPoint& t,
                                         std::array<int, 2> grid_shape) {
    if (grid_shape[0] < 2 || grid_shape[1] < 2) {
        throw DomainError("conformal_factor_on_torus: grid must have at least 2 x 2 cells");
    }
    const CoveringMap mu(sigma, t);
    ConformalField field;
    field.sigma = sigma;
    field.t = t.value();
    field.grid_shape = grid_shape;
    field.labeling = mu.labeling();
    const int n1 = grid_shape[0];
    const int n2 = grid_shape[1];
    const cplx s = sigma.value();
    field.values.resize(static_cast<std::size_t>(n1) * n2);
    for (int i = 0; i < n1; ++i) {
        const double p = (i + 0.5) / n1;
        for (int j = 0; j < n2; ++j) {
            const double q = (j + 0.5) / n2;
            field.values[static_cast<std::size_t>(i) * n2 + j] = mu.conformal_factor(p + s * q);
        }
    }

    // Lattice coordinates of the half-periods 1/2, sigma/2, (1+sigma)/2.
    static constexpr double kHalfPeriodPQ[3][2] = {{0.5, 0.0}, {0.0, 0.5}, {0.5, 0.5}};
    const int cone = mu.labeling()[2];
    const double pc = kHalfPeriodPQ[cone][0];
    const double qc = kHalfPeriodPQ[cone][1];
    auto nearest = [](double x, int n) {
        const int k = static_cast<int>(std::lround(x * n - 0.5));
        return ((k % n) + n) % n;
    };
    field.singular_points.push_back({mu.cone_point(), nearest(pc, n1), nearest(qc, n2), 2});
    return field;
}

void write_field(std::ostream& out, const ConformalField& f) {
    const auto old_flags = out.flags();
    const auto old_prec = out.precision();
    out << std::setprecision(17);
    out << "conedet-field 1\n";
    out << "sigma " << f.sigma.value().real() << ' ' << f.sigma.value().imag() << '\n';
    out << "t " << f.t.real() << ' ' << f.t.imag() << '\n';
    out << "shape " << f.grid_shape[0] << ' ' << f.grid_shape[1] << '\n';
    out << "labeling " << f.labeling[0] << ' ' << f.labeling[1] << ' ' << f.labeling[2] << '\n';
    out << "singular " << f.singular_points.size() << '\n';
    for (const auto& sp : f.singular_points) {
        out << sp.z.real() << ' ' << sp.z.imag() << ' ' << sp.grid_i << ' ' << sp.grid_j << ' '
            << sp.vanishing_order << '\n';
    }
    out << "values\n";
    for (int i = 0; i < f.grid_shape[0]; ++i) {
        for (int j = 0; j < f.grid_shape[1]; ++j) {
            if (j) out << ' ';
            out << f.at(i, j);
        }
        out << '\n';
    }
    out.flags(old_flags);
    out.precision(old_prec);
}

ConformalField read_field(std::istream& in) {
    auto expect = [&](const char* key) {
        std::string word;
        if (!(in >> word) || word != key) {
            throw DomainError(std::string("read_field: expected '") + key + "'");
        }
    };
    ConformalField f;
    int version = 0;
    expect("conedet-field");
    in >> version;
    if (version != 1) throw DomainError("read_field: unsupported version");
    double re = 0, im = 0;
    expect("sigma");
    in >> re >> im;
    f.sigma = PeriodRatio(cplx(re, im));
    expect("t");
    in >> re >> im;
    f.t = cplx(re, im);
    expect("shape");
    in >> f.grid_shape[0] >> f.grid_shape[1];
    expect("labeling");
    in >> f.labeling[0] >> f.labeling[1] >> f.labeling[2];
    expect("singular");
    std::size_t count = 0;
    in >> count;
    for (std::size_t k = 0; k < count; ++k) {
        SingularPoint sp{};
        in >> re >> im >> sp.grid_i >> sp.grid_j >> sp.vanishing_order;
        sp.z = cplx(re, im);
        f.singular_points.push_back(sp);
    }
    expect("values");
    if (f.grid_shape[0] <= 0 || f.grid_shape[1] <= 0) throw DomainError("read_field: bad shape");
    f.values.resize(static_cast<std::size_t>(f.grid_shape[0]) * f.grid_shape[1]);
    for (double& v : f.values) {
        if (!(in >> v)) throw DomainError("read_field: truncated value block");
    }
    return f;
}

}  // namespace conedet
