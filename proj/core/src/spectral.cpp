#include "conedet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <boost/math/special_functions/expint.hpp>
#include <unsupported/Eigen/FFT>

#include "conedet/errors.hpp"

namespace conedet {

namespace {

// Heat-trace constant (1/(12 pi)) int K dA + sum over cones of
// (1/12)(2 pi / angle - angle / (2 pi)) for curvature one, area 2 pi and one
// cone of angle 4 pi.
constexpr double kConeMetricHeatConstant = 1.0 / 6.0 - 1.0 / 8.0;

Stencil flat_stencil(const PeriodRatio& sigma, std::array<int, 2> shape) {
    const cplx s = sigma.value();
    const double im2 = s.imag() * s.imag();
    // Inverse metric of |dp + sigma dq|^2.
    const double gpp = std::norm(s) / im2;
    const double gpq = -s.real() / im2;
    const double gqq = 1.0 / im2;
    const double hp = 1.0 / shape[0];
    const double hq = 1.0 / shape[1];

    Stencil c{};
    c[1][1] = 2.0 * gpp / (hp * hp) + 2.0 * gqq / (hq * hq);
    c[0][1] = c[2][1] = -gpp / (hp * hp);
    c[1][0] = c[1][2] = -gqq / (hq * hq);
    // -2 gpq d_p d_q with the 4-corner central difference.
    const double mixed = gpq / (2.0 * hp * hq);
    c[0][0] = c[2][2] = -mixed;
    c[0][2] = c[2][0] = mixed;
    return c;
}

// Solves K x = r on the mean-zero subspace by diagonalizing the periodic
// stencil with 2-D FFTs.
class PeriodicInverse {
public:
    explicit PeriodicInverse(const OperatorPair& op)
        : n1_(op.grid_shape()[0]), n2_(op.grid_shape()[1]),
          inv_symbol_(static_cast<std::size_t>(n1_) * n2_), buf_(inv_symbol_.size()),
          line_in_(std::max(n1_, n2_)), line_out_(std::max(n1_, n2_)) {
        for (int k1 = 0; k1 < n1_; ++k1) {
            for (int k2 = 0; k2 < n2_; ++k2) {
                const double sym = op.symbol(k1, k2);
                inv_symbol_[idx(k1, k2)] = (k1 == 0 && k2 == 0) ? 0.0 : 1.0 / sym;
            }
        }
    }

    void solve(const double* rhs, double* out) {
        for (std::size_t k = 0; k < buf_.size(); ++k) buf_[k] = rhs[k];
        transform(true);
        for (std::size_t k = 0; k < buf_.size(); ++k) buf_[k] *= inv_symbol_[k];
        transform(false);
        for (std::size_t k = 0; k < buf_.size(); ++k) out[k] = buf_[k].real();
    }

private:
    [[nodiscard]] std::size_t idx(int i, int j) const {
        return static_cast<std::size_t>(i) * n2_ + j;
    }

    void transform(bool forward) {
        for (int i = 0; i < n1_; ++i) {
            cplx* row = &buf_[idx(i, 0)];
            std::copy(row, row + n2_, line_in_.begin());
            run(forward, n2_);
            std::copy(line_out_.begin(), line_out_.begin() + n2_, row);
        }
        for (int j = 0; j < n2_; ++j) {
            for (int i = 0; i < n1_; ++i) line_in_[i] = buf_[idx(i, j)];
            run(forward, n1_);
            for (int i = 0; i < n1_; ++i) buf_[idx(i, j)] = line_out_[i];
        }
    }

    void run(bool forward, int n) {
        if (forward) {
            fft_.fwd(line_out_.data(), line_in_.data(), n);
        } else {
            fft_.inv(line_out_.data(), line_in_.data(), n);
        }
    }

    int n1_, n2_;
    std::vector<double> inv_symbol_;
    std::vector<cplx> buf_;
    std::vector<cplx> line_in_, line_out_;
    Eigen::FFT<double> fft_;
};

// y -> (I - e e^T) W^{1/2} K^+ W^{1/2} (I - e e^T) y, whose nonzero
// eigenvalues are 1 / lambda for the nonzero eigenvalues lambda of K psi = lambda W psi.
class InverseOperator {
public:
    explicit InverseOperator(const OperatorPair& op) : solver_(op) {
        const auto n = static_cast<Eigen::Index>(op.size());
        sqrt_w_.resize(n);
        for (Eigen::Index k = 0; k < n; ++k) sqrt_w_[k] = std::sqrt(op.weight()[k]);
        e_ = sqrt_w_.normalized();
        tmp_.resize(n);
        out_.resize(n);
    }

    [[nodiscard]] const Eigen::VectorXd& null_direction() const { return e_; }
    [[nodiscard]] const Eigen::VectorXd& sqrt_weight() const { return sqrt_w_; }

    void apply(const Eigen::MatrixXd& in, Eigen::MatrixXd& result) {
        result.resize(in.rows(), in.cols());
        for (Eigen::Index c = 0; c < in.cols(); ++c) {
            tmp_ = in.col(c);
            tmp_ -= e_ * e_.dot(tmp_);
            tmp_ = tmp_.cwiseProduct(sqrt_w_);
            solver_.solve(tmp_.data(), out_.data());
            out_ = out_.cwiseProduct(sqrt_w_);
            out_ -= e_ * e_.dot(out_);
            result.col(c) = out_;
        }
    }

private:
    PeriodicInverse solver_;
    Eigen::VectorXd sqrt_w_, e_, tmp_, out_;
};

void project_out(Eigen::MatrixXd& z, const Eigen::VectorXd& e) {
    const Eigen::RowVectorXd coeff = e.transpose() * z;
    z.noalias() -= e * coeff;
}

// Thin orthonormal factor and R of a tall matrix.
void thin_qr(const Eigen::MatrixXd& z, Eigen::MatrixXd& q, Eigen::MatrixXd& r) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(z);
    const Eigen::Index b = z.cols();
    q = qr.householderQ() * Eigen::MatrixXd::Identity(z.rows(), b);
    r = qr.matrixQR().topRows(b).triangularView<Eigen::Upper>();
}

}  // namespace

OperatorPair::OperatorPair(const PeriodRatio& sigma, std::array<int, 2> grid_shape,
                           std::vector<double> weight, double heat_constant, std::optional<cplx> t)
    : sigma_(sigma), t_(t), shape_(grid_shape), weight_(std::move(weight)),
      heat_constant_(heat_constant) {
    if (shape_[0] < 32 || shape_[1] < 32) {
        throw DomainError("assemble: grid must be at least 32 x 32");
    }
    if (weight_.size() != static_cast<std::size_t>(shape_[0]) * shape_[1]) {
        throw DomainError("assemble: weight size does not match the grid");
    }
    for (double w : weight_) {
        if (!(w > 0.0) || !std::isfinite(w)) {
            throw DomainError("assemble: weights must be finite and positive at sample points");
        }
    }
    stencil_ = flat_stencil(sigma_, shape_);
    for (int a = 0; a < 3; ++a) {
        for (int b = 0; b < 3; ++b) {
            if (stencil_[a][b] != stencil_[2 - a][2 - b]) {
                throw InternalError("assemble: stiffness stencil is not symmetric");
            }
        }
    }
}

double OperatorPair::cell_area() const {
    return sigma_.imag() / (static_cast<double>(shape_[0]) * shape_[1]);
}

double OperatorPair::area() const {
    return std::accumulate(weight_.begin(), weight_.end(), 0.0) * cell_area();
}

void OperatorPair::apply_stiffness(std::span<const double> x, std::span<double> y) const {
    const int n1 = shape_[0];
    const int n2 = shape_[1];
    if (x.size() != size() || y.size() != size()) {
        throw DomainError("apply_stiffness: vector size mismatch");
    }
    for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
            double acc = 0.0;
            for (int dp = -1; dp <= 1; ++dp) {
                const int ii = (i + dp + n1) % n1;
                for (int dq = -1; dq <= 1; ++dq) {
                    const int jj = (j + dq + n2) % n2;
                    acc += stencil_[dp + 1][dq + 1] * x[static_cast<std::size_t>(ii) * n2 + jj];
                }
            }
            y[static_cast<std::size_t>(i) * n2 + j] = acc;
        }
    }
}

double OperatorPair::symbol(int k1, int k2) const {
    const double th1 = 2.0 * kPi * k1 / shape_[0];
    const double th2 = 2.0 * kPi * k2 / shape_[1];
    double acc = 0.0;
    for (int dp = -1; dp <= 1; ++dp) {
        for (int dq = -1; dq <= 1; ++dq) {
            acc += stencil_[dp + 1][dq + 1] * std::cos(th1 * dp + th2 * dq);
        }
    }
    return acc;
}

OperatorPair assemble(const PeriodRatio& sigma, const ModulusPoint& t,
                      std::array<int, 2> grid_shape) {
    if (grid_shape[0] < 32 || grid_shape[1] < 32) {
        throw DomainError("assemble: grid must be at least 32 x 32");
    }
    ConformalField field = conformal_factor_on_torus(sigma, t, grid_shape);
    return OperatorPair(sigma, grid_shape, std::move(field.values), kConeMetricHeatConstant,
                        t.value());
}

OperatorPair assemble_flat(const PeriodRatio& sigma, std::array<int, 2> grid_shape) {
    if (grid_shape[0] < 32 || grid_shape[1] < 32) {
        throw DomainError("assemble: grid must be at least 32 x 32");
    }
    std::vector<double> w(static_cast<std::size_t>(grid_shape[0]) * grid_shape[1],
                          1.0 / sigma.imag());
    return OperatorPair(sigma, grid_shape, std::move(w), 0.0);
}

SpectrumResult lowest_eigenvalues(const OperatorPair& op, int count, const EigenSolverOptions& opts) {
    if (count < 10) throw DomainError("lowest_eigenvalues: need at least 10 eigenvalues");
    if (static_cast<std::size_t>(count) * 10 > op.size()) {
        throw DomainError("lowest_eigenvalues: grid too coarse for the requested number of modes");
    }
    const auto n = static_cast<Eigen::Index>(op.size());
    const int b = opts.block_size;
    const int wanted = count - 1;  // nonzero modes

    InverseOperator inv(op);
    const Eigen::VectorXd& e = inv.null_direction();

    std::mt19937_64 rng(opts.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd start(n, b);
    for (Eigen::Index c = 0; c < b; ++c) {
        for (Eigen::Index r = 0; r < n; ++r) start(r, c) = normal(rng);
    }
    project_out(start, e);

    std::vector<Eigen::MatrixXd> basis;
    std::vector<Eigen::MatrixXd> alphas;
    std::vector<Eigen::MatrixXd> betas;
    Eigen::MatrixXd q, r, z;
    thin_qr(start, q, r);
    basis.push_back(q);

    Eigen::VectorXd ritz_values;
    Eigen::MatrixXd ritz_vectors;
    bool converged = false;
    while (!converged) {
        const std::size_t j = basis.size() - 1;
        if (static_cast<int>((j + 1) * b) > opts.max_krylov_dimension) {
            throw ConvergenceError("lowest_eigenvalues: Krylov dimension limit reached");
        }
        inv.apply(basis[j], z);
        Eigen::MatrixXd a = basis[j].transpose() * z;
        a = 0.5 * (a + a.transpose()).eval();
        z.noalias() -= basis[j] * a;
        if (j > 0) z.noalias() -= basis[j - 1] * betas[j - 1].transpose();
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& v : basis) {
                const Eigen::MatrixXd coeff = v.transpose() * z;
                z.noalias() -= v * coeff;
            }
            project_out(z, e);
        }
        thin_qr(z, q, r);
        alphas.push_back(a);
        betas.push_back(r);
        basis.push_back(q);

        const Eigen::Index m = static_cast<Eigen::Index>(alphas.size()) * b;
        if (m < wanted + 2 * b) continue;
        if (alphas.size() % 4 != 0) continue;

        Eigen::MatrixXd tmat = Eigen::MatrixXd::Zero(m, m);
        for (std::size_t k = 0; k < alphas.size(); ++k) {
            const Eigen::Index o = static_cast<Eigen::Index>(k) * b;
            tmat.block(o, o, b, b) = alphas[k];
            if (k + 1 < alphas.size()) {
                tmat.block(o + b, o, b, b) = betas[k];
                tmat.block(o, o + b, b, b) = betas[k].transpose();
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tmat);
        ritz_values = es.eigenvalues().reverse();
        ritz_vectors = es.eigenvectors().rowwise().reverse();
        converged = true;
        for (int k = 0; k < wanted; ++k) {
            const double theta = ritz_values[k];
            const double res = (betas.back() * ritz_vectors.col(k).tail(b)).norm();
            if (!(theta > 0.0) || res > opts.tolerance * theta) {
                converged = false;
                break;
            }
        }
    }

    SpectrumResult result;
    result.grid_shape = op.grid_shape();
    result.sigma = op.sigma();
    result.t = op.t();
    result.area = op.area();
    result.heat_constant = op.heat_constant();
    const auto m = static_cast<Eigen::Index>(alphas.size()) * b;
    result.diagnostics.krylov_dimension = static_cast<int>(m);

    // Constant mode: exact eigenvector with Rayleigh quotient 1^T K 1 / 1^T W 1.
    std::vector<double> ones(op.size(), 1.0), k_ones(op.size());
    op.apply_stiffness(ones, k_ones);
    const double lambda0 = std::abs(std::accumulate(k_ones.begin(), k_ones.end(), 0.0)) /
                           std::accumulate(op.weight().begin(), op.weight().end(), 0.0);

    // Eigenvectors psi = W^{-1/2} V s in the original variables, for residuals.
    Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, wanted);
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        y.noalias() += basis[k] *
                       ritz_vectors.block(static_cast<Eigen::Index>(k) * b, 0, b, wanted);
    }
    std::vector<double> lambdas(wanted);
    double max_res = 0.0;
    std::vector<double> psi(op.size()), kpsi(op.size());
    const Eigen::VectorXd& sw = inv.sqrt_weight();
    for (int k = 0; k < wanted; ++k) {
        const double lambda = 1.0 / ritz_values[k];
        lambdas[k] = lambda;
        for (Eigen::Index r2 = 0; r2 < n; ++r2) psi[r2] = y(r2, k) / sw[r2];
        op.apply_stiffness(psi, kpsi);
        double num = 0.0, den = 0.0;
        for (Eigen::Index r2 = 0; r2 < n; ++r2) {
            const double wpsi = op.weight()[r2] * psi[r2];
            num += (kpsi[r2] - lambda * wpsi) * (kpsi[r2] - lambda * wpsi);
            den += wpsi * wpsi;
        }
        max_res = std::max(max_res, std::sqrt(num / den) / lambda);
    }
    std::sort(lambdas.begin(), lambdas.end());
    result.eigenvalues.reserve(count);
    result.eigenvalues.push_back(lambda0);
    result.eigenvalues.insert(result.eigenvalues.end(), lambdas.begin(), lambdas.end());
    result.diagnostics.zero_mode_residual = lambda0 / lambdas.front();
    result.diagnostics.max_eigen_residual = max_res;

    // Symmetry of the assembled stiffness on fixed random vectors.
    std::vector<double> x1(op.size()), x2(op.size()), kx1(op.size()), kx2(op.size());
    for (std::size_t k = 0; k < op.size(); ++k) {
        x1[k] = normal(rng);
        x2[k] = normal(rng);
    }
    op.apply_stiffness(x1, kx1);
    op.apply_stiffness(x2, kx2);
    const double lhs = std::inner_product(x1.begin(), x1.end(), kx2.begin(), 0.0);
    const double rhs = std::inner_product(kx1.begin(), kx1.end(), x2.begin(), 0.0);
    const double nx1 = std::sqrt(std::inner_product(x1.begin(), x1.end(), x1.begin(), 0.0));
    const double nkx2 = std::sqrt(std::inner_product(kx2.begin(), kx2.end(), kx2.begin(), 0.0));
    result.diagnostics.symmetry_residual = std::abs(lhs - rhs) / (nx1 * nkx2);
    return result;
}

SpectrumResult spectrum_for_t(const ModulusPoint& t, std::array<int, 2> grid_shape, int count,
                              LatticeChoice lattice, const EigenSolverOptions& opts) {
    PeriodRatio sigma = sigma_from_t(t);
    if (lattice == LatticeChoice::kReduced) {
        sigma = PeriodRatio(reduce_to_fundamental_domain(sigma).reduced()->sigma_reduced);
    }
    return lowest_eigenvalues(assemble(sigma, t, grid_shape), count, opts);
}

double weyl_check(const SpectrumResult& spec) {
    const int m = static_cast<int>(spec.eigenvalues.size());
    if (m < 30) throw DomainError("weyl_check: need at least 30 eigenvalues");
    const int first = std::max(1, (m - 1) / 4);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (int k = first; k < m; ++k) {
        const double x = spec.eigenvalues[k];
        const double yk = k - 0.5;
        sx += x;
        sy += yk;
        sxx += x * x;
        sxy += x * yk;
        ++cnt;
    }
    const double den = cnt * sxx - sx * sx;
    if (!(den > 0.0)) throw DomainError("weyl_check: degenerate eigenvalue range");
    return (cnt * sxy - sx * sy) / den;
}

cplx apply(GroupElement g, cplx t) {
    switch (g) {
        case GroupElement::kIdentity: return t;
        case GroupElement::kInvert: return 1.0 / t;
        case GroupElement::kReflect: return 1.0 - t;
        case GroupElement::kInvertReflect: return 1.0 / (1.0 - t);
        case GroupElement::kRatio: return t / (t - 1.0);
        case GroupElement::kRatioInverse: return (t - 1.0) / t;
    }
    return t;
}

double isospectral_orbit_check(const ModulusPoint& t, GroupElement g,
                               std::array<int, 2> grid_shape, int count,
                               const EigenSolverOptions& opts) {
    const SpectrumResult a = spectrum_for_t(t, grid_shape, count, LatticeChoice::kLegendre, opts);
    if (g == GroupElement::kIdentity) return 0.0 * a.eigenvalues.front();
    const ModulusPoint gt(apply(g, t.value()));
    const SpectrumResult b = spectrum_for_t(gt, grid_shape, count, LatticeChoice::kLegendre, opts);
    double worst = 0.0;
    for (int k = 1; k < count; ++k) {
        worst = std::max(worst, std::abs(a.eigenvalues[k] - b.eigenvalues[k]) / a.eigenvalues[k]);
    }
    return worst;
}

DetValue zeta_det_estimate(const SpectrumResult& spec, const ZetaOptions& opts) {
    const int m = static_cast<int>(spec.eigenvalues.size());
    if (m < 50) throw DomainError("zeta_det_estimate: need at least 50 eigenvalues");
    const double lam_max = spec.eigenvalues.back();
    const double s = opts.split_time > 0.0 ? opts.split_time : 8.0 / lam_max;
    const double weyl = spec.area / (4.0 * kPi);
    const double c = spec.heat_constant - 1.0;
    constexpr double kEulerGamma = 0.57721566490153286061;

    double sum_e1 = 0.0;
    for (int k = 1; k < m; ++k) sum_e1 += boost::math::expint(1, spec.eigenvalues[k] * s);

    const double slope = weyl_check(spec);
    if (!(slope > 0.0)) throw DomainError("zeta_det_estimate: Weyl tail fit failed");
    const double cutoff = lam_max + 0.5 / slope;
    // slope * int_cutoff^inf E1(lambda s) d lambda
    const double x = cutoff * s;
    const double tail = slope / s * (std::exp(-x) - x * boost::math::expint(1, x));

    const double zeta_prime0 = -weyl / s + c * (kEulerGamma + std::log(s)) + sum_e1 + tail;
    return {-zeta_prime0, true};
}

}  // namespace conedet
