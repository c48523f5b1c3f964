#pragma once

// Finite-difference spectrum of the Laplacian of exp(2 phi) |dz|^2 on the
// torus C / (Z + sigma Z). With z = p + sigma q the problem
//     -Delta_flat psi = lambda exp(2 phi) psi
// becomes K psi = lambda W psi, where K is the constant-coefficient 9-point
// stencil of the flat metric in (p, q) and W = diag(exp(2 phi)). The
// quadratic form of K is the plain Dirichlet form, so the degenerate weight
// at the cone point needs no special treatment.

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "conedet/detformula.hpp"
#include "conedet/geometry.hpp"
#include "conedet/moduli.hpp"
#include "conedet/specialfn.hpp"

namespace conedet {

/// Coefficients c[dp + 1][dq + 1] of (K psi)(i, j) = sum c[dp][dq] psi(i + dp, j + dq).
using Stencil = std::array<std::array<double, 3>, 3>;

class OperatorPair {
public:
    OperatorPair(const PeriodRatio& sigma, std::array<int, 2> grid_shape, std::vector<double> weight,
                 double heat_constant, std::optional<cplx> t = std::nullopt);

    [[nodiscard]] const PeriodRatio& sigma() const { return sigma_; }
    [[nodiscard]] const std::optional<cplx>& t() const { return t_; }
    [[nodiscard]] std::array<int, 2> grid_shape() const { return shape_; }
    [[nodiscard]] std::size_t size() const { return weight_.size(); }
    [[nodiscard]] const Stencil& stencil() const { return stencil_; }
    [[nodiscard]] const std::vector<double>& weight() const { return weight_; }
    [[nodiscard]] double cell_area() const;
    /// sum of weight * cell area.
    [[nodiscard]] double area() const;
    /// Constant term of the small-time heat trace expansion (zero mode included).
    [[nodiscard]] double heat_constant() const { return heat_constant_; }

    /// y = K x via the stencil.
    void apply_stiffness(std::span<const double> x, std::span<double> y) const;
    /// Fourier symbol of K at integer frequencies (k1, k2).
    [[nodiscard]] double symbol(int k1, int k2) const;

private:
    PeriodRatio sigma_;
    std::optional<cplx> t_;
    std::array<int, 2> shape_;
    Stencil stencil_{};
    std::vector<double> weight_;
    double heat_constant_;
};

/// Discretization of the pulled-back curvature-one metric for (sigma, t);
/// t must be a branch value of the lattice (see CoveringMap).
OperatorPair assemble(const PeriodRatio& sigma, const ModulusPoint& t,
                      std::array<int, 2> grid_shape);

/// Flat metric of unit area, |dz|^2 / Im sigma.
OperatorPair assemble_flat(const PeriodRatio& sigma, std::array<int, 2> grid_shape);

struct SpectrumDiagnostics {
    /// lambda_0 / lambda_1 for the constant mode.
    double zero_mode_residual = 0.0;
    /// |<x, K y> - <K x, y>| / (|x| |K y|) for fixed random x, y.
    double symmetry_residual = 0.0;
    /// max_k |K psi_k - lambda_k W psi_k| / (lambda_k |W psi_k|).
    double max_eigen_residual = 0.0;
    int krylov_dimension = 0;
};

struct SpectrumResult {
    /// Ascending; eigenvalues[0] is the constant mode.
    std::vector<double> eigenvalues;
    std::array<int, 2> grid_shape{};
    PeriodRatio sigma{cplx(0.0, 1.0)};
    std::optional<cplx> t;
    double area = 0.0;
    double heat_constant = 0.0;
    SpectrumDiagnostics diagnostics;
};

struct EigenSolverOptions {
    /// Relative residual of the shift-inverted problem.
    double tolerance = 1e-9;
    int block_size = 8;
    int max_krylov_dimension = 1600;
    std::uint64_t seed = 0x5eed5eedULL;
};

/// First `count` eigenvalues (constant mode included) of K psi = lambda W psi.
/// Block Lanczos with full reorthogonalization on the inverse operator,
/// whose action uses an FFT solve with K on the mean-zero subspace.
/// Requires count >= 10 and count <= size / 10.
SpectrumResult lowest_eigenvalues(const OperatorPair& op, int count,
                                  const EigenSolverOptions& opts = {});

enum class LatticeChoice {
    /// Period ratio reduced to the SL(2,Z) fundamental domain.
    kReduced,
    /// Period ratio exactly as returned by sigma_from_t.
    kLegendre,
};

SpectrumResult spectrum_for_t(const ModulusPoint& t, std::array<int, 2> grid_shape, int count,
                              LatticeChoice lattice = LatticeChoice::kReduced,
                              const EigenSolverOptions& opts = {});

/// Least-squares slope of the counting function over the upper three
/// quarters of the nonzero eigenvalues; tends to area / (4 pi).
double weyl_check(const SpectrumResult& spec);

/// Elements of the anharmonic group.
enum class GroupElement {
    kIdentity,
    kInvert,          // 1/t
    kReflect,         // 1 - t
    kInvertReflect,   // 1/(1 - t)
    kRatio,           // t/(t - 1)
    kRatioInverse,    // (t - 1)/t
};

cplx apply(GroupElement g, cplx t);

/// max over modes 1..count-1 of |lambda(t) - lambda(g t)| / lambda(t), with
/// each spectrum built on its own Legendre period lattice.
double isospectral_orbit_check(const ModulusPoint& t, GroupElement g,
                               std::array<int, 2> grid_shape, int count,
                               const EigenSolverOptions& opts = {});

struct ZetaOptions {
    /// Split time of the heat-trace Mellin integral; 0 picks 8 / lambda_max.
    double split_time = 0.0;
};

/// Coarse estimate of log det' = -zeta'(0). The Mellin integral of the heat
/// trace is split at time s: above s the computed eigenvalues are summed
/// exactly (sum of E1(lambda s)), with the modes beyond the computed range
/// completed by the fitted Weyl slope; below s the two-term small-time
/// expansion area/(4 pi t) + (heat_constant - 1) is used.
/// Accurate to a few hundredths in log units; requires count >= 50.
DetValue zeta_det_estimate(const SpectrumResult& spec, const ZetaOptions& opts = {});

nlohmann::json to_json(const SpectrumResult& spec);
SpectrumResult spectrum_from_json(const nlohmann::json& j);

}  // namespace conedet
