#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "conedet/errors.hpp"
#include "conedet/spectral.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace conedet;

namespace {

// Eigenvalues of the discrete flat problem, written out from the
// second-difference symbols: the exact oracle for the discretization.
std::vector<double> discrete_flat_spectrum(cplx sigma, int n, int count) {
    const double im = sigma.imag();
    const double a = std::norm(sigma) / (im * im);
    const double b = -sigma.real() / (im * im);
    const double c = 1.0 / (im * im);
    std::vector<double> ev;
    for (int k1 = 0; k1 < n; ++k1) {
        for (int k2 = 0; k2 < n; ++k2) {
            const double t1 = 2 * kPi * k1 / n;
            const double t2 = 2 * kPi * k2 / n;
            const double x = 2 * n * std::sin(t1 / 2);
            const double y = 2 * n * std::sin(t2 / 2);
            ev.push_back(im * (a * x * x + c * y * y + 2 * b * n * n * std::sin(t1) * std::sin(t2)));
        }
    }
    std::sort(ev.begin(), ev.end());
    ev.resize(count);
    return ev;
}

TEST(Assemble, StencilIsSymmetricWithZeroRowSum) {
    const OperatorPair op = assemble_flat(PeriodRatio(cplx(0.3, 1.1)), {32, 32});
    double sum = 0;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            sum += op.stencil()[a][b];
            EXPECT_EQ(op.stencil()[a][b], op.stencil()[2 - a][2 - b]);
        }
    EXPECT_NEAR(sum, 0.0, 1e-9 * op.stencil()[1][1]);
}

TEST(Assemble, ConstantsAreInTheKernel) {
    const OperatorPair op = assemble(PeriodRatio(cplx(0.2, 1.3)), t_from_sigma(PeriodRatio(cplx(0.2, 1.3))), {32, 32});
    std::vector<double> one(op.size(), 1.0), out(op.size());
    op.apply_stiffness(one, out);
    for (double v : out) EXPECT_NEAR(v, 0.0, 1e-9 * op.stencil()[1][1]);
}

TEST(Assemble, WeightsArePositive) {
    const cplx t(0.3, 0.0);
    const OperatorPair op = assemble(sigma_from_t(ModulusPoint(t)), ModulusPoint(t), {64, 64});
    for (double w : op.weight()) EXPECT_GT(w, 0.0);
    EXPECT_NEAR(op.area(), 2 * kPi, 1e-6);
}

TEST(Assemble, SymbolMatchesStencilOnFourierModes) {
    const OperatorPair op = assemble_flat(PeriodRatio(cplx(-0.4, 0.9)), {32, 32});
    for (auto [k1, k2] : {std::pair{1, 0}, {0, 3}, {5, 7}, {31, 2}}) {
        std::vector<double> x(op.size()), y(op.size());
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j) x[i * 32 + j] = std::cos(2 * kPi * (k1 * i + k2 * j) / 32.0);
        op.apply_stiffness(x, y);
        const double sym = op.symbol(k1, k2);
        for (std::size_t k = 0; k < x.size(); ++k) EXPECT_NEAR(y[k], sym * x[k], 1e-9 * op.stencil()[1][1]);
    }
}

TEST(Assemble, RejectsBadInput) {
    EXPECT_THROW(assemble_flat(PeriodRatio(cplx(0, 1)), {16, 16}), DomainError);
    EXPECT_THROW(OperatorPair(PeriodRatio(cplx(0, 1)), {32, 32}, std::vector<double>(10, 1.0), 0.0), DomainError);
    std::vector<double> w(32 * 32, 1.0);
    w[5] = -1.0;
    EXPECT_THROW(OperatorPair(PeriodRatio(cplx(0, 1)), {32, 32}, w, 0.0), DomainError);
}

TEST(LowestEigenvalues, FlatTorusMatchesDiscreteOracle) {
    for (cplx s : {cplx(0, 1), cplx(0.3, 1.2), cplx(0.5, 0.8660254037844386)}) {
        const SpectrumResult spec = lowest_eigenvalues(assemble_flat(PeriodRatio(s), {64, 64}), 30);
        const std::vector<double> want = discrete_flat_spectrum(s, 64, 30);
        EXPECT_LT(spec.eigenvalues[0], 1e-8 * spec.eigenvalues[1]);
        for (int k = 1; k < 30; ++k) EXPECT_NEAR(spec.eigenvalues[k], want[k], 1e-8 * want[k]) << s << " k=" << k;
    }
}

TEST(LowestEigenvalues, FlatTorusMultiplicities) {
    // Square lattice: 0, then 4 pi^2 (x4), 8 pi^2 (x4), 16 pi^2 (x4) in the continuum.
    const SpectrumResult spec = lowest_eigenvalues(assemble_flat(PeriodRatio(cplx(0, 1)), {128, 128}), 13);
    const std::vector<double> cont = oracle::flat_torus_spectrum(cplx(0, 1), 13);
    for (int k = 1; k < 13; ++k) EXPECT_NEAR(spec.eigenvalues[k], cont[k], 2e-3 * cont[k]);
    for (int k = 1; k < 4; ++k) EXPECT_NEAR(spec.eigenvalues[k], spec.eigenvalues[1], 1e-9 * spec.eigenvalues[1]);
    EXPECT_GT(spec.eigenvalues[5] - spec.eigenvalues[4], 1.0);
}

TEST(LowestEigenvalues, ConeMetricDiagnostics) {
    const SpectrumResult spec = spectrum_for_t(ModulusPoint(cplx(0.5, 0.8)), {64, 64}, 20);
    ASSERT_EQ(spec.eigenvalues.size(), 20u);
    EXPECT_TRUE(std::is_sorted(spec.eigenvalues.begin(), spec.eigenvalues.end()));
    EXPECT_GE(spec.eigenvalues[0], 0.0);
    EXPECT_LT(spec.diagnostics.zero_mode_residual, 1e-8);
    EXPECT_LT(spec.diagnostics.symmetry_residual, 1e-12);
    EXPECT_LT(spec.diagnostics.max_eigen_residual, 1e-5);
    EXPECT_NEAR(spec.area, 2 * kPi, 1e-6);
    // Degree-two pull-back of the quotient sphere: 6 is an exact eigenvalue of the continuum problem.
    bool near_six = false;
    for (double v : spec.eigenvalues) near_six = near_six || std::abs(v - 6.0) < 0.05;
    EXPECT_TRUE(near_six);
}

TEST(LowestEigenvalues, Deterministic) {
    const OperatorPair op = assemble(sigma_from_t(ModulusPoint(0.3)), ModulusPoint(0.3), {32, 32});
    const SpectrumResult a = lowest_eigenvalues(op, 12);
    const SpectrumResult b = lowest_eigenvalues(op, 12);
    EXPECT_EQ(a.eigenvalues, b.eigenvalues);
}

TEST(LowestEigenvalues, RejectsBadCounts) {
    const OperatorPair op = assemble_flat(PeriodRatio(cplx(0, 1)), {32, 32});
    EXPECT_THROW(lowest_eigenvalues(op, 9), DomainError);
    EXPECT_THROW(lowest_eigenvalues(op, 200), DomainError);
}

TEST(LowestEigenvalues, SelfConvergence) {
    const ModulusPoint t(cplx(0.3, 0.0));
    std::vector<double> fifth;
    std::vector<std::vector<double>> all;
    for (int n : {64, 128, 256}) {
        const SpectrumResult s = spectrum_for_t(t, {n, n}, 11);
        fifth.push_back(s.eigenvalues[5]);
        all.push_back(s.eigenvalues);
    }
    const double d1 = fifth[1] - fifth[0];
    const double d2 = fifth[2] - fifth[1];
    EXPECT_GT(d1 * d2, 0.0);  // monotone
    EXPECT_GE(std::log2(std::abs(d1 / d2)), 1.0);
    for (int k = 1; k <= 10; ++k) EXPECT_LT(std::abs(all[2][k] - all[1][k]), 0.01 * all[2][k]) << k;
}

TEST(Weyl, FlatCalibration) {
    const SpectrumResult spec = lowest_eigenvalues(assemble_flat(PeriodRatio(cplx(0.1, 1.0)), {128, 128}), 60);
    EXPECT_NEAR(weyl_check(spec), 1.0 / (4 * kPi), 0.1 / (4 * kPi));
}

TEST(Weyl, ConeMetricSlopeAndStability) {
    const SpectrumResult spec = spectrum_for_t(ModulusPoint(cplx(-1.5, 0.7)), {128, 128}, 120);
    const double full = weyl_check(spec);
    EXPECT_NEAR(full, 0.5, 0.05);
    SpectrumResult half = spec;
    half.eigenvalues.resize(60);
    EXPECT_LT(std::abs(weyl_check(half) - full), 0.05 * full);
    half.eigenvalues.resize(20);
    EXPECT_THROW(weyl_check(half), DomainError);
}

TEST(Isospectral, IdentityIsExact) {
    EXPECT_EQ(isospectral_orbit_check(ModulusPoint(cplx(0.3, 0.2)), GroupElement::kIdentity, {32, 32}, 10), 0.0);
}

TEST(Isospectral, InversionAtCoarseGrid) {
    EXPECT_LT(isospectral_orbit_check(ModulusPoint(2.0), GroupElement::kInvert, {128, 128}, 16), 1e-2);
}

TEST(Isospectral, GroupElementsAct) {
    const cplx t(0.3, 0.4);
    for (GroupElement g : {GroupElement::kIdentity, GroupElement::kInvert, GroupElement::kReflect,
                           GroupElement::kInvertReflect, GroupElement::kRatio, GroupElement::kRatioInverse}) {
        EXPECT_TRUE(same_moduli_point(ModulusPoint(t), ModulusPoint(apply(g, t)), 1e-14));
    }
    EXPECT_LT(std::abs(apply(GroupElement::kRatio, t) - t / (t - 1.0)), 1e-15);
}

TEST(ZetaEstimate, FlatCalibrationAcrossLattices) {
    const cplx s1(0.0, 1.0), s2(0.35, 1.6);
    const SpectrumResult a = lowest_eigenvalues(assemble_flat(PeriodRatio(s1), {128, 128}), 60);
    const SpectrumResult b = lowest_eigenvalues(assemble_flat(PeriodRatio(s2), {128, 128}), 60);
    const double est = zeta_det_estimate(a).log_value - zeta_det_estimate(b).log_value;
    const double exact = flat_det(PeriodRatio(s1)).log_value - flat_det(PeriodRatio(s2)).log_value;
    EXPECT_LT(std::abs(est - exact), 0.1);
}

TEST(ZetaEstimate, StableUnderDoublingModes) {
    const SpectrumResult spec = spectrum_for_t(ModulusPoint(cplx(0.5, 0.8)), {128, 128}, 120);
    SpectrumResult half = spec;
    half.eigenvalues.resize(60);
    EXPECT_LT(std::abs(zeta_det_estimate(spec).log_value - zeta_det_estimate(half).log_value), 0.05);
    half.eigenvalues.resize(40);
    EXPECT_THROW(zeta_det_estimate(half), DomainError);
}

TEST(SpectrumJson, RoundTrip) {
    const SpectrumResult spec = spectrum_for_t(ModulusPoint(cplx(0.3, 0.1)), {32, 32}, 10);
    const SpectrumResult back = spectrum_from_json(to_json(spec));
    EXPECT_EQ(back.eigenvalues, spec.eigenvalues);
    EXPECT_EQ(back.grid_shape, spec.grid_shape);
    EXPECT_EQ(back.sigma.value(), spec.sigma.value());
    ASSERT_TRUE(back.t.has_value());
    EXPECT_EQ(*back.t, *spec.t);
    EXPECT_EQ(back.diagnostics.krylov_dimension, spec.diagnostics.krylov_dimension);
    EXPECT_THROW(spectrum_from_json(nlohmann::json{{"eigenvalues", {1.0}}}), DomainError);
}

}  // namespace
