#pragma once

// Complex special functions on the upper half-plane: theta functions with
// half-integer characteristics, the Dedekind eta function, the complete
// elliptic integral K and SL(2,Z) reduction of a period ratio.

#include <array>
#include <complex>
#include <optional>

namespace conedet {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Integer matrix [a b; c d] acting by sigma -> (a sigma + b) / (c sigma + d).
struct Unimodular {
    long a = 1, b = 0, c = 0, d = 1;

    [[nodiscard]] long det() const { return a * d - b * c; }
    [[nodiscard]] cplx apply(cplx sigma) const;
    [[nodiscard]] Unimodular inverse() const { return {d, -b, -c, a}; }
    /// Matrix product (*this) * rhs.
    [[nodiscard]] Unimodular operator*(const Unimodular& rhs) const;
    bool operator==(const Unimodular&) const = default;
};

/// Period ratio of a lattice Z + sigma Z, Im sigma > 0.
///
/// When produced by reduce_to_fundamental_domain the `reduced` member holds
/// the reduced point and the matrix that maps `sigma` onto it.
class PeriodRatio {
public:
    struct Reduction {
        cplx sigma_reduced;
        Unimodular matrix;
    };

    /// Throws DomainError unless Im sigma > 0 and sigma is finite.
    explicit PeriodRatio(cplx sigma);
    PeriodRatio(cplx sigma, Reduction reduced);

    [[nodiscard]] cplx value() const { return sigma_; }
    [[nodiscard]] double imag() const { return sigma_.imag(); }
    [[nodiscard]] const std::optional<Reduction>& reduced() const { return reduced_; }

private:
    cplx sigma_;
    std::optional<Reduction> reduced_;
};

/// Characteristic [a, b] with a, b in {0, 1}.
class ThetaCharacteristic {
public:
    ThetaCharacteristic(int a, int b);
    [[nodiscard]] int a() const { return a_; }
    [[nodiscard]] int b() const { return b_; }

private:
    int a_;
    int b_;
};

struct SeriesOptions {
    /// Hard cap on the number of lattice terms summed in each direction.
    int max_terms = 20000;
    /// Relative size of the dropped tail.
    double tail_tolerance = 1e-14;
};

/// theta[a,b](z | sigma) = sum_n exp(i pi (n + a/2)^2 sigma + 2 pi i (n + a/2)(z + b/2)).
///
/// The series is truncated once a certified geometric bound on the remaining
/// terms in both directions falls below tail_tolerance times the larger of
/// the partial sum and the largest term seen (the latter keeps the odd theta
/// at z = 0, whose sum is zero, well defined).
cplx theta(ThetaCharacteristic ch, cplx z, const PeriodRatio& sigma,
           const SeriesOptions& opts = {});

/// d/dz of theta[a,b](z | sigma), same truncation rule.
cplx theta_dz(ThetaCharacteristic ch, cplx z, const PeriodRatio& sigma,
              const SeriesOptions& opts = {});

/// log eta(sigma); the real part is exact, the imaginary part is defined mod 2 pi.
/// Evaluated after reduction to the fundamental domain, so it does not
/// overflow or lose accuracy as Im sigma -> 0.
cplx log_dedekind_eta(const PeriodRatio& sigma);

/// eta(sigma) = q^{1/24} prod (1 - q^n), q = exp(2 pi i sigma).
cplx dedekind_eta(const PeriodRatio& sigma);

enum class CutSide { kAbove, kBelow };

struct AgmOptions {
    int max_iterations = 64;
    double tolerance = 1e-15;
};

/// Complete elliptic integral of the first kind K(m), m = k^2, principal
/// branch on C \ [1, inf). Throws DomainError on the cut.
cplx elliptic_K(cplx m, const AgmOptions& opts = {});

/// Boundary value of K on the cut m in (1, inf), approached from the given side.
/// Off the cut this equals elliptic_K.
cplx elliptic_K_limit(cplx m, CutSide side, const AgmOptions& opts = {});

/// Map sigma into {|Re| <= 1/2, |sigma| >= 1}. The returned PeriodRatio
/// carries the original value, the reduced value and the matrix g with
/// g(sigma) = sigma_reduced.
PeriodRatio reduce_to_fundamental_domain(const PeriodRatio& sigma);

/// Among SL(2,Z) images of `sigma`, the one closest to `reference`.
/// Used to keep a period ratio on one analytic branch across the cuts of
/// the Legendre period map.
cplx nearest_equivalent(cplx sigma, cplx reference);

}  // namespace conedet
