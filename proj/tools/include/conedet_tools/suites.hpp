#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace conedet::tools {

/// Every tolerance the verification suites use, by name.
class Tolerances {
public:
    static Tolerances defaults();
    [[nodiscard]] double at(const std::string& key) const;
    /// Throws std::invalid_argument for unknown keys or non-positive values.
    void set(const std::string& key, double value);
    [[nodiscard]] const std::map<std::string, double>& table() const { return values_; }

private:
    std::map<std::string, double> values_;
};

struct CheckResult {
    std::string name;
    int count = 0;
    int passed = 0;
    double max_residual = 0.0;
    std::string tolerance_key;
    double tolerance = 0.0;
    [[nodiscard]] bool pass() const { return count > 0 && passed == count; }
};

struct SuiteOptions {
    std::array<int, 2> grid{256, 256};
    int modes = 60;
    /// Branch point for the spectral suite; 0.3 when absent.
    std::optional<std::complex<double>> t;
    std::uint64_t seed = 20240611;
};

const std::vector<std::string>& suite_names();

/// Throws std::invalid_argument for an unknown suite.
std::vector<CheckResult> run_suite(const std::string& name, const Tolerances& tol,
                                   const SuiteOptions& opts);

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

/// t with 0.05 < |t| < 20 and 0.05 < |t - 1| < 20, log-uniform in |t|.
std::complex<double> sample_t(std::mt19937_64& rng);

}  // namespace conedet::tools
