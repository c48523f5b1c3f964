#include "conedet/errors.hpp"
#include "conedet/spectral.hpp"

namespace conedet {

nlohmann::json to_json(const SpectrumResult& spec) {
    nlohmann::json j;
    j["eigenvalues"] = spec.eigenvalues;
    j["grid"] = {spec.grid_shape[0], spec.grid_shape[1]};
    j["sigma"] = {spec.sigma.value().real(), spec.sigma.value().imag()};
    if (spec.t) {
        j["t"] = {spec.t->real(), spec.t->imag()};
    } else {
        j["t"] = nullptr;
    }
    j["area"] = spec.area;
    j["heat_constant"] = spec.heat_constant;
    j["diagnostics"] = {
        {"zero_mode_residual", spec.diagnostics.zero_mode_residual},
        {"symmetry_residual", spec.diagnostics.symmetry_residual},
        {"max_eigen_residual", spec.diagnostics.max_eigen_residual},
        {"krylov_dimension", spec.diagnostics.krylov_dimension},
    };
    return j;
}

SpectrumResult spectrum_from_json(const nlohmann::json& j) {
    try {
        SpectrumResult s;
        s.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
        s.grid_shape = {j.at("grid").at(0).get<int>(), j.at("grid").at(1).get<int>()};
        s.sigma = PeriodRatio(cplx(j.at("sigma").at(0).get<double>(), j.at("sigma").at(1).get<double>()));
        if (!j.at("t").is_null()) {
            s.t = cplx(j.at("t").at(0).get<double>(), j.at("t").at(1).get<double>());
        }
        s.area = j.at("area").get<double>();
        s.heat_constant = j.at("heat_constant").get<double>();
        const auto& d = j.at("diagnostics");
        s.diagnostics.zero_mode_residual = d.at("zero_mode_residual").get<double>();
        s.diagnostics.symmetry_residual = d.at("symmetry_residual").get<double>();
        s.diagnostics.max_eigen_residual = d.at("max_eigen_residual").get<double>();
        s.diagnostics.krylov_dimension = d.at("krylov_dimension").get<int>();
        return s;
    } catch (const nlohmann::json::exception& ex) {
        throw DomainError(std::string("spectrum_from_json: ") + ex.what());
    }
}

}  // namespace conedet
