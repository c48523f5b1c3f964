#include "conedet_tools/cli.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "conedet/detformula.hpp"
#include "conedet/errors.hpp"
#include "conedet/geometry.hpp"
#include "conedet/moduli.hpp"
#include "conedet/spectral.hpp"
#include "conedet_tools/report.hpp"
#include "conedet_tools/suites.hpp"

namespace conedet::tools {

namespace {

// Raised for bad flag values after CLI11 has accepted the syntax.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double parse_real(std::string_view s, const std::string& whole) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    auto is_sign = [](char c) { return c == '+' || c == '-'; };
    if (s.size() >= 2 && is_sign(s[0]) && is_sign(s[1])) {
        throw std::invalid_argument("cannot parse complex number '" + whole + "'");
    }
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw std::invalid_argument("cannot parse complex number '" + whole + "'");
    }
    return v;
}

struct Options {
    std::string t_text;
    std::string sigma_text;
    std::string format = "json";
    std::string output;
    std::string suite;
    std::string lattice = "reduced";
    std::vector<std::string> tolerances;
    int grid = 256;
    int modes = 60;
    bool flat = false;
};

struct Inputs {
    std::optional<cplx> t;
    std::optional<cplx> sigma;
};

Inputs read_inputs(const Options& o, bool required) {
    Inputs in;
    if (!o.t_text.empty()) in.t = parse_complex(o.t_text);
    if (!o.sigma_text.empty()) in.sigma = parse_complex(o.sigma_text);
    if (in.t && in.sigma) throw UsageError("give exactly one of --t and --sigma");
    if (required && !in.t && !in.sigma) throw UsageError("one of --t or --sigma is required");
    if (in.sigma && !(in.sigma->imag() > 0.0)) throw UsageError("--sigma must have positive imaginary part");
    return in;
}

void check_grid(int grid) {
    if (grid < 32 || grid > 1024 || (grid & (grid - 1)) != 0) {
        throw UsageError("--grid must be a power of two between 32 and 1024");
    }
}

Json base_report(const std::string& command, const Inputs& in) {
    Json r;
    r["command"] = command;
    Json inputs = Json::object();
    if (in.t) inputs["t"] = complex_json(*in.t);
    if (in.sigma) inputs["sigma"] = complex_json(*in.sigma);
    r["inputs"] = inputs;
    r["outputs"] = Json::object();
    r["residuals"] = Json::object();
    r["pass"] = true;
    return r;
}

// The branch point named by the inputs; sigma is mapped through theta nullwerte.
ModulusPoint branch_point(const Inputs& in) {
    return in.t ? ModulusPoint(*in.t) : t_from_sigma(PeriodRatio(*in.sigma));
}

double orbit_distance(cplx t, const ModulusPoint& ref) {
    double best = std::numeric_limits<double>::infinity();
    for (cplx m : g_orbit(ref).members) best = std::min(best, std::abs(t - m) / std::max(1.0, std::abs(m)));
    return best;
}

Json matrix_json(const Unimodular& g) { return Json::array({g.a, g.b, g.c, g.d}); }

Json cmd_det(const Inputs& in, const Tolerances& tol) {
    Json r = base_report("det", in);
    const ModulusPoint t = branch_point(in);
    const PeriodRatio sigma = sigma_from_t(t);
    const PeriodRatio red = reduce_to_fundamental_domain(sigma);
    const double d = det_value(t).log_value;
    const GOrbit orbit = g_orbit(t);
    double spread = 0.0;
    for (cplx m : orbit.members) spread = std::max(spread, std::abs(det_value(ModulusPoint(m)).log_value - d));
    auto& o = r["outputs"];
    o["t"] = complex_json(t.value());
    o["log_det"] = d;
    o["up_to_constant"] = true;
    o["sigma"] = complex_json(sigma.value());
    o["sigma_reduced"] = complex_json(red.reduced()->sigma_reduced);
    o["F"] = F(t);
    o["log_flat_det"] = flat_det(sigma).log_value;
    o["orbit_canonical"] = complex_json(orbit.canonical);
    r["residuals"]["orbit_spread"] = spread;
    r["residuals"]["tolerance"] = tol.at("orbit_log");
    r["pass"] = spread <= tol.at("orbit_log");
    return r;
}

Json cmd_sigma(const Inputs& in, const Tolerances& tol) {
    Json r = base_report("sigma", in);
    auto& o = r["outputs"];
    if (in.t) {
        const ModulusPoint t(*in.t);
        const PeriodRatio sigma = sigma_from_t(t);
        const PeriodRatio red = reduce_to_fundamental_domain(sigma);
        const cplx back = t_from_sigma(sigma).value();
        o["sigma"] = complex_json(sigma.value());
        o["sigma_reduced"] = complex_json(red.reduced()->sigma_reduced);
        o["reduction_matrix"] = matrix_json(red.reduced()->matrix);
        o["t_from_sigma"] = complex_json(back);
        const double res = orbit_distance(back, t);
        r["residuals"]["roundtrip_orbit_distance"] = res;
        r["residuals"]["tolerance"] = tol.at("roundtrip");
        r["pass"] = res <= tol.at("roundtrip");
    } else {
        const PeriodRatio red = reduce_to_fundamental_domain(PeriodRatio(*in.sigma));
        o["t"] = complex_json(t_from_sigma(PeriodRatio(*in.sigma)).value());
        o["sigma_reduced"] = complex_json(red.reduced()->sigma_reduced);
        o["reduction_matrix"] = matrix_json(red.reduced()->matrix);
    }
    return r;
}

Json cmd_orbit(const Inputs& in) {
    Json r = base_report("orbit", in);
    const GOrbit orbit = g_orbit(branch_point(in));
    Json members = Json::array();
    for (cplx m : orbit.members) members.push_back(complex_json(m));
    r["outputs"]["members"] = members;
    r["outputs"]["canonical"] = complex_json(orbit.canonical);
    return r;
}

Json cmd_tau(const Inputs& in, const Tolerances& tol) {
    Json r = base_report("tau", in);
    const ModulusPoint t = branch_point(in);
    const cplx tau = tau_bergman(t);
    const LocalTaylorData ab = taylor_AB(t);
    const cplx b0 = schiffer_b0(t);
    const cplx binf = b_minus_inf_closed(t);
    const cplx binf_ab = b_minus_inf_from_AB(ab);
    const cplx dlog = det_log_derivative(t);
    auto& o = r["outputs"];
    o["t"] = complex_json(t.value());
    o["tau"] = complex_json(tau);
    o["abs_tau"] = std::abs(tau);
    o["log_det_prelim"] = det_prelim(t).log_value;
    o["s"] = complex_json(ab.s);
    o["A"] = complex_json(ab.A);
    o["B"] = complex_json(ab.B);
    o["b0"] = complex_json(b0);
    o["b_minus_inf"] = complex_json(binf);
    o["b_minus_inf_taylor"] = complex_json(binf_ab);
    o["dlog_det_dt"] = complex_json(dlog);
    const cplx rhs = 0.5 * (b0 - binf);
    const double var = std::abs(dlog - rhs) / std::max(1.0, std::abs(rhs));
    const double dual = std::abs(binf_ab - binf) / std::max(1.0, std::abs(binf));
    auto& res = r["residuals"];
    res["variational"] = var;
    res["variational_tolerance"] = tol.at("variational");
    res["b_dual"] = dual;
    res["b_dual_tolerance"] = tol.at("b_dual");
    r["pass"] = var <= tol.at("variational") && dual <= tol.at("b_dual");
    return r;
}

Json cmd_spectrum(const Inputs& in, const Options& o) {
    Json r = base_report("spectrum", in);
    r["inputs"]["grid"] = o.grid;
    r["inputs"]["modes"] = o.modes;
    const std::array<int, 2> shape{o.grid, o.grid};
    SpectrumResult spec;
    double log_formula = 0.0;
    if (o.flat) {
        const PeriodRatio sigma = in.sigma ? PeriodRatio(*in.sigma) : sigma_from_t(ModulusPoint(*in.t));
        spec = lowest_eigenvalues(assemble_flat(sigma, shape), o.modes);
        log_formula = flat_det(sigma).log_value;
        r["inputs"]["flat"] = true;
    } else if (in.sigma) {
        const PeriodRatio sigma(*in.sigma);
        spec = lowest_eigenvalues(assemble(sigma, t_from_sigma(sigma), shape), o.modes);
        log_formula = det_value(t_from_sigma(sigma)).log_value;
    } else {
        if (o.lattice != "reduced" && o.lattice != "legendre") {
            throw UsageError("--lattice must be 'reduced' or 'legendre'");
        }
        const ModulusPoint t(*in.t);
        spec = spectrum_for_t(t, shape, o.modes,
                              o.lattice == "reduced" ? LatticeChoice::kReduced : LatticeChoice::kLegendre);
        log_formula = det_value(t).log_value;
    }
    Json s = Json::parse(to_json(spec).dump());
    auto& out = r["outputs"];
    for (auto it = s.begin(); it != s.end(); ++it) out[it.key()] = it.value();
    if (o.modes >= 30) out["weyl_slope"] = weyl_check(spec);
    if (o.modes >= 50) out["log_det_estimate"] = zeta_det_estimate(spec).log_value;
    out["log_det_formula"] = log_formula;
    r["residuals"]["zero_mode"] = spec.diagnostics.zero_mode_residual;
    r["residuals"]["max_eigen_residual"] = spec.diagnostics.max_eigen_residual;
    return r;
}

Json cmd_field_dump(const Inputs& in, const Options& o, std::ostream& out, bool& report_wanted) {
    Json r = base_report("field-dump", in);
    r["inputs"]["grid"] = o.grid;
    const ModulusPoint t = branch_point(in);
    const PeriodRatio sigma = in.sigma ? PeriodRatio(*in.sigma)
                                       : PeriodRatio(reduce_to_fundamental_domain(sigma_from_t(t))
                                                         .reduced()->sigma_reduced);
    const ConformalField field = conformal_factor_on_torus(sigma, t, {o.grid, o.grid});
    if (o.output.empty()) {
        write_field(out, field);
        report_wanted = false;
        return r;
    }
    std::ofstream file(o.output);
    if (!file) throw std::runtime_error("cannot open '" + o.output + "' for writing");
    write_field(file, field);
    if (!file) throw std::runtime_error("failed writing '" + o.output + "'");
    auto& res = r["outputs"];
    res["path"] = o.output;
    res["sigma"] = complex_json(sigma.value());
    res["t"] = complex_json(t.value());
    res["area"] = field.area();
    res["labeling"] = field.labeling;
    res["cone_point"] = complex_json(field.singular_points.front().z);
    return r;
}

Json cmd_verify(const Inputs& in, const Options& o, const Tolerances& tol) {
    Json r = base_report("verify", in);
    r["inputs"]["suite"] = o.suite;
    SuiteOptions so;
    so.grid = {o.grid, o.grid};
    so.modes = o.modes;
    so.t = in.t;
    const std::vector<CheckResult> checks = run_suite(o.suite, tol, so);
    Json arr = Json::array();
    bool all = true;
    for (const auto& c : checks) {
        arr.push_back({{"name", c.name},
                       {"count", c.count},
                       {"passed", c.passed},
                       {"max_residual", c.max_residual},
                       {"tolerance_key", c.tolerance_key},
                       {"tolerance", c.tolerance},
                       {"pass", c.pass()}});
        all = all && c.pass();
    }
    r["outputs"]["checks"] = arr;
    Json table = Json::object();
    for (const auto& [k, v] : tol.table()) table[k] = v;
    r["outputs"]["tolerances"] = table;
    for (const auto& c : checks) r["residuals"][c.name] = c.max_residual;
    r["pass"] = all;
    return r;
}

}  // namespace

cplx parse_complex(const std::string& text) {
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    }
    if (s.empty()) throw std::invalid_argument("empty complex number");
    if (s.back() != 'i') return {parse_real(s, text), 0.0};
    s.pop_back();
    // Split at the last sign that is not the leading sign or an exponent sign.
    std::size_t split = std::string::npos;
    for (std::size_t k = s.size(); k-- > 1;) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
            split = k;
            break;
        }
    }
    if (split == std::string::npos) return {0.0, parse_real(s, text)};
    const std::string_view sv(s);
    if (split == 0) throw std::invalid_argument("cannot parse complex number '" + text + "'");
    return {parse_real(sv.substr(0, split), text), parse_real(sv.substr(split), text)};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Determinant of the Laplacian on genus-one surfaces with a 4 pi conical point"};
    app.name("conedet");
    app.require_subcommand(1);
    Options o;

    auto add_point = [&](CLI::App* sub) {
        sub->add_option("--t", o.t_text, "branch point t as a+bi");
        sub->add_option("--sigma", o.sigma_text, "period ratio sigma as a+bi, Im > 0");
    };
    auto add_output = [&](CLI::App* sub) {
        sub->add_option("--format", o.format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
        sub->add_option("--output", o.output, "write the report to this file");
    };
    auto add_grid = [&](CLI::App* sub) {
        sub->add_option("--grid", o.grid, "grid points per period (power of two, 32..1024)");
        sub->add_option("--modes", o.modes, "number of eigenvalues, constant mode included");
    };

    auto* det = app.add_subcommand("det", "log det (up to a constant), sigma, F(t), orbit representative");
    auto* sigma = app.add_subcommand("sigma", "period ratio for t, or branch point for sigma");
    auto* orbit = app.add_subcommand("orbit", "the six images of t under the anharmonic group");
    auto* tau = app.add_subcommand("tau", "tau-function, Taylor data and endpoint values b(0), b(-inf)");
    auto* spectrum = app.add_subcommand("spectrum", "low eigenvalues of the discretized Laplacian");
    auto* verify = app.add_subcommand("verify", "run an invariant suite");
    auto* dump = app.add_subcommand("field-dump", "write the sampled conformal factor grid file");
    for (auto* sub : {det, sigma, orbit, tau, spectrum, dump}) {
        add_point(sub);
    }
    for (auto* sub : {det, sigma, orbit, tau, spectrum, verify}) add_output(sub);
    add_grid(spectrum);
    add_grid(verify);
    spectrum->add_flag("--flat", o.flat, "flat unit-area metric instead of the cone metric");
    spectrum->add_option("--lattice", o.lattice, "reduced or legendre period ratio (with --t)");
    verify->add_option("--suite", o.suite, "symmetry, variational, curvature, roundtrip or spectral")
        ->required()
        ->check(CLI::IsMember(suite_names()));
    verify->add_option("--t", o.t_text, "branch point for the spectral suite");
    verify->add_option("--tol", o.tolerances, "override a tolerance, key=value (repeatable)");
    dump->add_option("--grid", o.grid, "grid points per period (power of two, 32..1024)");
    dump->add_option("--output", o.output, "grid file path (standard output if absent)");
    dump->add_option("--format", o.format, "report format when --output is given")
        ->check(CLI::IsMember({"json", "csv", "text"}));

    std::vector<std::string> argv_store{"conedet"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        const Format format = parse_format(o.format);
        Tolerances tol = Tolerances::defaults();
        for (const auto& kv : o.tolerances) {
            const auto eq = kv.find('=');
            if (eq == std::string::npos) throw UsageError("--tol expects key=value, got '" + kv + "'");
            tol.set(kv.substr(0, eq), parse_real(std::string_view(kv).substr(eq + 1), kv));
        }
        Json report;
        bool report_wanted = true;
        if (det->parsed()) {
            report = cmd_det(read_inputs(o, true), tol);
        } else if (sigma->parsed()) {
            report = cmd_sigma(read_inputs(o, true), tol);
        } else if (orbit->parsed()) {
            report = cmd_orbit(read_inputs(o, true));
        } else if (tau->parsed()) {
            report = cmd_tau(read_inputs(o, true), tol);
        } else if (spectrum->parsed()) {
            check_grid(o.grid);
            report = cmd_spectrum(read_inputs(o, true), o);
        } else if (dump->parsed()) {
            check_grid(o.grid);
            report = cmd_field_dump(read_inputs(o, true), o, out, report_wanted);
        } else {
            check_grid(o.grid);
            report = cmd_verify(read_inputs(o, false), o, tol);
        }
        if (report_wanted) {
            if (!o.output.empty() && !dump->parsed()) {
                std::ofstream file(o.output);
                if (!file) throw std::runtime_error("cannot open '" + o.output + "' for writing");
                write_report(file, report, format);
            } else {
                write_report(out, report, format);
            }
        }
        return report["pass"].get<bool>() ? kExitOk : kExitFailed;
    } catch (const DomainError& e) {
        err << "conedet: domain error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "conedet: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "conedet: error: " << e.what() << '\n';
        return kExitFailed;
    }
}

}  // namespace conedet::tools
