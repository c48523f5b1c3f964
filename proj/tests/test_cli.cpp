#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "conedet_tools/cli.hpp"
#include "conedet_tools/report.hpp"
#include "conedet_tools/suites.hpp"

using conedet::tools::parse_complex;
using conedet::tools::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    return {code, out.str(), err.str()};
}

TEST(ParseComplex, AcceptedForms) {
    using C = std::complex<double>;
    EXPECT_EQ(parse_complex("2"), C(2, 0));
    EXPECT_EQ(parse_complex("-0.5"), C(-0.5, 0));
    EXPECT_EQ(parse_complex("i"), C(0, 1));
    EXPECT_EQ(parse_complex("-i"), C(0, -1));
    EXPECT_EQ(parse_complex("3i"), C(0, 3));
    EXPECT_EQ(parse_complex("1+2i"), C(1, 2));
    EXPECT_EQ(parse_complex("1-2.5i"), C(1, -2.5));
    EXPECT_EQ(parse_complex("0.5+i"), C(0.5, 1));
    EXPECT_EQ(parse_complex("-1e-3+2e-4i"), C(-1e-3, 2e-4));
    EXPECT_EQ(parse_complex("1e+2-3E-1i"), C(100, -0.3));
    EXPECT_EQ(parse_complex(" 1 + 2i "), C(1, 2));
}

TEST(ParseComplex, RejectedForms) {
    for (const char* bad : {"", "1+", "abc", "1+2j", "2ii", "1..2", "+-1", "1+2i3", "nan"}) {
        EXPECT_THROW(parse_complex(bad), std::invalid_argument) << bad;
    }
}

TEST(Cli, DetIsOrbitInvariant) {
    const Result a = invoke({"det", "--t", "2"});
    const Result b = invoke({"det", "--t", "0.5"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    const auto ja = nlohmann::json::parse(a.out);
    const auto jb = nlohmann::json::parse(b.out);
    EXPECT_NEAR(ja["outputs"]["log_det"].get<double>(), jb["outputs"]["log_det"].get<double>(), 1e-9);
    EXPECT_EQ(ja["outputs"]["orbit_canonical"], jb["outputs"]["orbit_canonical"]);
    EXPECT_TRUE(ja["outputs"]["up_to_constant"].get<bool>());
    for (const char* key : {"command", "inputs", "outputs", "residuals", "pass"}) EXPECT_TRUE(ja.contains(key)) << key;
}

TEST(Cli, ExcludedPointIsDomainError) {
    const Result r = invoke({"det", "--t", "1"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("domain error"), std::string::npos);
    EXPECT_TRUE(r.out.empty());
}

TEST(Cli, ParseErrors) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"frobnicate"}).code, 2);
    EXPECT_EQ(invoke({"det", "--t", "1+"}).code, 2);
    EXPECT_EQ(invoke({"det"}).code, 2);
    EXPECT_EQ(invoke({"det", "--t", "2", "--sigma", "i"}).code, 2);
    EXPECT_EQ(invoke({"det", "--sigma", "1-i"}).code, 2);
    EXPECT_EQ(invoke({"spectrum", "--t", "0.3", "--grid", "100"}).code, 2);
    EXPECT_EQ(invoke({"spectrum", "--t", "0.3", "--grid", "2048"}).code, 2);
    EXPECT_EQ(invoke({"det", "--t", "2", "--format", "xml"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--suite", "nope"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--suite", "symmetry", "--tol", "bogus=1"}).code, 2);
    EXPECT_EQ(invoke({"verify", "--suite", "symmetry", "--tol", "f_symmetry"}).code, 2);
    EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST(Cli, VerifySymmetrySuite) {
    const Result r = invoke({"verify", "--suite", "symmetry"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_TRUE(j["pass"].get<bool>());
    const auto& c = j["outputs"]["checks"][0];
    EXPECT_EQ(c["count"].get<int>(), 200);
    EXPECT_EQ(c["passed"].get<int>(), 200);
    EXPECT_LT(c["max_residual"].get<double>(), 1e-12);
    EXPECT_EQ(j["outputs"]["tolerances"]["f_symmetry"].get<double>(), 1e-12);
}

TEST(Cli, FailedVerificationExitsOne) {
    const Result r = invoke({"verify", "--suite", "symmetry", "--tol", "f_symmetry=1e-30"});
    EXPECT_EQ(r.code, 1);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_FALSE(j["pass"].get<bool>());
    EXPECT_EQ(j["outputs"]["tolerances"]["f_symmetry"].get<double>(), 1e-30);
}

TEST(Cli, ReportsAreByteIdentical) {
    const std::vector<std::string> args{"tau", "--t", "0.3+0.2i"};
    EXPECT_EQ(invoke(args).out, invoke(args).out);
    const std::vector<std::string> spec{"spectrum", "--t", "0.5+0.8i", "--grid", "32", "--modes", "12"};
    EXPECT_EQ(invoke(spec).out, invoke(spec).out);
}

TEST(Cli, FifteenSignificantDigits) {
    const Result r = invoke({"det", "--t", "0.3", "--format", "text"});
    ASSERT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("outputs.log_det = -1.31698988995027\n"), std::string::npos) << r.out;
}

TEST(Cli, CsvAndText) {
    const Result csv = invoke({"orbit", "--t", "2", "--format", "csv"});
    ASSERT_EQ(csv.code, 0);
    EXPECT_EQ(csv.out.rfind("key,value\ncommand,orbit\n", 0), 0u);
    EXPECT_NE(csv.out.find("outputs.members[2].re,-1\n"), std::string::npos);
    const Result text = invoke({"sigma", "--t", "0.5", "--format", "text"});
    ASSERT_EQ(text.code, 0);
    EXPECT_NE(text.out.find("outputs.sigma.im = 1\n"), std::string::npos) << text.out;
}

TEST(Cli, SigmaInput) {
    const Result r = invoke({"sigma", "--sigma", "i"});
    ASSERT_EQ(r.code, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j["outputs"]["t"]["re"].get<double>(), -1.0, 1e-14);
    const Result d = invoke({"det", "--sigma", "i"});
    const Result e = invoke({"det", "--t", "0.5"});
    EXPECT_NEAR(nlohmann::json::parse(d.out)["outputs"]["log_det"].get<double>(),
                nlohmann::json::parse(e.out)["outputs"]["log_det"].get<double>(), 1e-12);
}

TEST(Cli, SpectrumRecord) {
    const Result r = invoke({"spectrum", "--t", "0.3", "--grid", "64", "--modes", "50"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(r.out);
    const auto& o = j["outputs"];
    EXPECT_EQ(o["eigenvalues"].size(), 50u);
    EXPECT_EQ(o["grid"], nlohmann::json::array({64, 64}));
    for (const char* key : {"sigma", "t", "area", "heat_constant", "diagnostics", "weyl_slope", "log_det_estimate",
                            "log_det_formula"}) {
        EXPECT_TRUE(o.contains(key)) << key;
    }
    const Result flat = invoke({"spectrum", "--sigma", "0.2+1.1i", "--flat", "--grid", "32", "--modes", "10"});
    ASSERT_EQ(flat.code, 0) << flat.err;
    EXPECT_NEAR(nlohmann::json::parse(flat.out)["outputs"]["area"].get<double>(), 1.0, 1e-12);
}

TEST(Cli, FieldDumpToStdoutAndFile) {
    const Result r = invoke({"field-dump", "--t", "0.3", "--grid", "32"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("conedet-field 1\n", 0), 0u);
    const std::string path = ::testing::TempDir() + "conedet_field.txt";
    const Result f = invoke({"field-dump", "--t", "0.3", "--grid", "32", "--output", path});
    ASSERT_EQ(f.code, 0) << f.err;
    const auto j = nlohmann::json::parse(f.out);
    EXPECT_NEAR(j["outputs"]["area"].get<double>(), 2 * 3.141592653589793, 1e-9);
}

TEST(Cli, ReportToFile) {
    const std::string path = ::testing::TempDir() + "conedet_report.json";
    const Result r = invoke({"orbit", "--t", "2", "--output", path});
    ASSERT_EQ(r.code, 0);
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(path);
    EXPECT_EQ(nlohmann::json::parse(in)["command"], "orbit");
}

TEST(Report, RoundingDropsNegativeZero) {
    EXPECT_EQ(conedet::tools::round15(-0.0), 0.0);
    EXPECT_FALSE(std::signbit(conedet::tools::round15(-0.0)));
    EXPECT_EQ(conedet::tools::round15(0.1 + 0.2), 0.3);
}

TEST(Suites, TolerancesAreOverridable) {
    auto tol = conedet::tools::Tolerances::defaults();
    tol.set("variational", 1e-3);
    EXPECT_EQ(tol.at("variational"), 1e-3);
    EXPECT_THROW(tol.set("variational", -1), std::invalid_argument);
    EXPECT_THROW((void)tol.at("nonexistent"), std::invalid_argument);
}

}  // namespace
