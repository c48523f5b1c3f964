#include "conedet_tools/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace conedet::tools {

namespace {

std::string fmt15(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    if (x == 0.0) return "0";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return buf;
}

std::string leaf_text(const Json& j) {
    if (j.is_number_float()) return fmt15(j.get<double>());
    if (j.is_string()) return j.get<std::string>();
    if (j.is_null()) return "null";
    return j.dump();
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
    if (j.is_object()) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            flatten(it.value(), prefix.empty() ? it.key() : prefix + "." + it.key(), rows);
        }
    } else if (j.is_array()) {
        for (std::size_t k = 0; k < j.size(); ++k) {
            flatten(j[k], prefix + "[" + std::to_string(k) + "]", rows);
        }
    } else {
        rows.emplace_back(prefix, leaf_text(j));
    }
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

Format parse_format(const std::string& name) {
    if (name == "json") return Format::kJson;
    if (name == "csv") return Format::kCsv;
    if (name == "text") return Format::kText;
    throw std::invalid_argument("unknown format '" + name + "' (json, csv, text)");
}

double round15(double x) {
    if (!std::isfinite(x)) return x;
    if (x == 0.0) return 0.0;  // drops the sign of zero
    return std::strtod(fmt15(x).c_str(), nullptr);
}

Json complex_json(std::complex<double> z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Json rounded(const Json& j) {
    if (j.is_number_float()) return round15(j.get<double>());
    if (j.is_object()) {
        Json out = Json::object();
        for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = rounded(it.value());
        return out;
    }
    if (j.is_array()) {
        Json out = Json::array();
        for (const auto& v : j) out.push_back(rounded(v));
        return out;
    }
    return j;
}

void write_report(std::ostream& out, const Json& report, Format format) {
    switch (format) {
        case Format::kJson:
            out << rounded(report).dump(2) << '\n';
            return;
        case Format::kCsv: {
            std::vector<std::pair<std::string, std::string>> rows;
            flatten(report, "", rows);
            out << "key,value\n";
            for (const auto& [k, v] : rows) out << csv_field(k) << ',' << csv_field(v) << '\n';
            return;
        }
        case Format::kText: {
            std::vector<std::pair<std::string, std::string>> rows;
            flatten(report, "", rows);
            for (const auto& [k, v] : rows) out << k << " = " << v << '\n';
            return;
        }
    }
}

}  // namespace conedet::tools
