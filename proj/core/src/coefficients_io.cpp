#include <fstream>
#include <sstream>

#include <json.hpp>

#include "riccati/coefficients.hpp"

namespace riccati {

namespace {

using nlohmann::json;

CoefficientFn fn_from_json(const json& j, const std::string& name, double T) {
    if (j.is_number()) return CoefficientFn::constant(j.get<double>());
    if (!j.is_object()) throw ConfigError(name + ": expected number or object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& k = it.key();
        if (k != "kind" && k != "knots" && k != "values" && k != "coeffs" && k != "order")
            throw ConfigError(name + ": unknown field '" + k + "'");
    }
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "constant") {
        if (j.contains("values")) return CoefficientFn::constant(j.at("values").at(0).get<double>());
        throw ConfigError(name + ": constant needs values:[v]");
    }
    std::vector<double> knots = j.at("knots").get<std::vector<double>>();
    if (!knots.empty() && std::fabs(knots.back() - T) > 1e-12 * std::max(1.0, T))
        throw ConfigError(name + ": last knot must equal T");
    if (kind == "pwlinear")
        return CoefficientFn::piecewise_linear(std::move(knots),
                                               j.at("values").get<std::vector<double>>());
    if (kind == "pwpoly")
        return CoefficientFn::piecewise_polynomial(
            std::move(knots), j.at("coeffs").get<std::vector<std::vector<double>>>());
    if (kind == "table") {
        int order = j.contains("order") ? j.at("order").get<int>() : 1;
        return CoefficientFn::table(std::move(knots), j.at("values").get<std::vector<double>>(),
                                    order);
    }
    throw ConfigError(name + ": unknown kind '" + kind + "'");
}

json fn_to_json(const CoefficientFn& f) {
    json j;
    switch (f.kind()) {
        case CoefficientFn::Kind::Constant:
            j["kind"] = "constant";
            j["values"] = {f.node_values()[0]};
            break;
        case CoefficientFn::Kind::PiecewiseLinear:
            j["kind"] = "pwlinear";
            j["knots"] = f.knots();
            j["values"] = f.node_values();
            break;
        case CoefficientFn::Kind::PiecewisePolynomial:
            j["kind"] = "pwpoly";
            j["knots"] = f.knots();
            j["coeffs"] = f.piece_coeffs();
            break;
        case CoefficientFn::Kind::Table:
            j["kind"] = "table";
            j["knots"] = f.knots();
            j["values"] = f.node_values();
            j["order"] = f.interpolation_order();
            break;
    }
    return j;
}

}  // namespace

CoefficientSet load_coefficient_set_json(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");
    static const char* known[] = {"T",   "H11", "H12", "H13", "H21", "H22",
                                  "H23", "H31", "H32", "H33", "h22"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("unknown config field '" + it.key() + "'");
    }
    CoefficientSet c;
    c.T = j.at("T").get<double>();
    if (!(c.T > 0.0) || !std::isfinite(c.T)) throw ConfigError("T must be a positive number");
    c.H11 = fn_from_json(j.at("H11"), "H11", c.T);
    c.H12 = fn_from_json(j.at("H12"), "H12", c.T);
    c.H13 = fn_from_json(j.at("H13"), "H13", c.T);
    c.H21 = fn_from_json(j.at("H21"), "H21", c.T);
    c.H22 = fn_from_json(j.at("H22"), "H22", c.T);
    c.H31 = fn_from_json(j.at("H31"), "H31", c.T);
    c.H32 = fn_from_json(j.at("H32"), "H32", c.T);
    c.H33 = fn_from_json(j.at("H33"), "H33", c.T);
    c.h22 = fn_from_json(j.at("h22"), "h22", c.T);
    if (j.contains("H23")) {
        c.H23 = fn_from_json(j.at("H23"), "H23", c.T);
        c.h23_derived = false;
    } else {
        c.h23_derived = true;
    }
    return c;
}

CoefficientSet load_coefficient_set_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return load_coefficient_set_json(ss.str());
}

std::string coefficient_set_to_json(const CoefficientSet& c) {
    json j;
    j["T"] = c.T;
    j["H11"] = fn_to_json(c.H11);
    j["H12"] = fn_to_json(c.H12);
    j["H13"] = fn_to_json(c.H13);
    j["H21"] = fn_to_json(c.H21);
    j["H22"] = fn_to_json(c.H22);
    if (!c.h23_derived) j["H23"] = fn_to_json(c.H23);
    j["H31"] = fn_to_json(c.H31);
    j["H32"] = fn_to_json(c.H32);
    j["H33"] = fn_to_json(c.H33);
    j["h22"] = fn_to_json(c.h22);
    return j.dump(2);
}

}  // namespace riccati
