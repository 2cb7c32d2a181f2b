#include "riccati/reference_systems.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "riccati/spectrum.hpp"

namespace riccati {

const char* kDiagonalSystemJson = R"({
  "T": 1.0,
  "H11": {"kind": "constant", "values": [1.0]},
  "H12": {"kind": "constant", "values": [0.0]},
  "H13": {"kind": "constant", "values": [0.0]},
  "H21": {"kind": "constant", "values": [0.0]},
  "H22": {"kind": "constant", "values": [-1.0]},
  "H31": {"kind": "constant", "values": [0.0]},
  "H32": {"kind": "constant", "values": [0.0]},
  "H33": {"kind": "constant", "values": [-1.0]},
  "h22": {"kind": "constant", "values": [-1.0]}
})";

CoefficientSet diagonal_system() { return load_coefficient_set_json(kDiagonalSystemJson); }

namespace {

// constant part of the worked example, on an arbitrary horizon
CoefficientSet example8_matrix(double T, CoefficientFn h22) {
    CoefficientSet c;
    c.T = T;
    c.H11 = CoefficientFn::constant(3.0);
    c.H12 = CoefficientFn::constant(0.0);
    c.H13 = CoefficientFn::constant(1.0);
    c.H21 = CoefficientFn::constant(0.0);
    c.H22 = CoefficientFn::constant(-4.0);
    c.H31 = CoefficientFn::constant(1.0);
    c.H32 = CoefficientFn::constant(2.0);
    c.H33 = CoefficientFn::constant(-2.0);
    c.h22 = std::move(h22);
    c.h23_derived = true;  // H23 = -H33*H13 = 2
    return c;
}

}  // namespace

Example8 example8_system(const IntegratorOptions& opts) {
    // T1 is the first zero return of the dual equation started with the
    // ramp perturbation; run it on a horizon long enough to contain the root
    // (the ramp bound gives T1 <= 15/28).
    const double pre_T = 15.0 / 28.0;
    CoefficientSet pre = example8_matrix(
        pre_T, CoefficientFn::piecewise_linear({0.0, pre_T}, {10.0 * pre_T - 1.0, -1.0}));
    IntegratorOptions io = opts;
    io.floor = -pre_T;
    RiccatiSolution dual = integrate_dual(pre, 3.0, pre_T, 0.0, io);
    if (dual.termination.kind != TerminationEvent::Kind::ZeroReturn)
        throw Error("worked example: dual zero return not found on the ramp");
    double T1 = pre_T - dual.termination.t;

    const double s11 = std::sqrt(11.0);
    double T2 = (std::numbers::pi / 2.0 - std::atan(1.0 / s11)) * 2.0 / s11;
    double T = T1 + T2;

    Example8 ex;
    ex.T1 = T1;
    ex.T2 = T2;
    ex.system = example8_matrix(
        T, CoefficientFn::piecewise_linear({0.0, T1, T}, {10.0 * T1 - 1.0, -1.0, -1.0}));
    return ex;
}

Example8Report run_example8(const IntegratorOptions& opts) {
    Example8Report rep;
    rep.setup = example8_system(opts);
    const CoefficientSet& c = rep.setup.system;

    ChainOptions co;
    co.integ = opts;
    rep.chain = compute_chain(c, 3.0, co);
    if (rep.chain.depth() >= 1) rep.primal_blowup_t = rep.chain.breakpoints[1];
    if (rep.chain.segments.size() >= 2 &&
        rep.chain.segments[1].termination.kind == TerminationEvent::Kind::ZeroReturn)
        rep.dual_zero_return_t = rep.chain.segments[1].termination.t;

    SpectrumOptions so;
    so.chain = co;
    so.root_tol = 1e-10;
    Eigenvalue eig = solve_eigenvalue(c, {2.75, 3.25}, RootSpec::defect_root(), so.root_tol, so);
    rep.lambda_hat = eig.lambda;
    rep.defect = eig.defect_residual;
    return rep;
}

std::string Example8Report::to_json() const {
    nlohmann::json j;
    j["T1"] = setup.T1;
    j["T2"] = setup.T2;
    j["T"] = setup.T1 + setup.T2;
    j["lambda_hat"] = lambda_hat;
    j["defect"] = defect;
    j["primal_blowup_t"] = primal_blowup_t;
    j["dual_zero_return_t"] = dual_zero_return_t;
    j["chain"] = nlohmann::json::parse(chain.to_json());
    return j.dump(2);
}

CoefficientSet resolve_config(const std::string& name_or_path) {
    if (name_or_path == "diagonal") return diagonal_system();
    if (name_or_path == "example8") return example8_system().system;
    return load_coefficient_set_file(name_or_path);
}

}  // namespace riccati
