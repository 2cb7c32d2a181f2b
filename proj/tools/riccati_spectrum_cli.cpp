// Command-line front end: validate / chain / spectrum / eigenfunction /
// bounds / classify / example8 / oracle.
//
// Exit codes: 0 success, 1 usage or parse error, 2 validation failure,
// 3 acceptance/oracle failure, 4 numerical failure.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "riccati/fbsde.hpp"
#include "riccati/parallel.hpp"
#include "riccati/reference_systems.hpp"
#include "riccati/spectrum.hpp"

using namespace riccati;

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fputs(content.c_str(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << content;
}

struct CommonOpts {
    std::string config;
    std::string out;
    std::string format = "csv";
    double rtol = 1e-10;
    double atol = 1e-12;
    double switch_threshold = 1.0;
    double floor_value = std::numeric_limits<double>::quiet_NaN();  // NaN: default -T
    double tol = 1e-9;
    int grid_n = kDefaultGridN;

    IntegratorOptions integ() const {
        IntegratorOptions io;
        io.rtol = rtol;
        io.atol = atol;
        io.switch_threshold = switch_threshold;
        if (!std::isnan(floor_value)) io.floor = floor_value;
        return io;
    }
    SpectrumOptions spectrum() const {
        SpectrumOptions so;
        so.root_tol = tol;
        so.grid_n = grid_n;
        so.chain.integ = integ();
        return so;
    }
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_config = true) {
    if (with_config)
        cmd->add_option("--config", o.config, "config JSON path or built-in name")->required();
    cmd->add_option("--out", o.out, "output file (default: stdout)");
    cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--rtol", o.rtol)->check(CLI::PositiveNumber);
    cmd->add_option("--atol", o.atol)->check(CLI::PositiveNumber);
    cmd->add_option("--switch-threshold", o.switch_threshold)->check(CLI::PositiveNumber);
    cmd->add_option("--floor", o.floor_value, "integration floor (default -T)");
    cmd->add_option("--tol", o.tol)->check(CLI::PositiveNumber);
    cmd->add_option("--grid-n", o.grid_n)->check(CLI::Range(2, 1 << 22));
}

int run_validate(const CommonOpts& o) {
    CoefficientSet c = resolve_config(o.config);
    ValidationReport r = validate(c, o.grid_n);
    nlohmann::json j;
    j["beta"] = r.beta;
    j["lambda_b"] = r.lambda_b;
    j["structural_ok"] = r.structural_ok;
    j["all_eigen_condition_ok"] = r.all_eigen_condition_ok;
    j["grid_size"] = r.grid_size;
    nlohmann::json v = nlohmann::json::array();
    for (const auto& viol : r.violations)
        v.push_back({{"t", viol.t}, {"constraint", viol.constraint}, {"magnitude", viol.magnitude}});
    j["violations"] = v;
    write_output(o.out, j.dump(2) + "\n");
    return r.structural_ok ? 0 : 2;
}

int run_chain_cmd(const CommonOpts& o, double lambda, int max_depth, int j) {
    CoefficientSet c = resolve_config(o.config);
    ChainOptions co;
    co.integ = o.integ();
    co.max_depth = max_depth;
    if (j > 0) {
        ChainTime ct = chain_time(c, lambda, j, co);
        nlohmann::json out;
        out["lambda"] = lambda;
        out["j"] = j;
        if (ct.t)
            out["t"] = *ct.t;
        else
            out["t"] = nullptr;
        out["below_zero"] = ct.below_zero;
        out["pure"] = ct.pure;
        write_output(o.out, out.dump(2) + "\n");
        return 0;
    }
    BlowupChain ch = compute_chain(c, lambda, co);
    write_output(o.out, ch.to_json() + "\n");
    return 0;
}

int run_spectrum(const CommonOpts& o, double lambda_max, std::optional<double> lambda_min) {
    CoefficientSet c = resolve_config(o.config);
    require_valid(c, o.grid_n);
    SpectrumOptions so = o.spectrum();
    so.lambda_min = lambda_min;
    auto eigs = enumerate_eigenvalues(c, lambda_max, so);
    if (o.format == "json") {
        write_output(o.out, spectrum_report_json(c, eigs, so) + "\n");
    } else {
        write_output(o.out, spectrum_to_csv(eigs));
        if (!o.out.empty() && o.out != "-")
            write_output(o.out + ".chains.json", spectrum_report_json(c, eigs, so) + "\n");
    }
    return 0;
}

int run_eigenfunction(const CommonOpts& o, double lambda, int paths, int steps,
                      std::uint64_t seed, double y0, bool per_path) {
    CoefficientSet c = resolve_config(o.config);
    SpectrumOptions so = o.spectrum();
    // refine the defect root near the requested lambda, then simulate
    double w = std::max(0.05, 1e-3 * std::fabs(lambda));
    Eigenvalue eig = solve_eigenvalue(c, {lambda - w, lambda + w}, RootSpec::defect_root(),
                                      so.root_tol, so);
    SimulationResult sim = simulate_eigenfunction(c, eig, steps, paths, seed, y0, so);
    write_output(o.out, sim.to_csv_mean());
    if (per_path && !o.out.empty() && o.out != "-") {
        for (int p = 0; p < paths; ++p)
            write_output(o.out + ".path" + std::to_string(p) + ".csv", sim.to_csv_path(p));
    }
    return 0;
}

int run_bounds(const CommonOpts& o, int m, double under22) {
    CoefficientSet c = resolve_config(o.config);
    PeriodBounds b = period_bounds(c, m, under22, o.spectrum());
    nlohmann::json j;
    j["m"] = b.m;
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    j["H_under_22"] = b.H_under_22;
    j["consistent"] = b.consistent;
    write_output(o.out, j.dump(2) + "\n");
    return 0;
}

int run_classify(const CommonOpts& o, double lambda, int m) {
    CoefficientSet c = resolve_config(o.config);
    PeriodClass pc = classify_period(c, lambda, m, o.spectrum());
    PeriodBounds b = period_bounds(c, m, std::numeric_limits<double>::quiet_NaN(), o.spectrum());
    nlohmann::json j;
    j["lambda"] = lambda;
    j["m"] = m;
    j["class"] = to_string(pc);
    j["lower"] = b.lower;
    j["upper"] = b.upper;
    write_output(o.out, j.dump(2) + "\n");
    return 0;
}

int run_example8_cmd(const CommonOpts& o) {
    Example8Report rep = run_example8(o.integ());
    write_output(o.out, rep.to_json() + "\n");
    return 0;
}

// integrator-vs-closed-form sweep over random constant tuples
int run_oracle(const CommonOpts& o, int cases, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ua(-2.0, 2.0), ub(0.1, 3.0), ut(0.3, 1.5);
    double max_rel = 0.0, max_blowup = 0.0;
    int value_checks = 0, blowup_checks = 0;
    for (int i = 0; i < cases; ++i) {
        double a = ua(gen), b = ub(gen), cq = ub(gen), tb = ut(gen);
        CoefficientSet c;
        c.T = tb;
        c.H11 = CoefficientFn::constant(b);
        c.H12 = CoefficientFn::constant(0.0);
        c.H13 = CoefficientFn::constant(0.0);
        c.H21 = CoefficientFn::constant(a / 2.0);
        c.H22 = CoefficientFn::constant(cq);
        c.H31 = CoefficientFn::constant(0.0);
        c.H32 = CoefficientFn::constant(0.0);
        c.H33 = CoefficientFn::constant(-1.0);
        c.h22 = CoefficientFn::constant(-1.0);
        c.h23_derived = true;
        auto bt = closed_form_blowup_time(a, b, cq, tb);
        IntegratorOptions io = o.integ();
        io.floor = std::min(tb - 3.0, bt ? *bt - 0.1 : 0.0);
        RiccatiSolution sol = integrate_primal(c, 0.0, tb, 0.0, io);
        double disc = 4.0 * b * cq - a * a;
        for (int s = 1; s <= 20; ++s) {
            double t = tb - (tb - (bt ? *bt : *io.floor)) * s / 21.0;
            if (disc > 0.0) {
                double arg = std::atan(a / std::sqrt(disc)) + 0.5 * std::sqrt(disc) * (tb - t);
                if (arg > std::acos(-1.0) / 2.0 - 0.1) continue;
            } else if (bt && t < *bt + 0.1 * (tb - *bt)) {
                continue;
            }
            if (!sol.covers(t)) continue;
            double want = closed_form_constant_riccati(a, b, cq, tb, t);
            double got = sol.eval_direct(t);
            double rel = std::fabs(got - want) / std::max(1e-12, std::fabs(want));
            max_rel = std::max(max_rel, rel);
            ++value_checks;
        }
        if (bt) {
            if (sol.termination.kind == TerminationEvent::Kind::BlowUpPlusInf ||
                sol.termination.kind == TerminationEvent::Kind::BlowUpMinusInf) {
                max_blowup = std::max(max_blowup, std::fabs(sol.termination.t - *bt));
                ++blowup_checks;
            } else {
                max_blowup = std::numeric_limits<double>::infinity();
            }
        }
    }
    nlohmann::json j;
    j["cases"] = cases;
    j["value_checks"] = value_checks;
    j["blowup_checks"] = blowup_checks;
    j["max_rel_error"] = max_rel;
    j["max_blowup_error"] = max_blowup;
    bool ok = cases == 0 || (max_rel <= 1e-8 && max_blowup <= 1e-8);
    j["ok"] = ok;
    write_output(o.out, j.dump(2) + "\n");
    return ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Eigenvalue solver for 1-D stochastic Hamiltonian boundary problems"};
    app.require_subcommand(1);

    CommonOpts o;
    double lambda = 0.0, lambda_max = 0.0, under22 = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> lambda_min;
    double lambda_min_val = 0.0;
    int m = 1, j_depth = 256, paths = 64, steps = 4096, cases = 120;
    std::uint64_t seed = 1;
    double y0 = 1.0;
    bool per_path = false;

    auto* v = app.add_subcommand("validate", "structural checks, beta, lambda_b");
    add_common(v, o);

    int j_query = 0;
    auto* ch = app.add_subcommand("chain", "blow-up chain at one lambda");
    add_common(ch, o);
    ch->add_option("--lambda", lambda)->required();
    ch->add_option("--max-depth", j_depth);
    ch->add_option("--j", j_query, "report t_j(lambda) instead of the full chain");

    auto* sp = app.add_subcommand("spectrum", "enumerate eigenvalues up to lambda-max");
    add_common(sp, o);
    sp->add_option("--lambda-max", lambda_max)->required();
    auto* lmin_opt = sp->add_option("--lambda-min", lambda_min_val, "scan floor (default lambda_b)");

    auto* ef = app.add_subcommand("eigenfunction", "Monte-Carlo eigenfunction paths");
    add_common(ef, o);
    ef->add_option("--lambda", lambda)->required();
    ef->add_option("--paths", paths)->check(CLI::PositiveNumber);
    ef->add_option("--steps", steps)->check(CLI::PositiveNumber);
    ef->add_option("--seed", seed);
    ef->add_option("--y0", y0);
    ef->add_flag("--per-path", per_path, "also write one CSV per path");

    auto* bo = app.add_subcommand("bounds", "period bounds for index m");
    add_common(bo, o);
    bo->add_option("--m", m)->required()->check(CLI::PositiveNumber);
    bo->add_option("--H-under-22", under22);

    auto* cl = app.add_subcommand("classify", "statistic-period classification");
    add_common(cl, o);
    cl->add_option("--lambda", lambda)->required();
    cl->add_option("--m", m)->required()->check(CLI::PositiveNumber);

    auto* e8 = app.add_subcommand("example8", "worked piecewise example");
    add_common(e8, o, false);

    auto* orc = app.add_subcommand("oracle", "integrator vs closed-form sweep");
    add_common(orc, o, false);
    orc->add_option("--cases", cases)->check(CLI::NonNegativeNumber);
    orc->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    // under22 keeps NaN as the auto-search sentinel; everything else must be finite
    bool finite_ok = !std::isinf(under22);
    for (double x : {lambda, lambda_max, y0, lambda_min_val, o.rtol, o.atol, o.tol})
        finite_ok = finite_ok && std::isfinite(x);
    if (!finite_ok) {
        std::fprintf(stderr, "error: non-finite numeric option\n");
        return 1;
    }

    try {
        if (app.got_subcommand(v)) return run_validate(o);
        if (app.got_subcommand(ch)) return run_chain_cmd(o, lambda, j_depth, j_query);
        if (app.got_subcommand(sp)) {
            if (lmin_opt->count()) lambda_min = lambda_min_val;
            return run_spectrum(o, lambda_max, lambda_min);
        }
        if (app.got_subcommand(ef)) return run_eigenfunction(o, lambda, paths, steps, seed, y0, per_path);
        if (app.got_subcommand(bo)) return run_bounds(o, m, under22);
        if (app.got_subcommand(cl)) return run_classify(o, lambda, m);
        if (app.got_subcommand(e8)) return run_example8_cmd(o);
        if (app.got_subcommand(orc)) return run_oracle(o, cases, seed);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 4;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 4;
    }
    return 1;
}
