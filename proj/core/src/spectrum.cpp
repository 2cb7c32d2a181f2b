#include "riccati/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "riccati/parallel.hpp"

namespace riccati {

const char* to_string(Eigenvalue::Method m) {
    return m == Eigenvalue::Method::ChainRoot ? "chain_root" : "defect_root";
}

const char* to_string(PeriodClass p) {
    switch (p) {
        case PeriodClass::GreaterThanM: return "greater_than_m";
        case PeriodClass::LessThanM: return "less_than_m";
        case PeriodClass::Inconclusive: return "inconclusive";
    }
    return "?";
}

namespace {

constexpr double kUnreached = -1e306;

struct RootEval {
    double f = 0.0;
    bool usable = false;  // finite value suitable for secant steps
    bool pure = true;     // no zero-return interference
};

// t_j(lambda) read off one full-depth chain
RootEval chain_time_from(const BlowupChain& ch, int j) {
    RootEval r;
    r.pure = !ch.zero_return_seen && !ch.anomaly &&
             ch.termination != ChainTermination::ZeroReturnAtInterior;
    if (ch.depth() >= j) {
        r.f = ch.breakpoints[static_cast<std::size_t>(j)];
        r.usable = true;
    } else if (ch.termination == ChainTermination::CrossedZero && ch.crossed_index == j) {
        r.f = ch.crossed_time;
        r.usable = true;
    } else if (ch.termination == ChainTermination::DefectAtZero && ch.depth() == j - 1 &&
               std::fabs(ch.defect) <= 1e-9) {
        r.f = 0.0;
        r.usable = true;
    } else {
        r.f = kUnreached;
        r.usable = false;
    }
    return r;
}

RootEval eval_root(const CoefficientSet& c, double lambda, const RootSpec& root,
                   const SpectrumOptions& opts, BlowupChain* chain_out = nullptr) {
    ChainOptions co = opts.chain;
    if (root.kind == RootSpec::Kind::ChainTime) {
        co.defect_extension = false;
        co.max_depth = std::max(co.max_depth, root.j);
        BlowupChain ch = compute_chain(c, lambda, co);
        RootEval r = chain_time_from(ch, root.j);
        if (chain_out) *chain_out = std::move(ch);
        return r;
    }
    co.defect_extension = true;
    BlowupChain ch = compute_chain(c, lambda, co);
    RootEval r;
    r.pure = !ch.zero_return_seen && !ch.anomaly;
    if (ch.termination == ChainTermination::DefectAtZero) {
        r.f = ch.defect;
        r.usable = std::fabs(ch.defect) < kDefectSentinel;
    } else {
        r.f = kUnreached;
        r.usable = false;
    }
    if (chain_out) *chain_out = std::move(ch);
    return r;
}

int sign_of(double x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

}  // namespace

std::vector<Bracket> bracket_scan(const CoefficientSet& c, int j, double lambda_lo,
                                  double lambda_hi, int n_scan, const SpectrumOptions& opts) {
    if (!(lambda_hi > lambda_lo) || lambda_lo <= 0.0)
        throw ConfigError("bracket_scan: need 0 < lambda_lo < lambda_hi");
    if (n_scan < 2) throw ConfigError("bracket_scan: n_scan must be >= 2");
    double ratio = std::pow(lambda_hi / lambda_lo, 1.0 / (n_scan - 1));
    std::vector<double> grid;
    for (int i = 0; i < n_scan; ++i)
        grid.push_back(i + 1 == n_scan ? lambda_hi : lambda_lo * std::pow(ratio, i));

    RootSpec root = RootSpec::chain_time_root(j);
    std::vector<RootEval> evals(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { evals[i] = eval_root(c, grid[i], root, opts); });
    std::vector<Bracket> out;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (evals[i - 1].pure && evals[i].pure && sign_of(evals[i - 1].f) != sign_of(evals[i].f))
            out.push_back({grid[i - 1], grid[i]});
    }
    return out;
}

Eigenvalue solve_eigenvalue(const CoefficientSet& c, const Bracket& bracket, RootSpec root,
                            double tol, const SpectrumOptions& opts) {
    double lo = bracket.lo, hi = bracket.hi;
    if (!(hi >= lo)) throw BracketInvalid("bracket: hi < lo");

    auto finalize = [&](double lam, double blo, double bhi) {
        BlowupChain ch;
        ChainOptions co = opts.chain;
        co.defect_extension = true;
        ch = compute_chain(c, lam, co);
        if (ch.termination != ChainTermination::DefectAtZero ||
            std::fabs(ch.defect) > opts.defect_tol) {
            throw StructureChangedInsideBracket(
                "bracket did not converge to an eigenvalue configuration");
        }
        Eigenvalue e;
        e.lambda = lam;
        e.bracket_lo = blo;
        e.bracket_hi = bhi;
        e.defect_residual = ch.defect;
        e.chain = std::move(ch);
        e.method = root.kind == RootSpec::Kind::ChainTime ? Eigenvalue::Method::ChainRoot
                                                          : Eigenvalue::Method::DefectRoot;
        return e;
    };

    if (lo == hi) return finalize(lo, lo, hi);

    RootEval flo = eval_root(c, lo, root, opts);
    RootEval fhi = eval_root(c, hi, root, opts);
    if (sign_of(flo.f) == sign_of(fhi.f))
        throw BracketInvalid("root function has the same sign at both bracket endpoints");

    double best = 0.5 * (lo + hi);
    for (int it = 0; it < 240; ++it) {
        double width = hi - lo;
        double mid = 0.5 * (lo + hi);
        if (width <= tol * std::max(1.0, std::fabs(mid))) {
            best = mid;
            break;
        }
        double cand = mid;
        if (flo.usable && fhi.usable && flo.f != fhi.f && std::fabs(flo.f) < 1e300 &&
            std::fabs(fhi.f) < 1e300) {
            double s = hi - fhi.f * (hi - lo) / (fhi.f - flo.f);
            double margin = 0.05 * width;
            if (s > lo + margin && s < hi - margin) cand = s;
        }
        RootEval fc = eval_root(c, cand, root, opts);
        if (fc.usable && std::fabs(fc.f) <= tol) {
            best = cand;
            break;
        }
        if (sign_of(fc.f) == 0) {
            best = cand;
            break;
        }
        if (sign_of(fc.f) == sign_of(flo.f)) {
            lo = cand;
            flo = fc;
        } else {
            hi = cand;
            fhi = fc;
        }
        if (sign_of(flo.f) == sign_of(fhi.f))
            throw BracketInvalid("sign change lost during refinement");
        best = 0.5 * (lo + hi);
    }
    return finalize(best, lo, hi);
}

std::vector<Eigenvalue> enumerate_eigenvalues(const CoefficientSet& c, double lambda_max,
                                              const SpectrumOptions& opts) {
    double lb = lambda_b(c, opts.grid_n);
    double lambda_lo = opts.lambda_min.value_or(lb * (1.0 + 1e-6));
    if (!(lambda_max > lambda_lo)) return {};

    std::vector<Eigenvalue> found;
    // refine tighter than the dedup window so both root routes coincide
    const double tol = std::min(opts.root_tol, 0.2 * opts.dedup_rel);

    // one full-depth chain per endpoint gives every t_j sign at once
    ChainOptions co = opts.chain;
    co.defect_extension = false;
    BlowupChain ch_lo = compute_chain(c, lambda_lo, co);
    BlowupChain ch_hi = compute_chain(c, lambda_max, co);
    bool endpoints_pure = !ch_lo.zero_return_seen && !ch_hi.zero_return_seen &&
                          ch_lo.termination != ChainTermination::ZeroReturnAtInterior &&
                          ch_hi.termination != ChainTermination::ZeroReturnAtInterior;

    if (endpoints_pure) {
        for (int j = 1; j <= opts.chain.max_depth; j += 2) {
            RootEval rlo = chain_time_from(ch_lo, j);
            RootEval rhi = chain_time_from(ch_hi, j);
            if (sign_of(rhi.f) <= 0) break;   // no root for this or any deeper j
            if (sign_of(rlo.f) >= 0) continue;  // root below the scan floor
            try {
                Eigenvalue e = solve_eigenvalue(c, {lambda_lo, lambda_max},
                                                RootSpec::chain_time_root(j), tol, opts);
                found.push_back(std::move(e));
            } catch (const Error&) {
                // structure changed inside: the defect sweep below still covers it
            }
        }
    }

    // defect-sign sweep on a geometric grid (also catches zero-return regimes)
    std::vector<double> grid;
    for (double lam = lambda_lo; lam < lambda_max; lam *= opts.scan_ratio) grid.push_back(lam);
    grid.push_back(lambda_max);
    std::vector<RootEval> probes(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) {
        probes[i] = eval_root(c, grid[i], RootSpec::defect_root(), opts);
    });
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (sign_of(probes[i - 1].f) == sign_of(probes[i].f)) continue;
        try {
            Eigenvalue e = solve_eigenvalue(c, {grid[i - 1], grid[i]}, RootSpec::defect_root(),
                                            tol, opts);
            found.push_back(std::move(e));
        } catch (const Error&) {
            // sign change across a pole of the defect, not a root
        }
    }

    std::sort(found.begin(), found.end(),
              [](const Eigenvalue& a, const Eigenvalue& b) { return a.lambda < b.lambda; });
    std::vector<Eigenvalue> out;
    for (auto& e : found) {
        if (!out.empty() &&
            std::fabs(e.lambda - out.back().lambda) <=
                opts.dedup_rel * std::max(1.0, std::fabs(e.lambda))) {
            // same eigenvalue reached twice; keep the tighter residual
            if (std::fabs(e.defect_residual) < std::fabs(out.back().defect_residual))
                out.back() = std::move(e);
            continue;
        }
        out.push_back(std::move(e));
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].order_index = static_cast<int>(i) + 1;
        // depth-to-index offset: the landing segment index must be odd
        int depth = out[i].chain.depth();
        if ((depth + 1) % 2 == 1) {
            int dual_blowups = depth / 2;
            int n = dual_blowups - static_cast<int>(i);
            if (n >= 0) out[i].chain.offset_n = n;
        }
    }
    return out;
}

GrowthRatios growth_ratios(const std::vector<Eigenvalue>& eigs) {
    if (eigs.size() < 2) throw ConfigError("growth_ratios: need at least 2 eigenvalues");
    GrowthRatios g;
    int max_m = eigs.back().order_index;
    int tail_from = std::max(1, (max_m + 1) / 2);
    g.tail_min = std::numeric_limits<double>::infinity();
    g.tail_max = -std::numeric_limits<double>::infinity();
    for (const auto& e : eigs) {
        double m = e.order_index;
        double r = e.lambda / (m * m);
        g.ratios.emplace_back(e.order_index, r);
        if (e.order_index >= tail_from) {
            g.tail_min = std::min(g.tail_min, r);
            g.tail_max = std::max(g.tail_max, r);
        }
    }
    return g;
}

namespace {

bool under22_matrix_passes(const Envelopes& e, double under22) {
    double h[3][3] = {{e.H11_hi, e.H21_hi, e.absH13_hi},
                      {e.H21_hi, under22, e.H23_hi},
                      {e.absH13_hi, e.H23_hi, e.H33_lo}};
    return constant_matrix_beta(h) > 0.0;
}

}  // namespace

PeriodBounds period_bounds(const CoefficientSet& c, int m, double H_under_22,
                           const SpectrumOptions& opts) {
    if (m < 1) throw ConfigError("period_bounds: m must be >= 1");
    Envelopes e = envelopes(c, opts.grid_n);
    double under = H_under_22;
    if (std::isnan(under)) {
        under = e.H22_lo;
    } else if (!(under < e.H22_hi)) {
        throw ConfigError("H_under_22 must lie below the H22 upper envelope");
    }
    // deepen until the auxiliary constant matrix passes the monotonicity check
    int doublings = 0;
    while (!under22_matrix_passes(e, under)) {
        under *= 2.0;
        if (++doublings > 40) throw EnvelopeInfeasible("no admissible H_under_22 found");
    }
    const double pi = std::numbers::pi;
    const double mm = static_cast<double>(m) * m;
    PeriodBounds b;
    b.m = m;
    b.envelopes_used = e;
    b.H_under_22 = under;
    b.upper = 4.0 * pi * pi * mm / (-e.H11_lo * e.h22_hi * c.T * c.T);
    b.lower = (e.H22_hi - under) / e.h22_lo + pi * pi * mm / (-2.0 * e.H11_hi * e.h22_lo * c.T * c.T);
    b.consistent = b.lower <= b.upper;
    return b;
}

PeriodClass classify_period(const CoefficientSet& c, double lambda, int m,
                            const SpectrumOptions& opts) {
    PeriodBounds b = period_bounds(c, m, std::numeric_limits<double>::quiet_NaN(), opts);
    if (lambda > b.upper) return PeriodClass::GreaterThanM;
    if (lambda < b.lower) return PeriodClass::LessThanM;
    return PeriodClass::Inconclusive;
}

std::string spectrum_to_csv(const std::vector<Eigenvalue>& eigs) {
    std::string out = "order_index,lambda,bracket_lo,bracket_hi,defect,chain_depth\n";
    char buf[256];
    for (const auto& e : eigs) {
        std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g,%.17g,%d\n", e.order_index, e.lambda,
                      e.bracket_lo, e.bracket_hi, e.defect_residual, e.chain.depth());
        out += buf;
    }
    return out;
}

std::string spectrum_to_json(const std::vector<Eigenvalue>& eigs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : eigs) {
        nlohmann::json j;
        j["order_index"] = e.order_index;
        j["lambda"] = e.lambda;
        j["bracket"] = {e.bracket_lo, e.bracket_hi};
        j["defect"] = e.defect_residual;
        j["method"] = to_string(e.method);
        j["chain"] = nlohmann::json::parse(e.chain.to_json());
        arr.push_back(std::move(j));
    }
    return arr.dump(2);
}

std::string spectrum_report_json(const CoefficientSet& c, const std::vector<Eigenvalue>& eigs,
                                 const SpectrumOptions& opts) {
    nlohmann::json j;
    j["lambda_b"] = lambda_b(c, opts.grid_n);
    j["below_lambda_b"] =
        check_all_eigen_condition(c, opts.grid_n) ? "certified_empty" : "unknown";
    j["eigenvalues"] = nlohmann::json::parse(spectrum_to_json(eigs));
    return j.dump(2);
}

}  // namespace riccati
