#include "riccati/chain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include <json.hpp>

namespace riccati {

const char* to_string(ChainTermination t) {
    switch (t) {
        case ChainTermination::CrossedZero: return "crossed_zero";
        case ChainTermination::DefectAtZero: return "defect_at_zero";
        case ChainTermination::ZeroReturnAtInterior: return "zero_return_at_interior";
        case ChainTermination::DepthExceeded: return "depth_exceeded";
    }
    return "?";
}

namespace {

// Dual-representation value of a segment at t = 0. Sentinels stand in for a
// diverging dual representation (blow-up boundary at or above 0).
double defect_at_zero(const RiccatiSolution& seg, Repr* repr_out) {
    if (repr_out) *repr_out = Repr::Direct;
    if (!seg.covers(0.0)) {
        return seg.termination.kind == TerminationEvent::Kind::BlowUpMinusInf ? -kDefectSentinel
                                                                              : kDefectSentinel;
    }
    auto [v, r] = seg.eval_raw(0.0);
    if (repr_out) *repr_out = r;
    bool stored_is_dual = (seg.equation == Equation::Dual) == (r == Repr::Direct);
    if (stored_is_dual) return v;
    if (v == 0.0) {
        return seg.termination.kind == TerminationEvent::Kind::BlowUpMinusInf ? -kDefectSentinel
                                                                              : kDefectSentinel;
    }
    return std::clamp(1.0 / v, -kDefectSentinel, kDefectSentinel);
}

}  // namespace

BlowupChain compute_chain(const CoefficientSet& c, double lambda, const ChainOptions& opts) {
    BlowupChain chain;
    chain.lambda = lambda;
    chain.breakpoints.push_back(c.T);

    double t_prev = c.T;
    double acc_err = 0.0;  // breakpoint errors accumulate along the chain
    for (int j = 1; j <= opts.max_depth; ++j) {
        Equation eq = (j % 2 == 1) ? Equation::Primal : Equation::Dual;
        IntegratorOptions io = opts.integ;
        io.terminate_on_zero_return = !opts.defect_extension;
        RiccatiSolution seg = (eq == Equation::Primal)
                                  ? integrate_primal(c, lambda, t_prev, 0.0, io)
                                  : integrate_dual(c, lambda, t_prev, 0.0, io);
        chain.segment_kinds.push_back(eq);
        if (seg.zero_return_time) chain.zero_return_seen = true;
        if (seg.primal_zero_anomaly) chain.anomaly = true;
        chain.segments.push_back(std::move(seg));
        const RiccatiSolution& s = chain.segments.back();
        const TerminationEvent& ev = s.termination;
        double zero_tol = acc_err + ev.localization_error + 1e-12;
        acc_err += ev.localization_error;
        chain.zero_tol = zero_tol;

        switch (ev.kind) {
            case TerminationEvent::Kind::BlowUpPlusInf:
            case TerminationEvent::Kind::BlowUpMinusInf: {
                double ts = ev.t;
                if (ts > zero_tol) {
                    chain.breakpoints.push_back(ts);
                    t_prev = ts;
                    continue;
                }
                bool eigen_cfg = eq == Equation::Primal &&
                                 ev.kind == TerminationEvent::Kind::BlowUpPlusInf &&
                                 std::fabs(ts) <= zero_tol;
                if (eigen_cfg) {
                    // primal escape exactly at 0: the dual representation
                    // vanishes there, an eigenvalue configuration
                    chain.termination = ChainTermination::DefectAtZero;
                    chain.defect = 0.0;
                    chain.defect_repr = Repr::Reciprocal;
                    return chain;
                }
                if (opts.defect_extension) {
                    chain.termination = ChainTermination::DefectAtZero;
                    chain.defect = defect_at_zero(s, &chain.defect_repr);
                    return chain;
                }
                chain.termination = ChainTermination::CrossedZero;
                chain.crossed_index = j;
                chain.crossed_time = ts;
                return chain;
            }
            case TerminationEvent::Kind::ZeroReturn: {
                double ts = ev.t;
                if (s.primal_zero_anomaly || ts > zero_tol) {
                    chain.termination = ChainTermination::ZeroReturnAtInterior;
                    chain.zero_return_t = ts;
                    return chain;
                }
                if (std::fabs(ts) <= zero_tol) {
                    chain.termination = ChainTermination::DefectAtZero;
                    chain.defect = 0.0;
                    chain.defect_repr = Repr::Direct;
                    return chain;
                }
                // returned to zero strictly below 0: alive at 0, report the dense value
                chain.termination = ChainTermination::DefectAtZero;
                chain.defect = defect_at_zero(s, &chain.defect_repr);
                return chain;
            }
            case TerminationEvent::Kind::ReachedTimeLimit: {
                chain.termination = ChainTermination::DefectAtZero;
                chain.defect = defect_at_zero(s, &chain.defect_repr);
                return chain;
            }
        }
    }
    chain.termination = ChainTermination::DepthExceeded;
    return chain;
}

double BlowupChain::k_at(double t) const {
    for (const auto& seg : segments) {
        if (seg.covers(t)) {
            auto [v, r] = seg.eval_raw(t);
            bool stored_is_primal = (seg.equation == Equation::Primal) == (r == Repr::Direct);
            return stored_is_primal ? v : 1.0 / v;
        }
    }
    throw DomainError("k requested outside every chain segment");
}

double BlowupChain::kt_at(double t) const {
    for (const auto& seg : segments) {
        if (seg.covers(t)) {
            auto [v, r] = seg.eval_raw(t);
            bool stored_is_dual = (seg.equation == Equation::Dual) == (r == Repr::Direct);
            return stored_is_dual ? v : 1.0 / v;
        }
    }
    throw DomainError("k-tilde requested outside every chain segment");
}

std::string BlowupChain::to_json() const {
    nlohmann::json j;
    j["lambda"] = lambda;
    j["breakpoints"] = breakpoints;
    std::vector<std::string> kinds;
    for (Equation e : segment_kinds) kinds.emplace_back(to_string(e));
    j["kinds"] = kinds;
    nlohmann::json term;
    term["kind"] = to_string(termination);
    switch (termination) {
        case ChainTermination::CrossedZero:
            term["index"] = crossed_index;
            term["t"] = crossed_time;
            break;
        case ChainTermination::DefectAtZero:
            term["defect"] = defect;
            term["repr"] = to_string(defect_repr);
            break;
        case ChainTermination::ZeroReturnAtInterior:
            term["t_star"] = zero_return_t;
            break;
        case ChainTermination::DepthExceeded:
            break;
    }
    j["termination"] = term;
    j["zero_return_seen"] = zero_return_seen;
    if (offset_n) j["offset_n"] = *offset_n;
    return j.dump(2);
}

ChainTime chain_time(const CoefficientSet& c, double lambda, int j, const ChainOptions& opts) {
    if (j < 1) throw ConfigError("chain_time: j must be >= 1");
    ChainOptions o = opts;
    o.max_depth = j;
    o.defect_extension = false;
    BlowupChain ch = compute_chain(c, lambda, o);
    ChainTime r;
    r.pure = !ch.zero_return_seen && !ch.anomaly &&
             ch.termination != ChainTermination::ZeroReturnAtInterior;
    if (ch.depth() >= j) {
        r.t = ch.breakpoints[static_cast<std::size_t>(j)];
        r.below_zero = *r.t <= 0.0;
        return r;
    }
    if (ch.termination == ChainTermination::CrossedZero && ch.crossed_index == j) {
        r.t = ch.crossed_time;
        r.below_zero = true;
        return r;
    }
    if (ch.termination == ChainTermination::DefectAtZero && ch.depth() == j - 1 &&
        std::fabs(ch.defect) <= 1e-9) {
        // landing exactly at zero counts as t_j = 0
        r.t = 0.0;
        r.below_zero = true;
        return r;
    }
    r.below_zero = true;  // chain ended before depth j, so t_j lies below zero
    return r;
}

double eigen_defect(const CoefficientSet& c, double lambda, const ChainOptions& opts) {
    ChainOptions o = opts;
    o.defect_extension = false;
    BlowupChain ch = compute_chain(c, lambda, o);
    if (ch.termination != ChainTermination::DefectAtZero)
        throw UndefinedDefect(std::string("chain terminated with ") + to_string(ch.termination));
    return ch.defect;
}

}  // namespace riccati
