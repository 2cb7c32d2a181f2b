#include "riccati/ode.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace riccati {

Equation other(Equation e) { return e == Equation::Primal ? Equation::Dual : Equation::Primal; }

const char* to_string(Equation e) { return e == Equation::Primal ? "primal" : "dual"; }
const char* to_string(Repr r) { return r == Repr::Direct ? "direct" : "reciprocal"; }
const char* to_string(TerminationEvent::Kind k) {
    switch (k) {
        case TerminationEvent::Kind::ReachedTimeLimit: return "reached_time_limit";
        case TerminationEvent::Kind::BlowUpPlusInf: return "blow_up_plus_inf";
        case TerminationEvent::Kind::BlowUpMinusInf: return "blow_up_minus_inf";
        case TerminationEvent::Kind::ZeroReturn: return "zero_return";
    }
    return "?";
}

double primal_rhs(const CoefficientSet& c, double lambda, double t, double k) {
    auto [a, b, cq] = c.primal_abc(t, lambda);
    return -(a * k + b + cq * k * k);
}

double dual_rhs(const CoefficientSet& c, double lambda, double t, double kt) {
    auto [a, b, cq] = c.primal_abc(t, lambda);
    return a * kt + b * kt * kt + cq;
}

double DenseStep::eval(double t) const {
    double th = (t - t0) / (t1 - t0);
    return r1 + th * (r2 + (1.0 - th) * (r3 + th * (r4 + (1.0 - th) * r5)));
}

namespace {

// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
// b - b* (error coefficients)
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// dense-output weights
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct StepResult {
    double y1;
    double err;  // scaled error estimate
    double k7;   // FSAL derivative at (t1, y1)
    DenseStep dense;
};

template <typename F>
StepResult dp45_step(const F& f, double t, double y, double h, double k1, double atol,
                     double rtol) {
    double k2 = f(t + c2 * h, y + h * (a21 * k1));
    double k3 = f(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    double k4 = f(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    double k5 = f(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    double k6 = f(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    double y1 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    double k7 = f(t + h, y1);
    double errsum = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    double sc = atol + rtol * std::max(std::fabs(y), std::fabs(y1));
    StepResult r;
    r.y1 = y1;
    r.err = std::fabs(errsum) / sc;
    r.k7 = k7;
    double ydiff = y1 - y;
    double bspl = h * k1 - ydiff;
    r.dense.t0 = t;
    r.dense.t1 = t + h;
    r.dense.r1 = y;
    r.dense.r2 = ydiff;
    r.dense.r3 = bspl;
    r.dense.r4 = ydiff - h * k7 - bspl;
    r.dense.r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
    return r;
}

// Locate v(t*) = 0 inside an accepted step: bisection on the interpolant,
// then a few Newton corrections with the true ODE slope.
template <typename F>
std::pair<double, double> locate_zero(const DenseStep& d, const F& f, double value_tol,
                                      double rtol, double t_bar) {
    double ta = d.t0, tb = d.t1;  // backward: tb < ta
    double va = d.eval(ta);
    if (va == 0.0) return {ta, 0.0};
    for (int it = 0; it < 200; ++it) {
        double tm = 0.5 * (ta + tb);
        double vm = d.eval(tm);
        if (vm == 0.0) {
            ta = tb = tm;
            break;
        }
        if ((vm > 0) == (va > 0)) {
            ta = tm;
            va = vm;
        } else {
            tb = tm;
        }
        if (std::fabs(ta - tb) <= 2.0 * std::numeric_limits<double>::epsilon() *
                                      std::max(1.0, std::fabs(tm)) &&
            std::fabs(vm) <= value_tol)
            break;
        if (std::fabs(ta - tb) <= std::numeric_limits<double>::epsilon() *
                                      std::max(1.0, std::fabs(tm)))
            break;
    }
    double ts = 0.5 * (ta + tb);
    double slope = 0.0;
    for (int it = 0; it < 3; ++it) {
        double v = d.eval(ts);
        slope = f(ts, v);
        if (slope == 0.0) break;
        double tn = ts - v / slope;
        if (!(tn <= d.t0 && tn >= d.t1)) break;  // keep inside the step
        ts = tn;
    }
    double resid = std::fabs(d.eval(ts));
    double le = (slope != 0.0 ? resid / std::fabs(slope) : resid) +
                rtol * std::fabs(t_bar - ts) +
                4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(ts));
    return {ts, le};
}

RiccatiSolution integrate(const CoefficientSet& c, Equation eq, double lambda, double t_bar,
                          double v0, const IntegratorOptions& opts) {
    const double t_stop = opts.floor.value_or(-c.T);
    if (!(t_bar > t_stop)) throw ConfigError("t_bar must lie above the integration floor");
    if (t_bar > c.T * (1.0 + 1e-12) + 1e-300)
        throw TimeOutOfRange("t_bar above the horizon T");

    RiccatiSolution sol;
    sol.lambda = lambda;
    sol.t_bar = t_bar;
    sol.equation = eq;

    // knots bound step ends so every step sees a smooth right-hand side
    const std::vector<double> knots = c.all_knots();

    double t = t_bar;
    double v = v0;
    Repr repr = Repr::Direct;
    bool armed = std::fabs(v0) > opts.zero_return_deadband;

    // in the reciprocal representation the stored variable obeys the other equation
    auto f_cur = [&](double tt, double vv) {
        bool use_primal = (repr == Repr::Direct) == (eq == Equation::Primal);
        return use_primal ? primal_rhs(c, lambda, tt, vv) : dual_rhs(c, lambda, tt, vv);
    };

    sol.samples.push_back({t, v, repr});

    double k1 = f_cur(t, v);
    double h = -std::max(1e-10, 1e-4 * (t_bar - t_stop));

    auto next_knot_below = [&](double tt) {
        auto it = std::lower_bound(knots.begin(), knots.end(), tt);
        while (it != knots.begin()) {
            --it;
            if (*it < tt - 1e-15 * std::max(1.0, std::fabs(tt))) return *it;
        }
        return -std::numeric_limits<double>::infinity();
    };

    auto finish_event = [&](TerminationEvent::Kind kind, double ts, double le) {
        sol.termination = {kind, ts, 0.0, repr, le};
        sol.samples.push_back({ts, 0.0, repr});
    };

    long nsteps = 0;
    while (true) {
        if (++nsteps > opts.max_steps)
            throw StepSizeUnderflow("step budget exhausted (max_steps)");

        double hmin = 32.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::fabs(t));
        if (t + h < t_stop) h = t_stop - t;
        double kb = next_knot_below(t);
        if (kb > t_stop && t + h < kb) h = kb - t;

        StepResult st = dp45_step(f_cur, t, v, h, k1, opts.atol, opts.rtol);
        if (st.err > 1.0) {
            if (std::fabs(h) <= 1.5 * hmin)
                throw StepSizeUnderflow("tolerance unreachable at the minimal step size");
            h *= std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            if (std::fabs(h) < hmin) h = -hmin;
            continue;
        }

        double t1 = t + h;
        double v1 = st.y1;
        st.dense.repr = repr;
        sol.steps.push_back(st.dense);

        // crossing events: blow-up (reciprocal repr) or zero return (direct repr)
        bool crossing = (v != 0.0) && ((v > 0) != (v1 > 0) || v1 == 0.0);
        if (crossing && (repr == Repr::Reciprocal || armed)) {
            auto [ts, le] = locate_zero(st.dense, f_cur, opts.event_value_tol, opts.rtol, t_bar);
            if (repr == Repr::Reciprocal) {
                // the direct variable escapes to +inf when the reciprocal crosses from above
                finish_event(v > 0 ? TerminationEvent::Kind::BlowUpPlusInf
                                   : TerminationEvent::Kind::BlowUpMinusInf,
                             ts, le);
                return sol;
            }
            if (eq == Equation::Dual) {
                if (!sol.zero_return_time) sol.zero_return_time = ts;
                if (opts.terminate_on_zero_return) {
                    finish_event(TerminationEvent::Kind::ZeroReturn, ts, le);
                    return sol;
                }
            } else {
                // a primal trajectory crossing zero is outside the theory: surface it
                sol.primal_zero_anomaly = true;
                finish_event(TerminationEvent::Kind::ZeroReturn, ts, le);
                return sol;
            }
        }

        sol.samples.push_back({t1, v1, repr});
        t = t1;
        v = v1;
        k1 = st.k7;
        if (!armed && std::fabs(v) > opts.zero_return_deadband) armed = true;

        if (t <= t_stop + 1e-15 * std::max(1.0, std::fabs(t_stop))) {
            sol.termination = {TerminationEvent::Kind::ReachedTimeLimit, t_stop, v, repr, 0.0};
            return sol;
        }

        // hysteresis representation switch, exact by the Legendre identity
        if (repr == Repr::Direct && std::fabs(v) >= opts.switch_threshold) {
            repr = Repr::Reciprocal;
            v = 1.0 / v;
            k1 = f_cur(t, v);
        } else if (repr == Repr::Reciprocal && std::fabs(v) >= 1.0 / opts.switch_back) {
            repr = Repr::Direct;
            v = 1.0 / v;
            k1 = f_cur(t, v);
        }

        double fac = st.err > 0.0 ? std::clamp(0.9 * std::pow(st.err, -0.2), 0.2, 5.0) : 5.0;
        h *= fac;
    }
}

}  // namespace

RiccatiSolution integrate_primal(const CoefficientSet& c, double lambda, double t_bar, double k0,
                                 const IntegratorOptions& opts) {
    return integrate(c, Equation::Primal, lambda, t_bar, k0, opts);
}

RiccatiSolution integrate_dual(const CoefficientSet& c, double lambda, double t_bar, double kt0,
                               const IntegratorOptions& opts) {
    return integrate(c, Equation::Dual, lambda, t_bar, kt0, opts);
}

std::pair<double, Repr> RiccatiSolution::eval_raw(double t) const {
    if (t >= samples.front().t) return {samples.front().value, samples.front().repr};
    if (steps.empty() || t < last_time() - 1e-9 * std::max(1.0, std::fabs(t)))
        throw DomainError("evaluation outside the integrated range");
    std::size_t lo = 0, hi = steps.size();
    while (lo + 1 < hi) {
        std::size_t mid = (lo + hi) / 2;
        if (steps[mid].t0 >= t)
            lo = mid;
        else
            hi = mid;
    }
    const DenseStep& s = steps[lo];
    double lo_t = std::min(s.t1, last_time());
    double tt = std::clamp(t, std::max(lo_t, s.t1), s.t0);
    return {s.eval(tt), s.repr};
}

double RiccatiSolution::eval_direct(double t) const {
    auto [v, r] = eval_raw(t);
    return r == Repr::Direct ? v : 1.0 / v;
}

double RiccatiSolution::eval_dual_repr(double t) const {
    auto [v, r] = eval_raw(t);
    bool stored_is_dual = (equation == Equation::Dual) == (r == Repr::Direct);
    return stored_is_dual ? v : 1.0 / v;
}

double RiccatiSolution::last_time() const { return samples.back().t; }

bool RiccatiSolution::covers(double t) const {
    return t <= samples.front().t + 1e-12 && t >= last_time() - 1e-12;
}

std::string RiccatiSolution::to_csv() const {
    std::string out = "t,value,repr,equation\n";
    char buf[128];
    for (const auto& s : samples) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%s,%s\n", s.t, s.value, to_string(s.repr),
                      to_string(equation));
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// constant-coefficient oracle: k = p/q with (p,q)' = [[a/2, b], [-cq, -a/2]](p,q),
// i.e. the 2x2 matrix exponential evaluated per discriminant regime.

namespace {

struct PQ {
    double p, q;
};

PQ pq_at(double a, double b, double cq, double tau) {
    double disc = 4.0 * b * cq - a * a;
    double half_a = 0.5 * a;
    if (std::fabs(disc) < 1e-14 * std::max({1.0, a * a, std::fabs(4.0 * b * cq)})) {
        return {b * tau, 1.0 - half_a * tau};
    }
    if (disc > 0.0) {
        double w = 0.5 * std::sqrt(disc);
        double s = std::sin(w * tau), cs = std::cos(w * tau);
        return {b * s / w, cs - half_a * s / w};
    }
    double eta = 0.5 * std::sqrt(-disc);
    double sh = std::sinh(eta * tau), ch = std::cosh(eta * tau);
    return {b * sh / eta, ch - half_a * sh / eta};
}

}  // namespace

double closed_form_constant_riccati(double a, double b, double cq, double t_bar, double t) {
    double tau = t_bar - t;
    if (tau < 0.0) throw DomainError("oracle: t above t_bar");
    if (b == 0.0) return 0.0;
    if (cq == 0.0) {
        if (a == 0.0) return b * tau;
        return (b / a) * std::expm1(a * tau);
    }
    auto bt = closed_form_blowup_time(a, b, cq, t_bar);
    if (bt && t <= *bt) throw DomainError("oracle: at or past the analytic blow-up time");
    PQ pq = pq_at(a, b, cq, tau);
    if (pq.q == 0.0) throw DomainError("oracle: at the analytic blow-up time");
    return pq.p / pq.q;
}

std::optional<double> closed_form_blowup_time(double a, double b, double cq, double t_bar) {
    if (cq == 0.0 || b == 0.0) return std::nullopt;
    double disc = 4.0 * b * cq - a * a;
    if (std::fabs(disc) < 1e-14 * std::max({1.0, a * a, std::fabs(4.0 * b * cq)})) {
        if (a > 0.0) return t_bar - 2.0 / a;
        return std::nullopt;
    }
    if (disc > 0.0) {
        double sq = std::sqrt(disc);
        double tau = (0.5 * std::acos(-1.0) - std::atan(a / sq)) * 2.0 / sq;
        return t_bar - tau;
    }
    double s = std::sqrt(-disc);
    if (a > s) {
        double tau = std::atanh(s / a) * 2.0 / s;
        return t_bar - tau;
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------

CoefficientSet dual_coefficients(const CoefficientSet& c, double lambda, int grid_n) {
    auto grid = validation_grid(c, grid_n);
    auto tabulate = [&](auto&& f) {
        std::vector<double> vals;
        vals.reserve(grid.size());
        for (double t : grid) vals.push_back(f(t));
        return CoefficientFn::table(grid, std::move(vals), 1);
    };
    CoefficientSet d;
    d.T = c.T;
    d.H11 = tabulate([&](double t) {
        double h13 = c.H13(t);
        return h13 * h13 * c.H33(t) - c.H22(t) + lambda * c.h22(t);
    });
    d.H12 = tabulate([&](double t) {
        double h13 = c.H13(t);
        return -h13 * h13 - c.H21(t);
    });
    d.H21 = d.H12;
    d.H13 = tabulate([&](double t) { return c.H13(t); });
    d.H31 = d.H13;
    d.H22 = tabulate([&](double t) {
        double h13 = c.H13(t);
        return h13 * h13 / c.H33(t) - c.H11(t);
    });
    d.H23 = tabulate([&](double t) { return -c.H13(t) / c.H33(t); });
    d.H32 = d.H23;
    d.H33 = tabulate([&](double t) { return 1.0 / c.H33(t); });
    d.h22 = CoefficientFn::constant(-1.0);  // unused: lambda is folded into H11
    d.h23_derived = false;
    return d;
}

}  // namespace riccati
