#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "riccati/coefficients.hpp"

namespace riccati {

enum class Equation { Primal, Dual };
enum class Repr { Direct, Reciprocal };

Equation other(Equation e);
const char* to_string(Equation e);
const char* to_string(Repr r);

struct IntegratorOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Switch to the reciprocal variable when |value| exceeds this...
    double switch_threshold = 1.0;
    /// ...and back to the direct variable when |value| falls below this.
    double switch_back = 0.5;
    /// Lowest time to integrate to; defaults to -T (frozen coefficients below 0).
    std::optional<double> floor;
    /// Ignore zero crossings until |value| has exceeded this once.
    double zero_return_deadband = 1e-13;
    /// Target residual when localizing a crossing on the dense output.
    double event_value_tol = 1e-12;
    /// When false, a dual zero return is recorded but integration continues.
    bool terminate_on_zero_return = true;
    long max_steps = 2000000;
};

struct TerminationEvent {
    enum class Kind { ReachedTimeLimit, BlowUpPlusInf, BlowUpMinusInf, ZeroReturn };
    Kind kind = Kind::ReachedTimeLimit;
    double t = 0.0;
    double value = 0.0;  // stored-variable value at t
    Repr repr = Repr::Direct;
    double localization_error = 0.0;
};

const char* to_string(TerminationEvent::Kind k);

/// One accepted Dormand-Prince step with its order-4 interpolant,
/// y(t0 + th*h) = r1 + th*(r2 + (1-th)*(r3 + th*(r4 + (1-th)*r5))).
struct DenseStep {
    double t0 = 0.0, t1 = 0.0;  // t1 < t0 (backward integration)
    double r1 = 0, r2 = 0, r3 = 0, r4 = 0, r5 = 0;
    Repr repr = Repr::Direct;
    double eval(double t) const;
};

/// One backward Riccati trajectory with its termination event. The stored
/// variable switches between the direct value and its reciprocal; by the
/// Legendre identity the reciprocal satisfies the other Riccati equation, so
/// no approximation is introduced at a switch.
struct RiccatiSolution {
    double lambda = 0.0;
    double t_bar = 0.0;
    Equation equation = Equation::Primal;

    struct Sample {
        double t;
        double value;
        Repr repr;
    };
    std::vector<Sample> samples;
    std::vector<DenseStep> steps;
    TerminationEvent termination;

    /// First interior zero crossing when terminate_on_zero_return is off.
    std::optional<double> zero_return_time;
    /// Set when a primal trajectory crossed zero (outside the alternation theory).
    bool primal_zero_anomaly = false;

    /// Stored-variable value and representation at time t (t within the
    /// integrated range; exact initial value at t_bar).
    std::pair<double, Repr> eval_raw(double t) const;
    /// Value of the equation's own variable (k for primal, k-tilde for dual).
    double eval_direct(double t) const;
    /// Value in the dual representation (k-tilde; reciprocal of k for primal).
    double eval_dual_repr(double t) const;

    double last_time() const;
    bool covers(double t) const;

    std::string to_csv() const;
};

/// dk/dt of -k' = (2H21+H13^2) k + H11 + (H22-H33H13^2-lambda h22) k^2.
double primal_rhs(const CoefficientSet& c, double lambda, double t, double k);

/// dk~/dt of -k~' = -(2H21+H13^2) k~ - H11 k~^2 - (H22-H33H13^2-lambda h22).
double dual_rhs(const CoefficientSet& c, double lambda, double t, double kt);

/// Backward integration of the primal equation from k(t_bar) = k0 down to the
/// floor, with blow-up detected as a zero crossing of the reciprocal variable.
RiccatiSolution integrate_primal(const CoefficientSet& c, double lambda, double t_bar, double k0,
                                 const IntegratorOptions& opts = {});

/// Backward integration of the dual equation; BlowUpMinusInf via the
/// reciprocal switch, ZeroReturn via a sign change of the direct value.
RiccatiSolution integrate_dual(const CoefficientSet& c, double lambda, double t_bar, double kt0,
                               const IntegratorOptions& opts = {});

/// Closed-form solution of -k' = a k + b + cq k^2 with k(t_bar) = 0, used
/// solely as an oracle for the integrator. Throws DomainError at or past the
/// analytic blow-up time.
double closed_form_constant_riccati(double a, double b, double cq, double t_bar, double t);

/// Analytic blow-up time of the same equation (backward from t_bar), when one exists.
std::optional<double> closed_form_blowup_time(double a, double b, double cq, double t_bar);

/// Legendre-dual coefficient family at fixed lambda, tabulated on the union of
/// the input knots and the uniform validation grid. The lambda term is folded
/// into the dual H11; the returned h22 slot is an unused constant -1.
CoefficientSet dual_coefficients(const CoefficientSet& c, double lambda,
                                 int grid_n = kDefaultGridN);

}  // namespace riccati
