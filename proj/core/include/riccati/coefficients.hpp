#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riccati/errors.hpp"

namespace riccati {

/// One time-dependent scalar coefficient on [0, T], continuous by construction
/// or checked at build time. Evaluation below t = 0 is frozen at the t = 0
/// value; evaluation above the last knot is a domain error at set level.
class CoefficientFn {
public:
    enum class Kind { Constant, PiecewiseLinear, PiecewisePolynomial, Table };

    CoefficientFn() = default;

    static CoefficientFn constant(double value);
    static CoefficientFn piecewise_linear(std::vector<double> knots, std::vector<double> values);
    /// Piece i is sum_j coeffs[i][j] * (t - knots[i])^j on [knots[i], knots[i+1]].
    static CoefficientFn piecewise_polynomial(std::vector<double> knots,
                                              std::vector<std::vector<double>> coeffs);
    /// Tabulated nodes with interpolation order 1 (linear) or 3 (cubic Hermite,
    /// finite-difference slopes).
    static CoefficientFn table(std::vector<double> knots, std::vector<double> values, int order);

    Kind kind() const { return kind_; }
    const std::vector<double>& knots() const { return knots_; }
    const std::vector<double>& node_values() const { return values_; }
    const std::vector<std::vector<double>>& piece_coeffs() const { return coeffs_; }
    int interpolation_order() const { return order_; }

    /// Frozen extension below the first knot; caller guards the upper end.
    double operator()(double t) const;

    double domain_begin() const { return knots_.empty() ? 0.0 : knots_.front(); }
    double domain_end() const { return knots_.empty() ? 0.0 : knots_.back(); }
    bool is_constant() const { return kind_ == Kind::Constant; }

    /// Largest relative mismatch of one-sided limits at interior knots.
    double max_interior_jump() const;

private:
    Kind kind_ = Kind::Constant;
    std::vector<double> knots_;
    std::vector<double> values_;                // node values, or the single constant
    std::vector<std::vector<double>> coeffs_;   // per-piece polynomial coefficients
    std::vector<double> slopes_;                // cubic table only
    int order_ = 1;

    std::size_t piece_index(double t) const;
};

/// Names of the ten coefficient slots.
enum class Coef { H11, H12, H13, H21, H22, H23, H31, H32, H33, h22 };

/// The full time-dependent coefficient family of the stochastic Hamiltonian
/// system, plus the horizon T. H23 may be derived, in which case it evaluates
/// pointwise as -H33(t)*H13(t).
struct CoefficientSet {
    CoefficientFn H11, H12, H13, H21, H22, H23, H31, H32, H33, h22;
    bool h23_derived = false;
    double T = 1.0;

    double at(Coef which, double t) const;
    double eval_H23(double t) const;

    /// Checks t <= T and evaluates with frozen extension below 0.
    double checked(Coef which, double t) const;

    /// (a, b, cq) of the scalar Riccati pair at time t:
    ///   a  = 2*H21 + H13^2
    ///   b  = H11
    ///   cq = H22 - H33*H13^2 - lambda*h22
    struct PointCoeffs {
        double a, b, cq;
    };
    PointCoeffs primal_abc(double t, double lambda) const;

    /// Sorted unique union of all member knots (subset of [0, T]).
    std::vector<double> all_knots() const;
};

/// Per-coefficient constant envelopes (check = strict lower, hat = strict upper)
/// plus the derived H23 envelopes.
struct Envelopes {
    double H11_lo = 0, H11_hi = 0;
    double H22_lo = 0, H22_hi = 0;
    double H33_lo = 0, H33_hi = 0;
    double H21_lo = 0, H21_hi = 0;
    double h22_lo = 0, h22_hi = 0;
    double absH13_lo = 0, absH13_hi = 0;
    double H23_hi = 0;  // -H33_lo * absH13_hi
    double H23_lo = 0;  // -H33_hi * absH13_lo
};

struct Violation {
    double t;
    std::string constraint;
    double magnitude;
};

struct ValidationReport {
    double beta = 0.0;
    double lambda_b = 0.0;
    bool structural_ok = false;
    bool all_eigen_condition_ok = false;
    int grid_size = 0;
    std::vector<Violation> violations;
};

inline constexpr int kDefaultGridN = 2048;
inline constexpr double kStructuralTol = 1e-10;

/// Uniform grid of grid_n intervals over [0, T] merged with every knot.
std::vector<double> validation_grid(const CoefficientSet& c, int grid_n);

/// Monotonicity margin: min over the grid of minus the largest
/// eigenvalue of the symmetrized structured matrix, clamped below at 0.
double monotonicity_beta(const CoefficientSet& c, int grid_n = kDefaultGridN);

/// Threshold min{H22 - H33*H13^2} / max{h22} above which the quadratic Riccati
/// coefficient is uniformly positive.
double lambda_b(const CoefficientSet& c, int grid_n = kDefaultGridN);

/// Sufficient condition under which every eigenvalue in R is reachable by the
/// chain construction (sup-norms approximated on the grid).
bool check_all_eigen_condition(const CoefficientSet& c, int grid_n = kDefaultGridN);

/// Strictly bracketing constant envelopes. margin <= 0 selects the default
/// 1e-6 * max(1, sup|f|) per function.
Envelopes envelopes(const CoefficientSet& c, int grid_n = kDefaultGridN, double margin = 0.0);

/// Full structural check; never throws on violations, reports them.
ValidationReport validate(const CoefficientSet& c, int grid_n = kDefaultGridN);

/// Throwing variant used by solver entry points that require validity.
void require_valid(const CoefficientSet& c, int grid_n = kDefaultGridN);

/// Largest eigenvalue of a symmetric 3x3 matrix (row-major, upper part used).
double sym3_max_eigenvalue(const double m[3][3]);

/// Monotonicity margin of one constant coefficient matrix
/// [[a11,a12,a13],[a21,a22,a23],[a31,a32,a33]] (not clamped).
double constant_matrix_beta(const double h[3][3]);

/// JSON loading. Schema:
///   {"T": number, "H11": {"kind": "constant"|"pwlinear"|"pwpoly"|"table",
///    "knots": [...], "values": [...] | "coeffs": [[...]], "order": int?}, ...}
/// "H23" may be omitted (derived as -H33*H13). Unknown fields are rejected.
CoefficientSet load_coefficient_set_json(const std::string& json_text);
CoefficientSet load_coefficient_set_file(const std::string& path);
std::string coefficient_set_to_json(const CoefficientSet& c);

}  // namespace riccati
