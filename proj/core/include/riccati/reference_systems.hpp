#pragma once

#include <string>

#include "riccati/chain.hpp"

namespace riccati {

/// Embedded JSON of the diagonal reference system
/// (H11 = 1, H22 = H33 = h22 = -1, all off-diagonals 0, T = 1).
extern const char* kDiagonalSystemJson;

CoefficientSet diagonal_system();

/// Worked piecewise example: constant matrix
/// H = [[3,0,1],[0,-4,2],[1,2,-2]] with h22 linear (slope -10) down to -1 at
/// the knot and flat afterwards. T1 is found numerically (dual zero return),
/// T2 in closed form, T = T1 + T2.
struct Example8 {
    double T1 = 0.0;
    double T2 = 0.0;
    CoefficientSet system;
};

Example8 example8_system(const IntegratorOptions& opts = {});

/// Full worked-example run: locate T1, assemble the system, chain at
/// lambda = 3, refine the defect root around it.
struct Example8Report {
    Example8 setup;
    double lambda_hat = 0.0;
    double defect = 0.0;
    BlowupChain chain;           // plain chain at lambda = 3
    double primal_blowup_t = 0.0;
    double dual_zero_return_t = 0.0;
    std::string to_json() const;
};

Example8Report run_example8(const IntegratorOptions& opts = {});

/// Resolve --config arguments: a built-in name ("diagonal", "example8") or a
/// path to a JSON file.
CoefficientSet resolve_config(const std::string& name_or_path);

}  // namespace riccati
