#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "riccati/ode.hpp"

namespace riccati {

enum class ChainTermination { CrossedZero, DefectAtZero, ZeroReturnAtInterior, DepthExceeded };
const char* to_string(ChainTermination t);

struct ChainOptions {
    int max_depth = 256;
    IntegratorOptions integ;
    /// Defect extension: never stop at CrossedZero/ZeroReturnAtInterior; run the
    /// segment alive at 0 down through interior zero returns and record the
    /// dual-representation value at t = 0 (sentinels when it cannot be reached).
    bool defect_extension = false;
};

/// Sentinel magnitude for a defect that could not be evaluated at t = 0.
inline constexpr double kDefectSentinel = 1e300;

/// The decreasing breakpoint chain T = t_0 > t_1 > t_2 > ... built by
/// alternating primal and dual backward Riccati integrations, each restarted
/// at zero from the previous blow-up time.
struct BlowupChain {
    double lambda = 0.0;
    /// t_0 = T followed by every interior breakpoint (> 0).
    std::vector<double> breakpoints;
    /// Kind of segment j (1-based segment j runs between breakpoints[j-1] and
    /// breakpoints[j]); strictly alternating, primal first.
    std::vector<Equation> segment_kinds;
    std::vector<RiccatiSolution> segments;

    ChainTermination termination = ChainTermination::DepthExceeded;
    /// CrossedZero: 1-based index and value of the first breakpoint <= 0.
    int crossed_index = -1;
    double crossed_time = 0.0;
    /// DefectAtZero: dual-representation value at t = 0 and its source repr.
    double defect = 0.0;
    Repr defect_repr = Repr::Direct;
    /// ZeroReturnAtInterior: interior return time of the dual segment.
    double zero_return_t = 0.0;
    /// Any dual zero return observed while building (also set in defect mode).
    bool zero_return_seen = false;
    bool anomaly = false;
    /// 2n offset between chain depth and eigenvalue index; set by enumeration.
    std::optional<int> offset_n;
    double zero_tol = 0.0;

    int depth() const { return static_cast<int>(breakpoints.size()) - 1; }
    bool is_eigen_candidate(double defect_tol) const {
        return termination == ChainTermination::DefectAtZero && std::fabs(defect) <= defect_tol;
    }

    /// Value of k (primal representation) at t, from whichever segment covers t.
    double k_at(double t) const;
    /// Value of k-tilde (dual representation) at t.
    double kt_at(double t) const;

    std::string to_json() const;
};

/// Alternating chain construction. Stops at the first breakpoint <= 0
/// (CrossedZero), a segment alive at t = 0 (DefectAtZero), an interior dual
/// zero return (ZeroReturnAtInterior), or max_depth.
BlowupChain compute_chain(const CoefficientSet& c, double lambda, const ChainOptions& opts = {});

struct ChainTime {
    /// Breakpoint value when depth j was reached (may be <= 0 for the crossing
    /// breakpoint); empty when the chain ended before depth j.
    std::optional<double> t;
    bool below_zero = false;
    /// No dual zero return interfered up to depth j.
    bool pure = true;
};

/// t_j(lambda), with BelowZero sentinel semantics.
ChainTime chain_time(const CoefficientSet& c, double lambda, int j, const ChainOptions& opts = {});

/// Dual-representation value at t = 0; throws UndefinedDefect unless the chain
/// terminated with DefectAtZero.
double eigen_defect(const CoefficientSet& c, double lambda, const ChainOptions& opts = {});

}  // namespace riccati
