#pragma once

#include <optional>
#include <string>
#include <vector>

#include "riccati/chain.hpp"

namespace riccati {

struct SpectrumOptions {
    /// Bisection target: |root function| <= root_tol or relative bracket width.
    double root_tol = 1e-9;
    /// A refined candidate is an eigenvalue only if |defect| stays below this.
    double defect_tol = 1e-6;
    /// Geometric scan ratio for the defect sweep.
    double scan_ratio = 1.15;
    /// Scan floor; defaults to lambda_b * (1 + 1e-6).
    std::optional<double> lambda_min;
    double dedup_rel = 1e-9;
    int grid_n = kDefaultGridN;
    ChainOptions chain;
};

struct Eigenvalue {
    enum class Method { ChainRoot, DefectRoot };
    int order_index = 0;  // 1-based position in the enumerated sequence
    double lambda = 0.0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double defect_residual = 0.0;
    BlowupChain chain;
    Method method = Method::DefectRoot;
};

const char* to_string(Eigenvalue::Method m);

struct Bracket {
    double lo = 0.0, hi = 0.0;
};

struct RootSpec {
    enum class Kind { ChainTime, Defect };
    Kind kind = Kind::Defect;
    int j = 1;  // ChainTime only
    static RootSpec chain_time_root(int j) { return {Kind::ChainTime, j}; }
    static RootSpec defect_root() { return {Kind::Defect, 0}; }
};

/// Sign scan of t_j(lambda) on a geometric grid; consecutive pairs with a sign
/// change and an intact alternation structure at both endpoints.
std::vector<Bracket> bracket_scan(const CoefficientSet& c, int j, double lambda_lo,
                                  double lambda_hi, int n_scan,
                                  const SpectrumOptions& opts = {});

/// Bisection with secant acceleration on the chosen root function.
Eigenvalue solve_eigenvalue(const CoefficientSet& c, const Bracket& bracket, RootSpec root,
                            double tol, const SpectrumOptions& opts = {});

/// All eigenvalues in (lambda_min, lambda_max]: the unique root of each odd
/// chain-depth map plus every defect-sign change, merged and deduplicated.
std::vector<Eigenvalue> enumerate_eigenvalues(const CoefficientSet& c, double lambda_max,
                                              const SpectrumOptions& opts = {});

struct GrowthRatios {
    std::vector<std::pair<int, double>> ratios;  // (m, lambda_m / m^2)
    double tail_min = 0.0, tail_max = 0.0;       // over the tail half
};
GrowthRatios growth_ratios(const std::vector<Eigenvalue>& eigs);

struct PeriodBounds {
    int m = 0;
    double lower = 0.0;
    double upper = 0.0;
    Envelopes envelopes_used;
    double H_under_22 = 0.0;
    bool consistent = true;  // lower <= upper
};

/// Two-sided bound on lambda_m from the constant-envelope auxiliary systems.
/// H_under_22: pass NaN to auto-search (double the magnitude from the H22
/// lower envelope until the auxiliary matrix passes the monotonicity check).
PeriodBounds period_bounds(const CoefficientSet& c, int m, double H_under_22,
                           const SpectrumOptions& opts = {});

enum class PeriodClass { GreaterThanM, LessThanM, Inconclusive };
const char* to_string(PeriodClass p);

PeriodClass classify_period(const CoefficientSet& c, double lambda, int m,
                            const SpectrumOptions& opts = {});

std::string spectrum_to_csv(const std::vector<Eigenvalue>& eigs);
std::string spectrum_to_json(const std::vector<Eigenvalue>& eigs);

/// Full report: eigenvalue list plus the status of (0, lambda_b], which is
/// "certified_empty" only when the all-eigenvalue sufficient condition holds
/// and "unknown" otherwise.
std::string spectrum_report_json(const CoefficientSet& c, const std::vector<Eigenvalue>& eigs,
                                 const SpectrumOptions& opts = {});

}  // namespace riccati
