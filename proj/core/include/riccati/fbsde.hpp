#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "riccati/spectrum.hpp"

namespace riccati {

/// Weak-uniqueness constant 1 / (2 (max|H13| + 1)^2): it dominates the
/// diffusion coupling for both the primal and dual decoupled systems, so the
/// decoupled solution is the unique one.
double uniqueness_constant(const CoefficientSet& c, int grid_n = kDefaultGridN);

/// m = k (H31 + H32 k) / (1 - k H33) at time t.
double algebraic_m(const CoefficientSet& c, double t, double k);

struct SegmentInterval {
    double lo = 0.0, hi = 0.0;
    Equation kind = Equation::Dual;  // which representation drives the forward SDE
};

/// Midpoint splitting of [0, T] from the chain breakpoints, alternating kinds,
/// dual first on [0, ...], primal last ending at T.
std::vector<SegmentInterval> segment_intervals(const BlowupChain& chain);

/// One simulated path of the assembled eigenfunction triple on the shared grid.
struct EigenfunctionPath {
    int path_index = 0;
    std::vector<double> x, y, z;
};

struct SimulationResult {
    std::vector<double> grid;             // ascending, grid.front() = 0, grid.back() = T
    std::vector<int> segment_of_point;    // index into segments per grid point
    std::vector<SegmentInterval> segments;
    std::vector<EigenfunctionPath> paths;
    std::uint64_t seed = 0;
    double y0 = 0.0;
    double lambda = 0.0;

    double brownian_increment(int path, int step) const;  // over [grid[step], grid[step+1]]
    std::string to_csv_mean() const;
    std::string to_csv_path(int path) const;
};

/// Piecewise Monte-Carlo construction of the eigenfunction triple: Euler-
/// Maruyama on per-interval grids aligned to the interval boundaries, dual
/// forward SDE with (k~, m~) on dual intervals mapped back through the
/// Legendre relations, primal forward SDE with (k, m) on primal intervals.
SimulationResult simulate_eigenfunction(const CoefficientSet& c, const Eigenvalue& eig,
                                        int n_steps, int n_paths, std::uint64_t seed, double y0,
                                        const SpectrumOptions& opts = {});

struct ResidualStats {
    double backward_rms = 0.0;  // residual of the backward equation
    double forward_rms = 0.0;   // residual of the forward equation
    long n_terms = 0;
};

/// Per-step Euler residuals of the original FBSDE along the stored paths.
ResidualStats bsde_residual(const SimulationResult& sim, const CoefficientSet& c, double lambda);

}  // namespace riccati
