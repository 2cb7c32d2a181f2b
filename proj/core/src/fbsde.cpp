#include "riccati/fbsde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "riccati/parallel.hpp"
#include "riccati/rng.hpp"

namespace riccati {

double uniqueness_constant(const CoefficientSet& c, int grid_n) {
    auto grid = validation_grid(c, grid_n);
    double m13 = 0.0;
    for (double t : grid) m13 = std::max(m13, std::fabs(c.H13(t)));
    return 1.0 / (2.0 * (m13 + 1.0) * (m13 + 1.0));
}

double algebraic_m(const CoefficientSet& c, double t, double k) {
    double h33 = c.H33(t);
    double den = 1.0 - k * h33;
    if (std::fabs(den) < 1e-12 * (1.0 + std::fabs(k) * std::fabs(h33)))
        throw SingularDenominator("1 - k*H33 vanished in the algebraic relation for m");
    return k * (c.H31(t) + c.H32(t) * k) / den;
}

std::vector<SegmentInterval> segment_intervals(const BlowupChain& chain) {
    if (chain.termination != ChainTermination::DefectAtZero)
        throw ChainNotEigen("chain does not land at t = 0");
    std::vector<double> B = chain.breakpoints;  // [T, t_1, ..., t_d]
    B.push_back(0.0);                           // landing time
    const int L = static_cast<int>(B.size()) - 1;  // total segments including the landing one

    // boundaries: {0} + midpoints of consecutive breakpoints + {T}; for an odd
    // landing the deepest midpoint mid(0, t_{L-1}) is kept (the landing primal
    // segment needs its reciprocal near 0), for an even landing the dual value
    // is already finite at 0 and the deepest midpoint is dropped
    std::vector<double> bounds;
    bounds.push_back(0.0);
    int j_start = (L % 2 == 1) ? L : L - 1;
    for (int j = j_start; j >= 1; --j)
        bounds.push_back(0.5 * (B[static_cast<std::size_t>(j)] + B[static_cast<std::size_t>(j - 1)]));
    bounds.push_back(B[0]);

    std::vector<SegmentInterval> out;
    const int n_int = static_cast<int>(bounds.size()) - 1;
    for (int i = 0; i < n_int; ++i) {
        SegmentInterval s;
        s.lo = bounds[static_cast<std::size_t>(i)];
        s.hi = bounds[static_cast<std::size_t>(i + 1)];
        // topmost interval is primal, alternating downward
        bool primal = ((n_int - 1 - i) % 2) == 0;
        s.kind = primal ? Equation::Primal : Equation::Dual;
        out.push_back(s);
    }
    if (out.empty() || out.front().kind != Equation::Dual)
        throw ChainNotEigen("interval construction must start dual at t = 0");
    return out;
}

double SimulationResult::brownian_increment(int path, int step) const {
    double dt = grid[static_cast<std::size_t>(step) + 1] - grid[static_cast<std::size_t>(step)];
    return std::sqrt(dt) * CounterRng(seed).normal(static_cast<std::uint64_t>(path),
                                                   static_cast<std::uint64_t>(step));
}

SimulationResult simulate_eigenfunction(const CoefficientSet& c, const Eigenvalue& eig,
                                        int n_steps, int n_paths, std::uint64_t seed, double y0,
                                        const SpectrumOptions& opts) {
    if (n_steps < 1 || n_paths < 1) throw ConfigError("need n_steps >= 1 and n_paths >= 1");
    SimulationResult sim;
    sim.seed = seed;
    sim.y0 = y0;
    sim.lambda = eig.lambda;
    sim.segments = segment_intervals(eig.chain);

    // per-interval uniform grids, every interval boundary an exact grid point
    for (std::size_t i = 0; i < sim.segments.size(); ++i) {
        const auto& s = sim.segments[i];
        double len = s.hi - s.lo;
        int steps = std::max(1, static_cast<int>(std::lround(n_steps * len / c.T)));
        for (int k = 0; k < steps; ++k) {
            sim.grid.push_back(s.lo + len * static_cast<double>(k) / steps);
            sim.segment_of_point.push_back(static_cast<int>(i));
        }
    }
    sim.grid.push_back(c.T);
    sim.segment_of_point.push_back(static_cast<int>(sim.segments.size()) - 1);

    const std::size_t n_pts = sim.grid.size();
    CoefficientSet dual_cs = dual_coefficients(c, eig.lambda, opts.grid_n);
    const BlowupChain& chain = eig.chain;

    // per grid point: representation value and the three SDE/map coefficients
    struct PointData {
        double drift, diff, rep, mrep;
    };
    std::vector<PointData> pd(n_pts);
    for (std::size_t g = 0; g < n_pts; ++g) {
        double t = sim.grid[g];
        const auto& seg = sim.segments[static_cast<std::size_t>(sim.segment_of_point[g])];
        if (seg.kind == Equation::Dual) {
            double kt = (g == 0) ? 0.0 : chain.kt_at(t);  // k~(0) = 0 is the landing identity
            double mt = algebraic_m(dual_cs, t, kt);
            pd[g].rep = kt;
            pd[g].mrep = mt;
            pd[g].drift = dual_cs.H21(t) + dual_cs.H22(t) * kt + dual_cs.eval_H23(t) * mt;
            pd[g].diff = dual_cs.H31(t) + dual_cs.H32(t) * kt + dual_cs.H33(t) * mt;
        } else {
            double k = chain.k_at(t);
            double m = algebraic_m(c, t, k);
            pd[g].rep = k;
            pd[g].mrep = m;
            pd[g].drift = c.H21(t) + (c.H22(t) - eig.lambda * c.h22(t)) * k + c.eval_H23(t) * m;
            pd[g].diff = c.H31(t) + c.H32(t) * k + c.H33(t) * m;
        }
        if (!std::isfinite(pd[g].drift) || !std::isfinite(pd[g].diff))
            throw NonFiniteState("non-finite SDE coefficient along the chain");
    }

    sim.paths.resize(static_cast<std::size_t>(n_paths));
    CounterRng rng(seed);
    parallel_for(static_cast<std::size_t>(n_paths), [&](std::size_t p) {
        EigenfunctionPath path;
        path.path_index = static_cast<int>(p);
        path.x.resize(n_pts);
        path.y.resize(n_pts);
        path.z.resize(n_pts);
        double state = y0;  // x~ on the first (dual) interval
        int cur_seg = 0;
        for (std::size_t g = 0; g < n_pts; ++g) {
            int seg_idx = sim.segment_of_point[g];
            if (seg_idx != cur_seg) {
                // handoff at the boundary: original variables stay continuous
                double t = sim.grid[g];
                if (sim.segments[static_cast<std::size_t>(seg_idx)].kind == Equation::Primal) {
                    state = chain.kt_at(t) * state;  // x = y~ = k~ x~
                } else {
                    state = chain.k_at(t) * state;  // x~ = y = k x
                }
                cur_seg = seg_idx;
            }
            const auto& d = pd[g];
            if (sim.segments[static_cast<std::size_t>(seg_idx)].kind == Equation::Dual) {
                path.x[g] = d.rep * state;  // y~
                path.y[g] = state;          // x~
                path.z[g] = d.diff * state;
            } else {
                path.x[g] = state;
                path.y[g] = d.rep * state;
                path.z[g] = d.mrep * state;
            }
            if (!std::isfinite(state)) throw NonFiniteState("path overflow");
            if (g + 1 < n_pts) {
                double dt = sim.grid[g + 1] - sim.grid[g];
                double db = std::sqrt(dt) * rng.normal(p, g);
                state = state + state * (d.drift * dt) + state * (d.diff * db);
            }
        }
        sim.paths[p] = std::move(path);
    });
    return sim;
}

ResidualStats bsde_residual(const SimulationResult& sim, const CoefficientSet& c, double lambda) {
    ResidualStats st;
    double back2 = 0.0, fwd2 = 0.0;
    long n = 0;
    const std::size_t n_pts = sim.grid.size();
    for (const auto& path : sim.paths) {
        for (std::size_t g = 0; g + 1 < n_pts; ++g) {
            double t = sim.grid[g];
            double dt = sim.grid[g + 1] - t;
            double db = sim.brownian_increment(path.path_index, static_cast<int>(g));
            double x = path.x[g], y = path.y[g], z = path.z[g];
            double rb = (path.y[g + 1] - y) + (c.H11(t) * x + c.H12(t) * y + c.H13(t) * z) * dt -
                        z * db;
            double rf = (path.x[g + 1] - x) -
                        (c.H21(t) * x + (c.H22(t) - lambda * c.h22(t)) * y + c.eval_H23(t) * z) * dt -
                        (c.H31(t) * x + c.H32(t) * y + c.H33(t) * z) * db;
            back2 += rb * rb;
            fwd2 += rf * rf;
            ++n;
        }
    }
    st.n_terms = n;
    if (n > 0) {
        back2 /= static_cast<double>(n);
        fwd2 /= static_cast<double>(n);
    }
    st.backward_rms = std::sqrt(back2);
    st.forward_rms = std::sqrt(fwd2);
    return st;
}

namespace {

std::string csv_header() { return "t,x,y,z,segment_kind\n"; }

void append_row(std::string& out, double t, double x, double y, double z, Equation kind) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g,%s\n", t, x, y, z, to_string(kind));
    out += buf;
}

}  // namespace

std::string SimulationResult::to_csv_mean() const {
    std::string out = csv_header();
    const std::size_t n_pts = grid.size();
    for (std::size_t g = 0; g < n_pts; ++g) {
        double sx = 0, sy = 0, sz = 0;
        for (const auto& p : paths) {
            sx += p.x[g];
            sy += p.y[g];
            sz += p.z[g];
        }
        double n = static_cast<double>(paths.size());
        append_row(out, grid[g], sx / n, sy / n, sz / n,
                   segments[static_cast<std::size_t>(segment_of_point[g])].kind);
    }
    return out;
}

std::string SimulationResult::to_csv_path(int path) const {
    const auto& p = paths.at(static_cast<std::size_t>(path));
    std::string out = csv_header();
    for (std::size_t g = 0; g < grid.size(); ++g)
        append_row(out, grid[g], p.x[g], p.y[g], p.z[g],
                   segments[static_cast<std::size_t>(segment_of_point[g])].kind);
    return out;
}

}  // namespace riccati
