#include "riccati/coefficients.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace riccati {

namespace {

void check_knots(const std::vector<double>& knots) {
    if (knots.size() < 2) throw ConfigError("coefficient needs at least two knots");
    for (std::size_t i = 1; i < knots.size(); ++i) {
        if (!(knots[i] > knots[i - 1])) throw ConfigError("knots must be strictly increasing");
    }
    if (knots.front() != 0.0) throw ConfigError("first knot must be 0");
    for (double k : knots) {
        if (!std::isfinite(k)) throw ConfigError("non-finite knot");
    }
}

}  // namespace

CoefficientFn CoefficientFn::constant(double value) {
    if (!std::isfinite(value)) throw ConfigError("non-finite constant coefficient");
    CoefficientFn f;
    f.kind_ = Kind::Constant;
    f.values_ = {value};
    return f;
}

CoefficientFn CoefficientFn::piecewise_linear(std::vector<double> knots,
                                              std::vector<double> values) {
    check_knots(knots);
    if (values.size() != knots.size())
        throw ConfigError("pwlinear: values must match knots");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("non-finite coefficient value");
    CoefficientFn f;
    f.kind_ = Kind::PiecewiseLinear;
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    return f;
}

CoefficientFn CoefficientFn::piecewise_polynomial(std::vector<double> knots,
                                                  std::vector<std::vector<double>> coeffs) {
    check_knots(knots);
    if (coeffs.size() != knots.size() - 1)
        throw ConfigError("pwpoly: need one coefficient row per piece");
    for (const auto& row : coeffs) {
        if (row.empty()) throw ConfigError("pwpoly: empty coefficient row");
        for (double v : row)
            if (!std::isfinite(v)) throw ConfigError("non-finite polynomial coefficient");
    }
    CoefficientFn f;
    f.kind_ = Kind::PiecewisePolynomial;
    f.knots_ = std::move(knots);
    f.coeffs_ = std::move(coeffs);
    if (f.max_interior_jump() > 1e-12)
        throw ConfigError("pwpoly: pieces are discontinuous at an interior knot");
    return f;
}

CoefficientFn CoefficientFn::table(std::vector<double> knots, std::vector<double> values,
                                   int order) {
    check_knots(knots);
    if (values.size() != knots.size()) throw ConfigError("table: values must match knots");
    if (order != 1 && order != 3) throw ConfigError("table: interpolation order must be 1 or 3");
    for (double v : values)
        if (!std::isfinite(v)) throw ConfigError("non-finite table value");
    CoefficientFn f;
    f.kind_ = Kind::Table;
    f.knots_ = std::move(knots);
    f.values_ = std::move(values);
    f.order_ = order;
    if (order == 3) {
        const std::size_t n = f.knots_.size();
        f.slopes_.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i == 0) {
                f.slopes_[i] = (f.values_[1] - f.values_[0]) / (f.knots_[1] - f.knots_[0]);
            } else if (i + 1 == n) {
                f.slopes_[i] =
                    (f.values_[n - 1] - f.values_[n - 2]) / (f.knots_[n - 1] - f.knots_[n - 2]);
            } else {
                f.slopes_[i] =
                    (f.values_[i + 1] - f.values_[i - 1]) / (f.knots_[i + 1] - f.knots_[i - 1]);
            }
        }
    }
    return f;
}

std::size_t CoefficientFn::piece_index(double t) const {
    // upper_bound - 1, clamped to the last piece
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    if (it == knots_.begin()) return 0;
    std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (i + 1 >= knots_.size()) i = knots_.size() - 2;
    return i;
}

double CoefficientFn::operator()(double t) const {
    switch (kind_) {
        case Kind::Constant:
            return values_[0];
        case Kind::PiecewiseLinear: {
            if (t <= knots_.front()) return values_.front();
            if (t >= knots_.back()) return values_.back();
            std::size_t i = piece_index(t);
            double w = (t - knots_[i]) / (knots_[i + 1] - knots_[i]);
            return values_[i] + w * (values_[i + 1] - values_[i]);
        }
        case Kind::PiecewisePolynomial: {
            double tc = std::clamp(t, knots_.front(), knots_.back());
            std::size_t i = piece_index(tc);
            const auto& p = coeffs_[i];
            double x = tc - knots_[i];
            double acc = 0.0;
            for (std::size_t j = p.size(); j-- > 0;) acc = acc * x + p[j];
            return acc;
        }
        case Kind::Table: {
            if (t <= knots_.front()) return values_.front();
            if (t >= knots_.back()) return values_.back();
            std::size_t i = piece_index(t);
            double h = knots_[i + 1] - knots_[i];
            double w = (t - knots_[i]) / h;
            if (order_ == 1) return values_[i] + w * (values_[i + 1] - values_[i]);
            // cubic Hermite
            double w2 = w * w, w3 = w2 * w;
            double h00 = 2 * w3 - 3 * w2 + 1;
            double h10 = w3 - 2 * w2 + w;
            double h01 = -2 * w3 + 3 * w2;
            double h11 = w3 - w2;
            return h00 * values_[i] + h10 * h * slopes_[i] + h01 * values_[i + 1] +
                   h11 * h * slopes_[i + 1];
        }
    }
    return 0.0;
}

double CoefficientFn::max_interior_jump() const {
    if (kind_ != Kind::PiecewisePolynomial) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < knots_.size(); ++i) {
        // left limit from piece i-1, right value from piece i
        const auto& p = coeffs_[i - 1];
        double x = knots_[i] - knots_[i - 1];
        double left = 0.0;
        for (std::size_t j = p.size(); j-- > 0;) left = left * x + p[j];
        double right = coeffs_[i][0];
        double scale = std::max({1.0, std::fabs(left), std::fabs(right)});
        worst = std::max(worst, std::fabs(left - right) / scale);
    }
    return worst;
}

double CoefficientSet::at(Coef which, double t) const {
    switch (which) {
        case Coef::H11: return H11(t);
        case Coef::H12: return H12(t);
        case Coef::H13: return H13(t);
        case Coef::H21: return H21(t);
        case Coef::H22: return H22(t);
        case Coef::H23: return eval_H23(t);
        case Coef::H31: return H31(t);
        case Coef::H32: return H32(t);
        case Coef::H33: return H33(t);
        case Coef::h22: return h22(t);
    }
    return 0.0;
}

double CoefficientSet::eval_H23(double t) const {
    if (h23_derived) return -H33(t) * H13(t);
    return H23(t);
}

double CoefficientSet::checked(Coef which, double t) const {
    if (t > T * (1.0 + 1e-14) + 1e-300)
        throw TimeOutOfRange("evaluation above the horizon T");
    return at(which, t);
}

CoefficientSet::PointCoeffs CoefficientSet::primal_abc(double t, double lambda) const {
    double h13 = H13(t);
    double a = 2.0 * H21(t) + h13 * h13;
    double b = H11(t);
    double cq = H22(t) - H33(t) * h13 * h13 - lambda * h22(t);
    return {a, b, cq};
}

std::vector<double> CoefficientSet::all_knots() const {
    std::vector<double> ks;
    auto add = [&](const CoefficientFn& f) {
        for (double k : f.knots()) ks.push_back(k);
    };
    add(H11); add(H12); add(H13); add(H21); add(H22);
    if (!h23_derived) add(H23);
    add(H31); add(H32); add(H33); add(h22);
    ks.push_back(0.0);
    ks.push_back(T);
    std::sort(ks.begin(), ks.end());
    ks.erase(std::unique(ks.begin(), ks.end(),
                         [](double a, double b) { return std::fabs(a - b) <= 1e-15; }),
             ks.end());
    return ks;
}

std::vector<double> validation_grid(const CoefficientSet& c, int grid_n) {
    if (grid_n < 2) throw ConfigError("grid_n must be >= 2");
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(grid_n) + 16);
    for (int i = 0; i <= grid_n; ++i) g.push_back(c.T * static_cast<double>(i) / grid_n);
    for (double k : c.all_knots()) g.push_back(k);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(),
                        [](double a, double b) { return std::fabs(a - b) <= 1e-15; }),
            g.end());
    return g;
}

// ---------------------------------------------------------------------------
// symmetric 3x3 eigenvalues via cyclic Jacobi (converges to machine precision
// in a handful of sweeps for 3x3)
double sym3_max_eigenvalue(const double m[3][3]) {
    double a[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) a[i][j] = 0.5 * (m[i][j] + m[j][i]);
    for (int sweep = 0; sweep < 32; ++sweep) {
        double off = std::fabs(a[0][1]) + std::fabs(a[0][2]) + std::fabs(a[1][2]);
        double diag = std::fabs(a[0][0]) + std::fabs(a[1][1]) + std::fabs(a[2][2]);
        if (off <= 1e-16 * std::max(1.0, diag)) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                double cth = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * cth;
                double app = a[p][p], aqq = a[q][q], apq = a[p][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = a[q][p] = 0.0;
                int r = 3 - p - q;
                double arp = a[r][p], arq = a[r][q];
                a[r][p] = a[p][r] = cth * arp - s * arq;
                a[r][q] = a[q][r] = s * arp + cth * arq;
            }
        }
    }
    return std::max({a[0][0], a[1][1], a[2][2]});
}

double constant_matrix_beta(const double h[3][3]) {
    double m[3][3] = {{-h[0][0], -h[0][1], -h[0][2]},
                      {h[1][0], h[1][1], h[1][2]},
                      {h[2][0], h[2][1], h[2][2]}};
    return -sym3_max_eigenvalue(m);
}

double monotonicity_beta(const CoefficientSet& c, int grid_n) {
    auto grid = validation_grid(c, grid_n);
    double beta = std::numeric_limits<double>::infinity();
    for (double t : grid) {
        double h[3][3] = {{c.H11(t), c.H12(t), c.H13(t)},
                          {c.H21(t), c.H22(t), c.eval_H23(t)},
                          {c.H31(t), c.H32(t), c.H33(t)}};
        beta = std::min(beta, constant_matrix_beta(h));
    }
    return std::max(beta, 0.0);
}

double lambda_b(const CoefficientSet& c, int grid_n) {
    auto grid = validation_grid(c, grid_n);
    double num = std::numeric_limits<double>::infinity();
    double den = -std::numeric_limits<double>::infinity();
    for (double t : grid) {
        double h13 = c.H13(t);
        num = std::min(num, c.H22(t) - c.H33(t) * h13 * h13);
        den = std::max(den, c.h22(t));
    }
    return num / den;
}

bool check_all_eigen_condition(const CoefficientSet& c, int grid_n) {
    auto grid = validation_grid(c, grid_n);
    double lb = lambda_b(c, grid_n);
    double n_h11 = 0.0, n_quad = 0.0, n_lin = 0.0;
    for (double t : grid) {
        double h13 = c.H13(t);
        n_h11 = std::max(n_h11, std::fabs(c.H11(t)));
        n_quad = std::max(n_quad, std::fabs(c.H22(t) - c.H33(t) * h13 * h13 - lb * c.h22(t)));
        n_lin = std::max(n_lin, std::fabs(2.0 * c.H21(t) + h13 * h13));
    }
    double mid = n_lin * n_lin;
    return 4.0 * n_h11 * n_quad <= mid && mid < 4.0 / (c.T * c.T);
}

namespace {

struct MinMax {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

}  // namespace

Envelopes envelopes(const CoefficientSet& c, int grid_n, double margin) {
    auto grid = validation_grid(c, grid_n);
    MinMax h11, h22c, h33, h21, hp22, a13;
    for (double t : grid) {
        h11.add(c.H11(t));
        h22c.add(c.H22(t));
        h33.add(c.H33(t));
        h21.add(c.H21(t));
        hp22.add(c.h22(t));
        a13.add(std::fabs(c.H13(t)));
    }
    auto pick = [&](const MinMax& mm) {
        if (margin > 0.0) return margin;
        return 1e-6 * std::max(1.0, std::max(std::fabs(mm.lo), std::fabs(mm.hi)));
    };
    Envelopes e;
    double m11 = pick(h11);
    e.H11_lo = h11.lo - m11;
    e.H11_hi = h11.hi + m11;
    if (!(e.H11_lo > 0.0))
        throw EnvelopeInfeasible("H11 lower envelope not positive at this margin");
    double m22 = pick(h22c);
    e.H22_lo = h22c.lo - m22;
    e.H22_hi = h22c.hi + m22;
    if (!(e.H22_hi < 0.0))
        throw EnvelopeInfeasible("H22 upper envelope not negative at this margin");
    double m33 = pick(h33);
    e.H33_lo = h33.lo - m33;
    e.H33_hi = h33.hi + m33;
    if (!(e.H33_hi < 0.0))
        throw EnvelopeInfeasible("H33 upper envelope not negative at this margin");
    double m21 = pick(h21);
    e.H21_lo = h21.lo - m21;
    e.H21_hi = h21.hi + m21;
    double mp = pick(hp22);
    e.h22_lo = hp22.lo - mp;
    e.h22_hi = hp22.hi + mp;
    if (!(e.h22_hi < 0.0))
        throw EnvelopeInfeasible("h22 upper envelope not negative at this margin");
    double m13 = pick(a13);
    e.absH13_lo = std::max(0.0, a13.lo - m13);
    e.absH13_hi = a13.hi + m13;
    e.H23_hi = -e.H33_lo * e.absH13_hi;
    e.H23_lo = -e.H33_hi * e.absH13_lo;
    return e;
}

ValidationReport validate(const CoefficientSet& c, int grid_n) {
    ValidationReport r;
    auto grid = validation_grid(c, grid_n);
    r.grid_size = static_cast<int>(grid.size());
    if (!(c.T > 0.0)) r.violations.push_back({0.0, "T > 0", c.T});

    for (double t : grid) {
        double resid = std::fabs(c.eval_H23(t) + c.H33(t) * c.H13(t));
        if (resid > kStructuralTol)
            r.violations.push_back({t, "H23 = -H33*H13", resid});
        double h = c.h22(t);
        if (!(h < 0.0)) r.violations.push_back({t, "h22 < 0", h});
    }

    r.beta = monotonicity_beta(c, grid_n);
    if (!(r.beta > 0.0)) r.violations.push_back({0.0, "monotonicity margin beta > 0", r.beta});

    // consequences of (2.8); tolerate grid-level roundoff
    const double tol = 1e-12;
    for (double t : grid) {
        if (c.H11(t) < r.beta - tol)
            r.violations.push_back({t, "H11 >= beta", c.H11(t) - r.beta});
        if (c.H22(t) > -r.beta + tol)
            r.violations.push_back({t, "H22 <= -beta", c.H22(t) + r.beta});
        if (c.H33(t) > -r.beta + tol)
            r.violations.push_back({t, "H33 <= -beta", c.H33(t) + r.beta});
    }

    r.lambda_b = lambda_b(c, grid_n);
    r.structural_ok = r.violations.empty();
    r.all_eigen_condition_ok = r.structural_ok ? check_all_eigen_condition(c, grid_n) : false;
    return r;
}

void require_valid(const CoefficientSet& c, int grid_n) {
    auto r = validate(c, grid_n);
    if (!r.structural_ok) {
        std::string msg = "coefficient set rejected:";
        for (std::size_t i = 0; i < r.violations.size() && i < 4; ++i) {
            char buf[160];
            std::snprintf(buf, sizeof(buf), " [t=%.6g %s off by %.3g]", r.violations[i].t,
                          r.violations[i].constraint.c_str(), r.violations[i].magnitude);
            msg += buf;
        }
        throw ValidationError(msg);
    }
}

}  // namespace riccati
