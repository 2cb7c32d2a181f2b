#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "test_support.hpp"

using namespace riccati;
using riccati::testing::rel_err;

TEST_CASE("coefficient evaluation: constant, piecewise, frozen extension") {
    auto f = CoefficientFn::constant(-4.0);
    CHECK(f(0.3) == -4.0);

    // the worked-example h22: slope -10 to the knot, flat -1 afterwards
    Example8 ex = example8_system();
    const double T1 = ex.T1, T = ex.T1 + ex.T2;
    CHECK(ex.system.h22(T1) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(ex.system.h22(T) == doctest::Approx(-1.0).epsilon(1e-12));
    // frozen extension below zero returns the t = 0 value
    double at0 = -10.0 * (0.0 - T1) - 1.0;
    CHECK(ex.system.h22(-0.5) == doctest::Approx(at0).epsilon(1e-12));
    CHECK(at0 == doctest::Approx(10.0 * T1 - 1.0));

    CHECK_THROWS_AS(ex.system.checked(Coef::h22, T + 0.1), TimeOutOfRange);
}

TEST_CASE("piecewise polynomial and cubic table evaluation") {
    // two pieces of t^2 and its continuation, continuous at the interior knot
    auto p = CoefficientFn::piecewise_polynomial({0.0, 0.5, 1.0},
                                                 {{0.0, 0.0, 1.0}, {0.25, 1.0, 1.0}});
    CHECK(p(0.3) == doctest::Approx(0.09));
    CHECK(p(0.5) == doctest::Approx(0.25));
    CHECK(p(0.75) == doctest::Approx(0.25 + 0.25 + 0.0625));

    CHECK_THROWS_AS(CoefficientFn::piecewise_polynomial({0.0, 0.5, 1.0},
                                                        {{0.0, 1.0}, {10.0, 1.0}}),
                    ConfigError);

    std::vector<double> knots, vals;
    for (int i = 0; i <= 40; ++i) {
        double t = i / 40.0;
        knots.push_back(t);
        vals.push_back(std::sin(2.0 * t));
    }
    auto tb = CoefficientFn::table(knots, vals, 3);
    for (double t : {0.11, 0.37, 0.52, 0.93})
        CHECK(rel_err(tb(t), std::sin(2.0 * t)) < 1e-5);
}

TEST_CASE("monotonicity_beta on reference matrices") {
    Example8 ex = example8_system();
    double beta = monotonicity_beta(ex.system, 512);
    // a cruder hand bound; the symmetric-eigenvalue margin is 3 - sqrt(5)
    double crude_bound = 2.0 - std::pow(std::sqrt(2.0) + 1.0, 2) / 4.0;
    CHECK(beta >= crude_bound);
    CHECK(beta == doctest::Approx(3.0 - std::sqrt(5.0)).epsilon(1e-10));

    CHECK(monotonicity_beta(diagonal_system(), 64) == doctest::Approx(1.0).epsilon(1e-12));

    CoefficientSet bad = diagonal_system();
    bad.H12 = CoefficientFn::constant(10.0);
    CHECK(monotonicity_beta(bad, 64) == 0.0);
}

TEST_CASE("lambda_b: direct evaluation of the threshold ratio") {
    CHECK(lambda_b(diagonal_system(), 64) == doctest::Approx(1.0).epsilon(1e-12));

    CoefficientSet half = diagonal_system();
    half.h22 = CoefficientFn::constant(-2.0);
    CHECK(lambda_b(half, 64) == doctest::Approx(0.5).epsilon(1e-12));

    // worked example: min(H22 - H33 H13^2) = -2; max h22 = h22(0) = 10 T1 - 1
    Example8 ex = example8_system();
    double expected = -2.0 / (10.0 * ex.T1 - 1.0);
    CHECK(rel_err(lambda_b(ex.system, 2048), expected) < 1e-9);
    CHECK(lambda_b(ex.system, 2048) > 3.0);  // the lambda = 3 eigenvalue sits below lambda_b

    // flat-h22 variant of the same matrix: max h22 = -1 gives exactly 2
    CoefficientSet flat = ex.system;
    flat.h22 = CoefficientFn::constant(-1.0);
    CHECK(lambda_b(flat, 64) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("lambda_b positivity guarantee (3.7)") {
    Example8 ex = example8_system();
    for (const CoefficientSet& c : {diagonal_system(), ex.system}) {
        double lb = lambda_b(c, 512);
        auto grid = validation_grid(c, 512);
        double worst = 1e300;
        for (double t : grid) {
            double h13 = c.H13(t);
            worst = std::min(worst, c.H22(t) - c.H33(t) * h13 * h13 - lb * 1.01 * c.h22(t));
        }
        CHECK(worst > 0.0);
    }
}

TEST_CASE("all-eigenvalue sufficient condition") {
    // sup-norms (0.25, 1, 1.5, T=1): 4*0.25*1 = 1 <= 2.25 < 4
    CoefficientSet c;
    c.T = 1.0;
    c.H11 = CoefficientFn::constant(0.25);
    c.H12 = CoefficientFn::constant(0.75);
    c.H21 = c.H12;
    c.H13 = CoefficientFn::constant(0.0);
    c.H31 = c.H13;
    c.H22 = CoefficientFn::piecewise_linear({0.0, 1.0}, {-1.0, -2.0});
    c.H32 = CoefficientFn::constant(0.0);
    c.H33 = CoefficientFn::constant(-1.0);
    c.h22 = CoefficientFn::constant(-1.0);
    c.h23_derived = true;
    CHECK(check_all_eigen_condition(c, 512));

    // H21 = H13 = 0 with time-dependent quadratic coefficient: left side
    // positive, middle norm zero
    CoefficientSet z = c;
    z.H12 = CoefficientFn::constant(0.0);
    z.H21 = z.H12;
    CHECK_FALSE(check_all_eigen_condition(z, 512));

    CHECK_FALSE(check_all_eigen_condition(example8_system().system, 512));

    // constant coefficients make both outer norms vanish, so the chain of
    // inequalities holds (and indeed the diagonal spectrum lies above lambda_b)
    CHECK(check_all_eigen_condition(diagonal_system(), 64));
}

TEST_CASE("envelopes: margins, clamps, derived products") {
    CoefficientSet c = diagonal_system();
    Envelopes e = envelopes(c, 64, 0.01);
    CHECK(e.H11_lo == doctest::Approx(0.99));
    CHECK(e.H11_hi == doctest::Approx(1.01));

    // sine-perturbed H11 on [0, pi]
    CoefficientSet s = c;
    s.T = std::numbers::pi;
    std::vector<double> knots, vals;
    for (int i = 0; i <= 400; ++i) {
        double t = std::numbers::pi * i / 400.0;
        knots.push_back(t);
        vals.push_back(1.0 + 0.1 * std::sin(t));
    }
    s.H11 = CoefficientFn::table(knots, vals, 3);
    Envelopes es = envelopes(s, 2048, 0.01);
    CHECK(es.H11_lo == doctest::Approx(0.99).epsilon(1e-6));
    CHECK(es.H11_hi == doctest::Approx(1.11).epsilon(1e-6));

    Example8 ex = example8_system();
    Envelopes e8 = envelopes(ex.system, 256, 0.01);
    CHECK(e8.H33_lo == doctest::Approx(-2.01));
    CHECK(e8.absH13_hi == doctest::Approx(1.01));
    CHECK(e8.H23_hi == doctest::Approx(2.0301));

    CHECK_THROWS_AS(envelopes(c, 64, 2.0), EnvelopeInfeasible);

    // strict bracketing on the grid
    auto grid = validation_grid(ex.system, 256);
    Envelopes eg = envelopes(ex.system, 256);
    for (double t : grid) {
        CHECK(eg.H11_lo < ex.system.H11(t));
        CHECK(ex.system.H11(t) < eg.H11_hi);
        CHECK(eg.h22_lo < ex.system.h22(t));
        CHECK(ex.system.h22(t) < eg.h22_hi);
    }
}

TEST_CASE("validation report") {
    ValidationReport rd = validate(diagonal_system(), 256);
    CHECK(rd.structural_ok);
    CHECK(rd.beta == doctest::Approx(1.0));
    CHECK(rd.lambda_b == doctest::Approx(1.0));

    Example8 ex = example8_system();
    ValidationReport r8 = validate(ex.system, 2048);
    CHECK(r8.structural_ok);
    CHECK_FALSE(r8.all_eigen_condition_ok);
    CHECK(r8.violations.empty());

    // injected structural violation: explicit H23 inconsistent with -H33*H13
    CoefficientSet bad = ex.system;
    bad.h23_derived = false;
    bad.H23 = CoefficientFn::constant(2.1);
    ValidationReport rb = validate(bad, 256);
    CHECK_FALSE(rb.structural_ok);
    CHECK(rb.violations.size() > 0);
    CHECK_THROWS_AS(require_valid(bad, 256), ValidationError);

    CoefficientSet pos = diagonal_system();
    pos.h22 = CoefficientFn::constant(0.5);
    CHECK_FALSE(validate(pos, 64).structural_ok);
}

TEST_CASE("beta is stable under grid refinement") {
    CoefficientSet s = diagonal_system();
    std::vector<double> knots, vals;
    for (int i = 0; i <= 200; ++i) {
        double t = i / 200.0;
        knots.push_back(t);
        vals.push_back(1.0 + 0.1 * std::sin(3.0 * t));
    }
    s.H11 = CoefficientFn::table(knots, vals, 3);
    double b1 = monotonicity_beta(s, 2048);
    double b2 = monotonicity_beta(s, 4096);
    CHECK(std::fabs(b1 - b2) < 0.5 * s.T / 2048.0);
}

TEST_CASE("JSON loading: schema, synthesis, rejection") {
    CoefficientSet d = load_coefficient_set_json(kDiagonalSystemJson);
    CHECK(d.T == 1.0);
    CHECK(d.H11(0.5) == 1.0);
    CHECK(d.h23_derived);
    CHECK(d.eval_H23(0.3) == 0.0);

    CHECK_THROWS_AS(load_coefficient_set_json(R"({"T": 1, "bogus": 1})"), ConfigError);
    CHECK_THROWS_AS(load_coefficient_set_json(R"({"T": -1})"), ConfigError);
    CHECK_THROWS_AS(load_coefficient_set_json("not json"), ConfigError);

    // synthesized H23 satisfies the structural identity exactly
    const char* cfg = R"({
      "T": 1.0,
      "H11": {"kind": "constant", "values": [3.0]},
      "H12": {"kind": "constant", "values": [0.0]},
      "H13": {"kind": "pwlinear", "knots": [0.0, 1.0], "values": [1.0, 0.5]},
      "H21": {"kind": "constant", "values": [0.0]},
      "H22": {"kind": "constant", "values": [-4.0]},
      "H31": {"kind": "pwlinear", "knots": [0.0, 1.0], "values": [1.0, 0.5]},
      "H32": {"kind": "constant", "values": [0.0]},
      "H33": {"kind": "pwlinear", "knots": [0.0, 1.0], "values": [-2.0, -1.5]},
      "h22": {"kind": "constant", "values": [-1.0]}
    })";
    CoefficientSet c = load_coefficient_set_json(cfg);
    CHECK(c.h23_derived);
    for (double t : validation_grid(c, 313))
        CHECK(std::fabs(c.eval_H23(t) + c.H33(t) * c.H13(t)) <= 1e-10);

    // round-trip of the representable kinds
    CoefficientSet rt = load_coefficient_set_json(coefficient_set_to_json(c));
    for (double t : {0.0, 0.25, 0.7, 1.0}) CHECK(rt.H13(t) == c.H13(t));
}
