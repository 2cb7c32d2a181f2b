#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

using namespace riccati;

namespace {
const double pi = std::numbers::pi;

// diagonal system: every segment has length pi / (2 sqrt(lambda - 1))
double diag_segment(double lambda) { return pi / (2.0 * std::sqrt(lambda - 1.0)); }
}  // namespace

TEST_CASE("diagonal chain crosses zero inside the first segment at lambda = 2") {
    BlowupChain ch = compute_chain(diagonal_system(), 2.0, {});
    CHECK(ch.termination == ChainTermination::CrossedZero);
    CHECK(ch.crossed_index == 1);
    CHECK(std::fabs(ch.crossed_time - (1.0 - pi / 2.0)) < 1e-8);
    CHECK(ch.segment_kinds.size() == 1);
    CHECK(ch.segment_kinds[0] == Equation::Primal);
}

TEST_CASE("diagonal chain lands exactly at zero at the first eigenvalue") {
    double lam1 = 1.0 + pi * pi / 4.0;
    BlowupChain ch = compute_chain(diagonal_system(), lam1, {});
    CHECK(ch.termination == ChainTermination::DefectAtZero);
    CHECK(std::fabs(ch.defect) < 1e-6);
}

TEST_CASE("chain_time gives the breakpoint sequence and the BelowZero sentinel") {
    CoefficientSet d = diagonal_system();
    ChainTime t1 = chain_time(d, 5.0, 1);
    REQUIRE(t1.t.has_value());
    CHECK(std::fabs(*t1.t - (1.0 - pi / 4.0)) < 1e-8);
    CHECK_FALSE(t1.below_zero);

    ChainTime t2 = chain_time(d, 5.0, 2);
    REQUIRE(t2.t.has_value());  // reported raw even though below zero
    CHECK(std::fabs(*t2.t - (1.0 - pi / 2.0)) < 1e-8);
    CHECK(t2.below_zero);

    ChainTime t5 = chain_time(d, 5.0, 5);
    CHECK_FALSE(t5.t.has_value());
    CHECK(t5.below_zero);
}

TEST_CASE("defect values along the diagonal family") {
    CoefficientSet d = diagonal_system();
    double lam1 = 1.0 + pi * pi / 4.0;
    CHECK(std::fabs(eigen_defect(d, lam1)) < 1e-6);
    CHECK_THROWS_AS(eigen_defect(d, 2.0), UndefinedDefect);
    CHECK_THROWS_AS(eigen_defect(d, 5.0), UndefinedDefect);  // dual blows below zero

    // the defect-extension chain reads the dual value at 0 instead
    ChainOptions ext;
    ext.defect_extension = true;
    BlowupChain ch = compute_chain(d, 5.0, ext);
    REQUIRE(ch.termination == ChainTermination::DefectAtZero);
    double u = 2.0;  // sqrt(lambda - 1)
    double expect = -u * std::tan(u * (1.0 - pi / 4.0));
    CHECK(std::fabs(ch.defect - expect) < 1e-7);

    // and the sign flips across the first eigenvalue
    BlowupChain lo = compute_chain(d, lam1 - 0.05, ext);
    BlowupChain hi = compute_chain(d, lam1 + 0.05, ext);
    CHECK(lo.defect > 0.0);
    CHECK(hi.defect < 0.0);
}

TEST_CASE("worked example: one primal blow-up, then a dual zero return at 0") {
    Example8 ex = example8_system();
    BlowupChain ch = compute_chain(ex.system, 3.0, {});
    CHECK(ch.termination == ChainTermination::DefectAtZero);
    CHECK(std::fabs(ch.defect) < 1e-6);
    REQUIRE(ch.depth() == 1);
    CHECK(std::fabs(ch.breakpoints[1] - ex.T1) < 1e-8);
    REQUIRE(ch.segments.size() == 2);
    CHECK(ch.segments[0].termination.kind == TerminationEvent::Kind::BlowUpPlusInf);
    CHECK(ch.segments[1].termination.kind == TerminationEvent::Kind::ZeroReturn);
    CHECK(std::fabs(ch.segments[1].termination.t) < 1e-8);
}

TEST_CASE("worked example: interior zero return just below the eigenvalue") {
    Example8 ex = example8_system();
    BlowupChain ch = compute_chain(ex.system, 2.99, {});
    CHECK(ch.termination == ChainTermination::ZeroReturnAtInterior);
    CHECK(ch.zero_return_t > 0.0);
    CHECK(ch.zero_return_t < ex.T1);

    // further down the primal blow-up dissolves and the chain survives to 0
    BlowupChain lo = compute_chain(ex.system, 2.9, {});
    CHECK(lo.termination == ChainTermination::DefectAtZero);
    CHECK(lo.defect > 0.0);

    // above the eigenvalue the dual is still negative at 0; its zero return
    // happens strictly below 0 (frozen coefficients) and must not change the
    // classification
    BlowupChain hi = compute_chain(ex.system, 3.05, {});
    CHECK(hi.termination == ChainTermination::DefectAtZero);
    CHECK(hi.defect < 0.0);
    REQUIRE(hi.segments.size() == 2);
    CHECK(hi.segments[1].termination.kind == TerminationEvent::Kind::ZeroReturn);
    CHECK(hi.segments[1].termination.t < 0.0);
}

TEST_CASE("alternation: segment kinds and event kinds match for lambda > lambda_b") {
    BlowupChain ch = compute_chain(diagonal_system(), 30.0, {});
    CHECK(ch.depth() >= 3);
    for (int j = 1; j <= ch.depth(); ++j) {
        Equation kind = ch.segment_kinds[static_cast<std::size_t>(j - 1)];
        CHECK(kind == (j % 2 == 1 ? Equation::Primal : Equation::Dual));
        auto ev = ch.segments[static_cast<std::size_t>(j - 1)].termination.kind;
        CHECK(ev == (kind == Equation::Primal ? TerminationEvent::Kind::BlowUpPlusInf
                                              : TerminationEvent::Kind::BlowUpMinusInf));
        // closed-form segment length
        double want = 1.0 - j * diag_segment(30.0);
        CHECK(std::fabs(ch.breakpoints[static_cast<std::size_t>(j)] - want) < 1e-7);
    }
}

TEST_CASE("t_1 is nondecreasing in lambda on random valid systems") {
    std::mt19937_64 gen(99);
    for (int trial = 0; trial < 5; ++trial) {
        CoefficientSet c = riccati::testing::random_valid_set(gen);
        double lb = lambda_b(c, 512);
        ChainOptions co;
        co.integ.floor = -2.0 * c.T;
        double prev = -1e300;
        for (int i = 0; i < 10; ++i) {
            double lam = lb * (1.05 + 0.55 * i);
            ChainTime ct = chain_time(c, lam, 1, co);
            double cur = ct.t ? *ct.t : -1e300;
            CHECK(cur >= prev - 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("deeper breakpoint maps stay monotone on a random valid system") {
    std::mt19937_64 gen(4242);
    CoefficientSet c = riccati::testing::random_valid_set(gen);
    double lb = lambda_b(c, 512);
    for (int j : {2, 3}) {
        double prev = -1e300;
        for (int i = 0; i < 8; ++i) {
            double lam = lb * (4.0 + 4.0 * i);
            ChainTime ct = chain_time(c, lam, j);
            double cur = ct.t ? *ct.t : -1e300;
            CHECK(cur >= prev - 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("later start never lowers the blow-up time (terminal monotonicity)") {
    std::mt19937_64 gen(123);
    for (int trial = 0; trial < 5; ++trial) {
        CoefficientSet c = riccati::testing::random_valid_set(gen);
        double lam = lambda_b(c, 512) * 2.0;
        IntegratorOptions io;
        io.floor = -3.0 * c.T;
        RiccatiSolution from_T = integrate_primal(c, lam, c.T, 0.0, io);
        RiccatiSolution from_08 = integrate_primal(c, lam, 0.8 * c.T, 0.0, io);
        bool bt1 = from_T.termination.kind == TerminationEvent::Kind::BlowUpPlusInf;
        bool bt2 = from_08.termination.kind == TerminationEvent::Kind::BlowUpPlusInf;
        if (bt1 && bt2) CHECK(from_08.termination.t <= from_T.termination.t + 1e-9);
        // if the later start already survives to the floor, so must the earlier one
        if (!bt1) CHECK_FALSE(bt2);
    }
}

TEST_CASE("t_1(lambda) approaches T like lambda^{-1/2}") {
    CoefficientSet d = diagonal_system();
    double prev_gap = -1.0;
    for (double lam : {10.0, 100.0, 1000.0, 10000.0}) {
        ChainTime ct = chain_time(d, lam, 1);
        REQUIRE(ct.t.has_value());
        double gap = 1.0 - *ct.t;
        CHECK(gap > 0.0);
        if (prev_gap > 0.0) {
            double ratio = gap / prev_gap;
            CHECK(ratio > 0.25);
            CHECK(ratio < 0.40);  // exact value ~ sqrt(1/10)
        }
        prev_gap = gap;
    }
}

TEST_CASE("a dual blow-down landing at zero is not an eigenvalue configuration") {
    // at lambda = 1 + pi^2 the second breakpoint of the diagonal chain lands
    // exactly on 0, but the dual representation diverges there
    double lam = 1.0 + pi * pi;
    BlowupChain plain = compute_chain(diagonal_system(), lam, {});
    CHECK(plain.termination == ChainTermination::CrossedZero);
    CHECK(plain.crossed_index == 2);
    CHECK(std::fabs(plain.crossed_time) < 1e-8);

    ChainOptions ext;
    ext.defect_extension = true;
    BlowupChain de = compute_chain(diagonal_system(), lam, ext);
    CHECK(de.termination == ChainTermination::DefectAtZero);
    CHECK(std::fabs(de.defect) > 1e6);  // diverging, never within defect tolerance
}

TEST_CASE("deep chains track the closed-form breakpoint arithmetic") {
    CoefficientSet d = diagonal_system();
    double lam = 1e4;
    BlowupChain ch = compute_chain(d, lam, {});
    double seg = pi / (2.0 * std::sqrt(lam - 1.0));
    CHECK(ch.depth() == static_cast<int>(std::floor(1.0 / seg)));
    for (int j : {1, ch.depth() / 2, ch.depth()}) {
        double want = 1.0 - j * seg;
        CHECK(std::fabs(ch.breakpoints[static_cast<std::size_t>(j)] - want) < 1e-9);
    }
}

TEST_CASE("chain serializes to JSON") {
    BlowupChain ch = compute_chain(diagonal_system(), 30.0, {});
    std::string js = ch.to_json();
    CHECK(js.find("\"lambda\"") != std::string::npos);
    CHECK(js.find("\"breakpoints\"") != std::string::npos);
    CHECK(js.find("\"termination\"") != std::string::npos);
}
