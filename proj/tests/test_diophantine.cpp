#include "bdiv/diophantine.hpp"

#include "bdiv/superlinear.hpp"

#include "doctest.h"

using namespace bdiv;

namespace {

TargetPoint root2_target()
{
    return TargetPoint::parse({"1", "sqrt(2)"});
}

}  // namespace

TEST_CASE("nearest integer distances are exact for rationals")
{
    CHECK(nearest_integer_distance(QuadNum(Rat(5, 4))) == QuadNum(Rat(1, 4)));
    CHECK(nearest_integer_distance(QuadNum(Int(3))).is_zero());
    CHECK(nearest_integer_distance(QuadNum(Rat(7, 10))) == QuadNum(Rat(3, 10)));
    // Halfway: distance to either neighbour is exactly 1/2.
    CHECK(nearest_integer_distance(QuadNum(Rat(1, 2))) == QuadNum(Rat(1, 2)));
}

TEST_CASE("nearest integer distance of sqrt(2) is certified to high precision")
{
    QuadNum root2 = QuadNum::sqrt_of(Int(2));
    QuadNum distance = nearest_integer_distance(root2);
    CHECK(distance == root2 - QuadNum(Int(1)));
    Enclosure enclosure = nearest_integer_distance(root2, 48);
    CHECK(enclosure.hi - enclosure.lo <= Rat(1, Int(1) << 40));
    // 0.41421356237 bounds from below and above at 10^-12 scale.
    CHECK(enclosure.lo > Rat(414213562372L, Int(1000000000000L)));
    CHECK(enclosure.hi < Rat(414213562374L, Int(1000000000000L)));
}

TEST_CASE("target point parsing fixes the leading coordinate")
{
    TargetPoint x = root2_target();
    CHECK(x.r() == 1);
    CHECK(x.coords()[0] == QuadNum(Int(1)));
    CHECK_FALSE(x.is_rational());
    CHECK(TargetPoint::parse({"1", "3/4"}).is_rational());
    CHECK_THROWS_AS(TargetPoint::parse({"2", "sqrt(2)"}), ValidationError);
    CHECK_THROWS_AS(TargetPoint::parse({"1"}), ValidationError);
}

TEST_CASE("approximant for sqrt(2) is the continued-fraction convergent 3/2")
{
    Approximant a = find_approximant(root2_target(), Int(10000));
    CHECK(a.q == 2);
    REQUIRE(a.p.size() == 1);
    CHECK(a.p(0) == 3);
    // ‖2·sqrt(2)‖ = 3 − 2 sqrt(2) ≈ 0.1716 < 1/2, certified by the enclosure.
    REQUIRE(a.errors.size() == 1);
    CHECK(a.errors[0].hi < Rat(1, 2));
    QuadNum exact = nearest_integer_distance(QuadNum(Rat(2)) * QuadNum::sqrt_of(Int(2)));
    CHECK(exact == QuadNum(Int(3)) - QuadNum(Rat(2)) * QuadNum::sqrt_of(Int(2)));
}

TEST_CASE("the first approximant above q=2 is q=3, not the next convergent")
{
    // ‖3 sqrt(2)‖ = 3 sqrt(2) − 4 ≈ 0.2426 < 1/3, so the exhaustive scan stops
    // before the convergent 7/5; the inequality does not require convergents.
    Approximant a = find_approximant(root2_target(), Int(10000), Int(3));
    CHECK(a.q == 3);
    CHECK(a.p(0) == 4);
    QuadNum error = nearest_integer_distance(QuadNum(Rat(3)) * QuadNum::sqrt_of(Int(2)));
    CHECK(error < QuadNum(Rat(1, 3)));
}

TEST_CASE("rational targets are hit exactly by their denominator")
{
    Approximant a = find_approximant(TargetPoint::parse({"1", "1/2"}), Int(100));
    CHECK(a.q == 2);
    CHECK(a.p(0) == 1);
    CHECK(a.errors[0].lo == Rat(0));
    CHECK(a.errors[0].hi == Rat(0));
}

TEST_CASE("approximant scan failure below the cap is an enumeration error")
{
    // For (1, sqrt(2)) with r = 1 every q >= 1 is tested against q^-1; caps
    // below the first witness force the reported failure.
    CHECK_THROWS_AS(find_approximant(root2_target(), Int(1)), EnumerationError);
}

TEST_CASE("u-system for sqrt(2) matches the worked construction")
{
    TargetPoint x = root2_target();
    USystem u = build_u_system(x, find_approximant(x, Int(100)));
    CHECK(u.q == 2);
    REQUIRE(u.u.size() == 2);
    CHECK(u.u[0] == make_point({2, 3}));
    CHECK(u.u[1] == make_point({2, 2}));
    CHECK_FALSE(u.has_degenerate_coordinate());

    // Exact convex relation: (1-w) u0 + w u1 = q x in Q(sqrt(2)).
    QuadNum w = u.weights[1];
    CHECK(w == QuadNum(Int(3)) - QuadNum(Rat(2)) * QuadNum::sqrt_of(Int(2)));
    for (int coord = 0; coord < 2; ++coord) {
        QuadNum lhs = (QuadNum(Int(1)) - w) * QuadNum(Rat(u.u[0](coord))) +
                      w * QuadNum(Rat(u.u[1](coord)));
        QuadNum rhs = QuadNum(Rat(u.q)) * x.coords()[static_cast<std::size_t>(coord)];
        CHECK(lhs == rhs);
    }
}

TEST_CASE("u-system weights for a rational target degenerate to the base vector")
{
    TargetPoint x = TargetPoint::parse({"1", "1/2"});
    USystem u = build_u_system(x, find_approximant(x, Int(100)));
    CHECK(u.weights[0] == QuadNum(Int(1)));
    CHECK(u.weights[1].is_zero());
    CHECK(u.has_degenerate_coordinate());
    CHECK(u.u[1] == u.u[0]);
}

TEST_CASE("two-irrational system satisfies the relation within enclosure width")
{
    TargetPoint x = TargetPoint::parse({"1", "sqrt(2)", "sqrt(3)"});
    Approximant a = find_approximant(x, Int(10000));
    USystem u = build_u_system(x, a);
    REQUIRE(u.u.size() == 3);
    // The relation holds exactly in the quadratic field extension.
    for (int coord = 0; coord < 3; ++coord) {
        QuadNum lhs;
        for (std::size_t i = 0; i < u.u.size(); ++i)
            lhs += u.weights[i] * QuadNum(Rat(u.u[i](coord)));
        QuadNum rhs = QuadNum(Rat(u.q)) * x.coords()[static_cast<std::size_t>(coord)];
        CHECK(lhs == rhs);
    }
    // Residual as a decimal enclosure is far below 1e-9.
    for (std::size_t i = 1; i < u.weight_enclosures.size(); ++i) {
        CHECK(u.weight_enclosures[i].hi - u.weight_enclosures[i].lo < Rat(1, 1000000000000L));
    }
}

TEST_CASE("walk starts from the sum of system vectors and conserves tallies")
{
    TargetPoint x = root2_target();
    USystem u = build_u_system(x, find_approximant(x, Int(100)));
    WalkReport report = walk(u, x, 512);
    REQUIRE(!report.checkpoints.empty());
    const WalkCheckpoint& last = report.checkpoints.back();
    CHECK(last.n == 512);

    // v_n = sum of tallies times vectors, exactly.
    VectorZ recombined = VectorZ::Zero(2);
    for (std::size_t i = 0; i < u.u.size(); ++i) recombined += last.tally[i] * u.u[i];
    CHECK(recombined == last.v);

    // Tally counts the initial v_0 = u_0 + u_1 plus one pick per step.
    Int tally_sum = 0;
    for (const Int& t : last.tally) tally_sum += t;
    CHECK(tally_sum == 512 + 2);

    // Run-length encoding replays to the same step count.
    long replayed = 0;
    for (const auto& [j, length] : report.chosen_runs) {
        CHECK(j >= 0);
        CHECK(j < 2);
        replayed += length;
    }
    CHECK(replayed == 512);
}

TEST_CASE("walk distances shrink and tallies approach the weights")
{
    TargetPoint x = root2_target();
    USystem u = build_u_system(x, find_approximant(x, Int(100)));
    WalkReport report = walk(u, x, 4096);
    const WalkCheckpoint& last = report.checkpoints.back();

    // d_N^2 < (1/100)^2 at N = 4096 — exact comparison in Q(sqrt(2)).
    CHECK(last.distance_squared < QuadNum(Rat(1, 10000)));

    // Tally fractions approximate the convex weights within 10 d_N; compare
    // via squared quantities to stay in exact arithmetic: |t/n - w| <= 1/100.
    Int n_total = 2 + 4096;
    for (std::size_t i = 0; i < u.u.size(); ++i) {
        QuadNum deviation = QuadNum(Rat(last.tally[i], n_total)) - u.weights[i];
        CHECK(deviation.abs() < QuadNum(Rat(1, 100)));
    }

    // Window maxima of d^2 decrease strictly once the walk settles.
    REQUIRE(report.window_max_distance_squared.size() >= 8);
    for (std::size_t k = 4; k + 1 < report.window_max_distance_squared.size(); ++k)
        CHECK(report.window_max_distance_squared[k + 1] <
              report.window_max_distance_squared[k]);
}

TEST_CASE("walks on rational targets stop at the first wall")
{
    TargetPoint x = TargetPoint::parse({"1", "1/2"});
    USystem u = build_u_system(x, find_approximant(x, Int(100)));
    CHECK_THROWS_AS(walk(u, x, 64), DegeneracyError);
}

TEST_CASE("attached monoid functions log nonnegative additivity defects")
{
    TargetPoint x = root2_target();
    USystem u = build_u_system(x, find_approximant(x, Int(100)));
    FgMonoid domain(2, {make_point({1, 0}), make_point({0, 1})});
    MonoidFunction f = floor_linear_function(domain, make_rational_point({Rat(5, 3), Rat(4, 3)}),
                                             Int(1000000));
    WalkReport report = walk(u, x, 256, f);
    CHECK(report.additivity_defects.size() == 256);
    for (const Rat& defect : report.additivity_defects) CHECK(defect >= 0);
}
