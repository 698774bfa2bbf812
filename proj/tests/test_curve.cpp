#include "bdiv/curve.hpp"

#include "doctest.h"

#include <random>

using namespace bdiv;

namespace {

FgMonoid line()
{
    return FgMonoid(1, {make_point({1})});
}

FgMonoid orthant2()
{
    return FgMonoid(2, {make_point({1, 0}), make_point({0, 1})});
}

/** The worked system m(n) = floor(5n/3) P on N. */
MobileSystem system_53()
{
    std::map<std::string, VectorQ> coeffs;
    coeffs["P"] = make_rational_point({Rat(5, 3)});
    return floor_linear_system(line(), coeffs, Int(100000));
}

SaturationDatum datum_23()
{
    return SaturationDatum({{"P", Rat(2, 3)}});
}

MobileSystem additive_2a3b()
{
    std::map<std::string, VectorQ> coeffs;
    coeffs["P"] = make_rational_point({Rat(2), Rat(3)});
    return floor_linear_system(orthant2(), coeffs, Int(100000));
}

/** Reference straightening with an independent scan window. */
Rat brute_sharp(const MobileSystem& m, const std::string& point, const VectorZ& s, long cap)
{
    Rat best(-1);
    for (long lambda = 1; lambda <= cap; ++lambda) {
        Rat candidate = Rat(divisor_coefficient(m(Int(lambda) * s), point), lambda);
        if (candidate > best) best = candidate;
    }
    return best;
}

}  // namespace

TEST_CASE("system validation passes the worked and additive systems")
{
    CHECK(validate_system(system_53(), Int(50), 3).passed());
    CHECK(validate_system(additive_2a3b(), Int(20), 3).passed());
}

TEST_CASE("values supported off the declared set are a hard violation")
{
    MobileSystem stray(line(),
                       [](const VectorZ& s) {
                           CurveDivisor d;
                           d["P"] = coordinate_sum(s);
                           if (s(0) == 2) d["Q"] = 1;
                           return d;
                       },
                       {"P"}, Int(1000));
    Certificate cert = validate_system(stray, Int(10), 2);
    CHECK(cert.verdict == Verdict::Violation);
    REQUIRE(!cert.witnesses.empty());
    CHECK(cert.witnesses.front().find("(2)") != std::string::npos);
}

TEST_CASE("negative values are rejected as non-mobile")
{
    MobileSystem negative(line(),
                          [](const VectorZ& s) {
                              CurveDivisor d;
                              d["P"] = s(0) == 3 ? Int(-1) : coordinate_sum(s);
                              return d;
                          },
                          {"P"}, Int(1000));
    CHECK(validate_system(negative, Int(10), 2).verdict == Verdict::Violation);
}

TEST_CASE("saturation holds for the worked system at the documented bounds")
{
    Certificate cert = check_saturation(system_53(), datum_23(), Int(50), Int(12));
    CHECK(cert.passed());
    // Spot values behind the certificate: ceil(5/3 - 2/3) = 1 <= m(1) = 1 and
    // ceil(10/3 - 2/3) = 3 <= m(2) = 3.
    CHECK(divisor_coefficient(system_53()(make_point({1})), "P") == 1);
    CHECK(divisor_coefficient(system_53()(make_point({2})), "P") == 3);
}

TEST_CASE("additive systems are saturated for every f below one")
{
    for (const Rat& f : {Rat(1, 4), Rat(1, 2), Rat(9, 10)}) {
        SaturationDatum datum({{"P", f}});
        CHECK(check_saturation(additive_2a3b(), datum, Int(12), Int(6)).passed());
    }
}

TEST_CASE("a system growing past its first value fails saturation at (1,1,2)")
{
    // m(1) = 1 but m(n) = 2n afterwards: ceil((1/2)m(2) - 1/2) = 2 > 1.
    MobileSystem jumpy(line(),
                       [](const VectorZ& s) {
                           CurveDivisor d;
                           d["P"] = s(0) <= 1 ? Int(s(0)) : Int(2 * s(0));
                           return d;
                       },
                       {"P"}, Int(100000));
    SaturationDatum half({{"P", Rat(1, 2)}});
    Certificate cert = check_saturation(jumpy, half, Int(10), Int(6));
    CHECK(cert.verdict == Verdict::Violation);
    REQUIRE(!cert.witnesses.empty());
    CHECK(cert.witnesses.front() == "saturation fails at s=(1), mu=1, nu=2, point P");
}

TEST_CASE("floor of three-halves is saturated at f = 1/2")
{
    // ceil((mu/nu) floor(3 nu s/2) - 1/2) = floor(3 mu s/2) for all tested
    // (s, mu, nu): the half-integer drop of the ceiling absorbs the fractional
    // part exactly, so this system passes — and its straightening is honest:
    // e_s in {0, 1/2} with b = 1/2.
    std::map<std::string, VectorQ> coeffs;
    coeffs["P"] = make_rational_point({Rat(3, 2)});
    MobileSystem m = floor_linear_system(line(), coeffs, Int(100000));
    SaturationDatum half({{"P", Rat(1, 2)}});
    CHECK(check_saturation(m, half, Int(30), Int(10)).passed());
    CHECK(dichotomy_check(m, half, Int(30)).passed());
    CHECK(index_bound_check(m, half, Int(30)).passed());
    CHECK(straightened_component(m, "P", make_point({1}), Int(2)).value == Rat(3, 2));
}

TEST_CASE("b-constants follow min(1 - f, 1/2) with the triviality flag")
{
    BConstants b23 = compute_b(SaturationDatum({{"P", Rat(2, 3)}}));
    CHECK(b23.b.at("P") == Rat(1, 3));
    CHECK_FALSE(b23.straightening_trivial.at("P"));
    CHECK(b23.minimum == Rat(1, 3));

    BConstants b14 = compute_b(SaturationDatum({{"P", Rat(1, 4)}}));
    CHECK(b14.b.at("P") == Rat(1, 2));
    CHECK(b14.straightening_trivial.at("P"));

    BConstants b910 = compute_b(SaturationDatum({{"P", Rat(9, 10)}}));
    CHECK(b910.b.at("P") == Rat(1, 10));

    BConstants mixed = compute_b(SaturationDatum({{"P", Rat(2, 3)}, {"Q", Rat(4, 5)}}));
    CHECK(mixed.minimum == Rat(1, 5));

    CHECK_THROWS_AS(SaturationDatum({{"P", Rat(1)}}), ValidationError);
    CHECK_THROWS_AS(SaturationDatum({{"P", Rat(3, 2)}}), ValidationError);
}

TEST_CASE("straightened component values match the worked example")
{
    MobileSystem m = system_53();
    StraightenedValue one = straightened_component(m, "P", make_point({1}), Int(3));
    CHECK(one.value == Rat(5, 3));
    CHECK(one.index == 3);
    StraightenedValue two = straightened_component(m, "P", make_point({2}), Int(3));
    CHECK(two.value == Rat(10, 3));
    CHECK(two.index == 3);
    for (long n = 1; n <= 10; ++n) {
        VectorZ s = make_point({n});
        CHECK(straightened_component(m, "P", s, Int(3)).value == brute_sharp(m, "P", s, 9));
    }
}

TEST_CASE("dichotomy gaps are exact for the worked system")
{
    MobileSystem m = system_53();
    CHECK(dichotomy_check(m, datum_23(), Int(50)).passed());
    // e_1 = 5/3 - 1 = 2/3 and e_2 = 10/3 - 3 = 1/3, both inside [1/3, 2/3].
    Rat e1 = straightened_component(m, "P", make_point({1}), Int(3)).value -
             Rat(divisor_coefficient(m(make_point({1})), "P"));
    Rat e2 = straightened_component(m, "P", make_point({2}), Int(3)).value -
             Rat(divisor_coefficient(m(make_point({2})), "P"));
    CHECK(e1 == Rat(2, 3));
    CHECK(e2 == Rat(1, 3));

    CHECK(dichotomy_check(additive_2a3b(), SaturationDatum({{"P", Rat(2, 3)}}), Int(12)).passed());
}

TEST_CASE("floors of the straightening reproduce the system under saturation")
{
    MobileSystem m = system_53();
    for (long n = 1; n <= 30; ++n) {
        VectorZ s = make_point({n});
        Rat sharp = straightened_component(m, "P", s, Int(3)).value;
        CHECK(rat_floor(sharp) == divisor_coefficient(m(s), "P"));
    }
}

TEST_CASE("index bound holds and additive systems have index one")
{
    CHECK(index_bound_check(system_53(), datum_23(), Int(50)).passed());
    CHECK(straightened_component(system_53(), "P", make_point({1}), Int(3)).index == 3);

    MobileSystem additive = additive_2a3b();
    CHECK(index_bound_check(additive, SaturationDatum({{"P", Rat(2, 3)}}), Int(12)).passed());
    CHECK(straightened_component(additive, "P", make_point({1, 1}), Int(3)).index == 1);
}

TEST_CASE("an unsaturated system is caught by the doubled index scan")
{
    // m = 0, 1, 3, 4, 5, ...: at s = 1 the straightened maximum 1 is first
    // attained at lambda = 3, beyond the cap floor(1/b) = 2 but inside the
    // doubled scan window, so the completeness check flags the input.
    MobileSystem gap(line(),
                     [](const VectorZ& s) {
                         CurveDivisor d;
                         if (s(0) == 2) d["P"] = 1;
                         else if (s(0) >= 3) d["P"] = s(0);
                         return d;
                     },
                     {"P"}, Int(100000));
    SaturationDatum datum({{"P", Rat(1, 2)}});
    CHECK_FALSE(check_saturation(gap, datum, Int(10), Int(6)).passed());
    Certificate cert = index_bound_check(gap, datum, Int(1));
    CHECK(cert.verdict == Verdict::Violation);
    REQUIRE(!cert.witnesses.empty());
    CHECK(cert.witnesses.front().find("exceeds the cap") != std::string::npos);
}

TEST_CASE("graded piece oracle validates and refutes generator sets")
{
    MobileSystem m = system_53();
    RationalCone ray(1, std::vector<VectorZ>{make_point({1})});

    GeneratorSet good{{{make_point({1}), {{"P", Int(1)}}},
                       {make_point({2}), {{"P", Int(3)}}},
                       {make_point({3}), {{"P", Int(5)}}}},
                      Provenance::OracleMinimal,
                      Int(30),
                      ray};
    CHECK(graded_piece_oracle(m, good, Int(30)).passed());

    GeneratorSet short_set{{{make_point({1}), {{"P", Int(1)}}},
                            {make_point({2}), {{"P", Int(3)}}}},
                           Provenance::OracleMinimal,
                           Int(30),
                           ray};
    Certificate cert = graded_piece_oracle(m, short_set, Int(30));
    CHECK(cert.verdict == Verdict::Violation);
    REQUIRE(!cert.witnesses.empty());
    // Best combination for s = 3 is 1 + 3 = 4 < 5.
    CHECK(cert.witnesses.front().find("(3)") != std::string::npos);

    GeneratorSet wrong_divisor{{{make_point({1}), {{"P", Int(2)}}}},
                               Provenance::OracleMinimal,
                               Int(10),
                               ray};
    CHECK_THROWS_AS(graded_piece_oracle(m, wrong_divisor, Int(10)), ValidationError);

    CHECK_THROWS_AS(graded_piece_oracle(m, good, Int(64)), EnumerationError);
}

TEST_CASE("additive systems are generated by the Hilbert basis exactly")
{
    MobileSystem m = additive_2a3b();
    RationalCone cone(2, std::vector<VectorZ>{make_point({2, 1}), make_point({1, 2})});
    FgMonoid basis = hilbert_basis_intersection(m.domain(), cone);
    GeneratorSet gens{{}, Provenance::OracleMinimal, Int(20), cone};
    for (const VectorZ& g : basis.generators()) gens.entries.push_back({g, m(g)});
    CHECK(graded_piece_oracle(m, gens, Int(20)).passed());
}

TEST_CASE("truncation witnesses for powers of sections")
{
    MobileSystem m = system_53();
    Certificate cert = truncation_integral_check(m, Int(6),
                                                 {make_point({1}), make_point({2})});
    CHECK(cert.passed());
    // kappa m(1) = 6 <= m(6) = 10.
    CHECK(divisor_coefficient(m(make_point({6})), "P") == 10);

    MobileSystem additive = additive_2a3b();
    CHECK(truncation_integral_check(additive, Int(4),
                                    {make_point({1, 1}), make_point({2, 1})})
              .passed());
}

TEST_CASE("pipeline reproduces the worked rank-one example")
{
    RationalCone ray(1, std::vector<VectorZ>{make_point({1})});
    PipelineResult result =
        finite_generation_pipeline(system_53(), datum_23(), ray, Int(30));
    CHECK(result.certificate.passed());
    CHECK(result.constants.b.at("P") == Rat(1, 3));
    CHECK(result.kappa == 6);

    REQUIRE(result.truncation_generators.entries.size() == 1);
    CHECK(result.truncation_generators.entries[0].point == make_point({6}));
    CHECK(divisor_coefficient(result.truncation_generators.entries[0].divisor, "P") == 10);

    REQUIRE(result.oracle_generators.has_value());
    REQUIRE(result.oracle_generators->entries.size() == 3);
    const auto& entries = result.oracle_generators->entries;
    CHECK(entries[0].point == make_point({1}));
    CHECK(divisor_coefficient(entries[0].divisor, "P") == 1);
    CHECK(entries[1].point == make_point({2}));
    CHECK(divisor_coefficient(entries[1].divisor, "P") == 3);
    CHECK(entries[2].point == make_point({3}));
    CHECK(divisor_coefficient(entries[2].divisor, "P") == 5);

    REQUIRE(result.pieces.size() == 1);
    CHECK(result.pieces[0].functional == make_rational_point({Rat(5, 3)}));
}

TEST_CASE("pipeline on an additive rank-two system returns Hilbert basis generators")
{
    MobileSystem m = additive_2a3b();
    SaturationDatum datum({{"P", Rat(1, 4)}});
    RationalCone cone(2, std::vector<VectorZ>{make_point({2, 1}), make_point({1, 2})});
    PipelineResult result = finite_generation_pipeline(m, datum, cone, Int(20));
    CHECK(result.certificate.passed());
    // f = 1/4 gives b = 1/2 and the uniform truncation constant 2! = 2.
    CHECK(result.kappa == 2);
    REQUIRE(result.pieces.size() == 1);
    CHECK(result.pieces[0].functional == make_rational_point({Rat(2), Rat(3)}));

    REQUIRE(result.oracle_generators.has_value());
    std::vector<VectorZ> points;
    for (const auto& entry : result.oracle_generators->entries) points.push_back(entry.point);
    std::vector<VectorZ> expected{make_point({1, 1}), make_point({1, 2}), make_point({2, 1})};
    CHECK(points == expected);
}

TEST_CASE("pipeline certifies the rank-two floor system with one piece")
{
    std::map<std::string, VectorQ> coeffs;
    coeffs["P"] = make_rational_point({Rat(5, 3), Rat(4, 3)});
    MobileSystem m = floor_linear_system(orthant2(), coeffs, Int(100000));
    RationalCone cone(2, std::vector<VectorZ>{make_point({2, 1}), make_point({1, 2})});
    PipelineResult result = finite_generation_pipeline(m, datum_23(), cone, Int(36));
    CHECK(result.certificate.passed());
    CHECK(result.kappa == 6);
    REQUIRE(result.pieces.size() == 1);
    CHECK(result.pieces[0].functional == make_rational_point({Rat(5, 3), Rat(4, 3)}));

    // Truncation generators sit over the Hilbert basis of C ∩ (6N)².
    FgMonoid truncated = truncate(m.domain(), {Int(6), Int(6)});
    FgMonoid basis = hilbert_basis_intersection(truncated, cone);
    CHECK(result.truncation_generators.entries.size() == basis.generators().size());
    for (const auto& entry : result.truncation_generators.entries) {
        CHECK(basis.contains(entry.point));
        CHECK(entry.divisor == m(entry.point));
    }
}

TEST_CASE("pipeline is inconclusive when the probe resolution cannot separate pieces")
{
    // min(l1·s, l2·s) with the kink on the ray (10,13), strictly inside a
    // depth-3 mediant piece of the probe cone: certification fails on the
    // straddling leaf and an 8-chord sweep sees only 3 distinct functionals,
    // too few for evidence.  Values lie in (1/24)Z, so f = 23/24 saturates.
    std::map<std::string, std::vector<VectorQ>> coeffs;
    coeffs["P"] = {make_rational_point({Rat(5, 3), Rat(4, 3)}),
                   make_rational_point({Rat(9, 8), Rat(7, 4)})};
    MobileSystem kinked = min_floor_linear_system(orthant2(), coeffs, Int(100000));
    SaturationDatum datum({{"P", Rat(23, 24)}});
    RationalCone cone(2, std::vector<VectorZ>{make_point({2, 1}), make_point({1, 2})});
    PipelineResult coarse = finite_generation_pipeline(kinked, datum, cone, std::nullopt, 3);
    CHECK(coarse.certificate.verdict == Verdict::Inconclusive);
    REQUIRE(!coarse.certificate.witnesses.empty());
    CHECK(coarse.certificate.witnesses.front().find("inconclusive") != std::string::npos);

    // Deeper mediant subdivision reaches the kink wall at depth 5 and then
    // certifies; every certified piece carries one of the two functionals.
    StraightenedFunction sharp(kinked.component("P"), Int(24));
    auto outcome = pl_detect(sharp, cone, 12);
    auto* decomposition = std::get_if<PLDecomposition>(&outcome);
    REQUIRE(decomposition);
    const VectorQ l1 = make_rational_point({Rat(5, 3), Rat(4, 3)});
    const VectorQ l2 = make_rational_point({Rat(9, 8), Rat(7, 4)});
    bool saw1 = false, saw2 = false;
    for (const LinearPiece& piece : decomposition->pieces) {
        const bool is1 = piece.functional == l1;
        const bool is2 = piece.functional == l2;
        CHECK((is1 || is2));
        saw1 = saw1 || is1;
        saw2 = saw2 || is2;
    }
    CHECK(saw1);
    CHECK(saw2);
}

TEST_CASE("multi-point systems decompose into their components")
{
    std::map<std::string, VectorQ> coeffs;
    coeffs["P"] = make_rational_point({Rat(5, 3)});
    coeffs["Q"] = make_rational_point({Rat(3, 2)});
    MobileSystem joint = floor_linear_system(line(), coeffs, Int(100000));
    SaturationDatum datum({{"P", Rat(2, 3)}, {"Q", Rat(1, 2)}});
    CHECK(check_saturation(joint, datum, Int(30), Int(8)).passed());
    CHECK(dichotomy_check(joint, datum, Int(30)).passed());
    CHECK(index_bound_check(joint, datum, Int(30)).passed());

    // Component-wise equality with the single-point systems.
    std::map<std::string, VectorQ> only_p{{"P", make_rational_point({Rat(5, 3)})}};
    MobileSystem p_system = floor_linear_system(line(), only_p, Int(100000));
    for (long n = 1; n <= 20; ++n) {
        VectorZ s = make_point({n});
        CHECK(divisor_coefficient(joint(s), "P") == divisor_coefficient(p_system(s), "P"));
        MonoidFunction component = joint.component("Q");
        CHECK(component(s) == Rat(rat_floor(Rat(3 * n, 2))));
    }
}

TEST_CASE("boundary counterexample certifies the factor-two jump")
{
    std::map<std::string, VectorQ> coeffs;
    coeffs["P"] = make_rational_point({Rat(1), Rat(1)});
    MobileSystem m = floor_linear_system(orthant2(), coeffs, Int(100000));
    SaturationDatum datum({{"P", Rat(2, 3)}});
    BoundaryCounterexample result = boundary_counterexample(m, datum, Int(30), Int(8));
    CHECK(result.certificate.passed());

    // Boundary values stay those of m; interior values double.
    CHECK(divisor_coefficient(result.doubled(make_point({3, 0})), "P") == 3);
    CHECK(divisor_coefficient(result.doubled(make_point({1, 1})), "P") == 4);
    CHECK(divisor_coefficient(result.doubled(make_point({2, 1})), "P") == 6);

    // Straightening along the boundary ray is 1 per unit; along interior rays
    // approaching it, the value per unit tends to 2: an exact factor-2 gap at
    // every tested approach point.
    for (long nu = 1; nu <= 6; ++nu) {
        VectorZ approach = make_point({nu, 1});
        Rat sharp = straightened_component(result.doubled, "P", approach, Int(2)).value;
        CHECK(sharp == Rat(2 * (nu + 1)));
        // Deviation from the boundary linear extension (value nu) exceeds
        // half the boundary value: 2(nu+1) - nu = nu + 2 >= nu/2.
        CHECK(sharp - Rat(nu) >= Rat(nu, 2));
    }

    MobileSystem not_additive = system_53();
    CHECK_THROWS_AS(boundary_counterexample(not_additive, datum, Int(10), Int(4)),
                    ValidationError);
}

TEST_CASE("random floor-linear instances satisfy the full certification chain")
{
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        RandomInstance instance = random_floor_linear_instance(seed, 2);
        CHECK(validate_system(instance.system, Int(12), 2).passed());
        Certificate saturation =
            check_saturation(instance.system, instance.datum, Int(20), Int(8));
        CHECK(saturation.passed());
        CHECK(dichotomy_check(instance.system, instance.datum, Int(20)).passed());
        CHECK(index_bound_check(instance.system, instance.datum, Int(20)).passed());
    }
    for (std::uint64_t seed = 200; seed < 205; ++seed) {
        RandomInstance instance = random_floor_linear_instance(seed, 1);
        CHECK(check_saturation(instance.system, instance.datum, Int(20), Int(8)).passed());
    }
}

TEST_CASE("mobile system evaluation respects bounds and memoizes consistently")
{
    MobileSystem m = system_53();
    CHECK_THROWS_AS(m(make_point({1000001})), DomainError);
    CHECK_THROWS_AS(m(make_point({1, 2})), ValidationError);
    VectorZ s = make_point({7});
    CurveDivisor first = m(s);
    CurveDivisor second = m(s);
    CHECK(first == second);
    CHECK(divisor_coefficient(first, "P") == 11);
}
