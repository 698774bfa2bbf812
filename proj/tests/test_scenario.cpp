#include "bdiv/scenario.hpp"

#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <set>

using namespace bdiv;

namespace {

RunResult run_doc(const std::string& text, const RunOptions& options = {})
{
    return run_scenario(parse_scenario(Json::parse(text)), options);
}

const char* kSaturateWorked = R"({
    "kind": "saturate",
    "payload": {
        "monoid": {"dim": 1, "generators": [[1]]},
        "system": {"kind": "floor-linear", "coefficients": {"P": ["5/3"]}},
        "saturation_f": {"P": "2/3"}
    }
})";

const char* kKinkedPlcone = R"({
    "kind": "plcone",
    "payload": {
        "monoid": {"dim": 2, "generators": [[1, 0], [0, 1]]},
        "function": {"kind": "min-floor-linear",
                     "coefficients": [["5/3", "4/3"], ["9/8", "7/4"]]},
        "cone": {"dim": 2, "generators": [[2, 1], [1, 2]]}
    },
    "bounds": {"index_cap": 24%RES%}
})";

std::string kinked_plcone(const std::string& extra_bounds)
{
    std::string text = kKinkedPlcone;
    return text.replace(text.find("%RES%"), 5, extra_bounds);
}

}  // namespace

TEST_CASE("scenario envelopes default the optional fields")
{
    Scenario minimal = parse_scenario(Json::parse(R"({"kind": "hilbert"})"));
    CHECK(minimal.kind == "hilbert");
    CHECK(minimal.payload == Json::object());
    CHECK(minimal.seed == 0);
    CHECK(minimal.bounds == Json::object());

    Scenario full = parse_scenario(Json::parse(
        R"({"kind": "saturate", "payload": {"x": 1}, "seed": 42, "bounds": {"s_bound": 5}})"));
    CHECK(full.kind == "saturate");
    CHECK(full.payload == Json::parse(R"({"x": 1})"));
    CHECK(full.seed == 42);
    CHECK(full.bounds == Json::parse(R"({"s_bound": 5})"));
}

TEST_CASE("scenario envelopes reject malformed documents")
{
    CHECK_THROWS_AS(parse_scenario(Json::parse("[1, 2]")), SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"payload": {}})")), SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": 17})")), SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "sideways"})")), SchemaError);
    // "suite" is a command with its own entry point, not a document kind.
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "suite"})")), SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "hilbert", "extra": 1})")),
                    SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "hilbert", "payload": [1]})")),
                    SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "hilbert", "seed": -1})")),
                    SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "hilbert", "seed": "7"})")),
                    SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "hilbert", "seed": 1.5})")),
                    SchemaError);
    CHECK_THROWS_AS(parse_scenario(Json::parse(R"({"kind": "hilbert", "bounds": "none"})")),
                    SchemaError);
}

TEST_CASE("hilbert scenarios report the basis inside the standard envelope")
{
    const char* text = R"({
        "kind": "hilbert",
        "payload": {
            "monoid": {"dim": 2, "generators": [[1, 0], [0, 1]]},
            "cone": {"dim": 2, "generators": [[1, 2], [2, 1]]}
        }
    })";
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitPass);

    const Json& report = result.report;
    CHECK(report["schema_version"] == 1);
    CHECK(report["tool"] == "bdivalg");
    CHECK(report["scenario"]["kind"] == "hilbert");
    CHECK(report["scenario"]["seed"] == 0);
    CHECK(report["scenario"]["bounds"] == Json::object());
    CHECK(report["verdict"] == "pass");
    CHECK(report["timings"]["recorded"] == false);
    CHECK(!report["timings"].contains("total_ms"));
    CHECK(!report.contains("plots"));

    REQUIRE(report["certificates"].size() == 1);
    const Json& cert = report["certificates"][0];
    CHECK(cert["check"] == "hilbert-basis");
    CHECK(cert["verdict"] == "pass");
    CHECK(cert["parameters"]["coordinate_bound"] == "64");
    CHECK(cert["parameters"]["basis_size"] == "3");
    CHECK(report["artifacts"]["basis"] == Json::parse("[[1, 1], [1, 2], [2, 1]]"));

    // The report bytes are a pure function of (scenario, options).
    CHECK(run_doc(text).report.dump() == report.dump());

    RunOptions timed;
    timed.timings = true;
    Json with_timings = run_doc(text, timed).report;
    CHECK(with_timings["timings"]["recorded"] == true);
    CHECK(with_timings["timings"].contains("total_ms"));
}

TEST_CASE("saturate scenarios chain validation, saturation, dichotomy and index bounds")
{
    RunResult result = run_doc(kSaturateWorked);
    CHECK(result.exit_code == kExitPass);
    CHECK(result.report["verdict"] == "pass");

    const Json& certs = result.report["certificates"];
    REQUIRE(certs.size() == 4);
    CHECK(certs[0]["check"] == "validate-system");
    CHECK(certs[1]["check"] == "check-saturation");
    CHECK(certs[2]["check"] == "dichotomy");
    CHECK(certs[3]["check"] == "index-bound");
    for (const Json& cert : certs) CHECK(cert["verdict"] == "pass");
    CHECK(certs[1]["parameters"]["s_bound"] == "50");
    CHECK(certs[1]["parameters"]["mu_nu_bound"] == "12");
    CHECK(certs[1]["parameters"]["checks"] == "7200");
    CHECK(certs[2]["parameters"]["b[P]"] == "1/3");
    CHECK(certs[3]["parameters"]["index_cap[P]"] == "3");

    const Json& artifacts = result.report["artifacts"];
    CHECK(artifacts["b"] == Json::parse(R"({"P": "1/3"})"));
    CHECK(artifacts["straightening_trivial"] == Json::parse(R"({"P": false})"));
    CHECK(artifacts["kappa"] == 6);
}

TEST_CASE("saturation violations stop the chain and carry an exact witness")
{
    const char* text = R"({
        "kind": "saturate",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "system": {"kind": "floor-linear", "coefficients": {"P": ["3/2"]}},
            "saturation_f": {"P": "1/4"}
        }
    })";
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitViolation);
    CHECK(result.report["verdict"] == "violation");

    const Json& certs = result.report["certificates"];
    REQUIRE(certs.size() == 2);  // dichotomy and index bound are skipped
    CHECK(certs[0]["verdict"] == "pass");
    CHECK(certs[1]["check"] == "check-saturation");
    CHECK(certs[1]["verdict"] == "violation");
    REQUIRE(certs[1]["witnesses"].size() == 1);
    CHECK(certs[1]["witnesses"][0] == "saturation fails at s=(1), mu=1, nu=2, point P");

    CHECK(result.report["artifacts"]["straightening_trivial"] == Json::parse(R"({"P": true})"));
    CHECK(result.report["artifacts"]["kappa"] == 2);
}

TEST_CASE("straighten scenarios evaluate values and lattice indices")
{
    const char* text = R"({
        "kind": "straighten",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "function": {"kind": "floor-linear", "coefficients": ["5/3"]},
            "points": [["1"], ["2"], ["1/2"]]
        }
    })";
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitPass);
    CHECK(result.report["certificates"][0]["check"] == "straighten");
    CHECK(result.report["certificates"][0]["parameters"]["index_cap"] == "20");
    CHECK(result.report["certificates"][0]["parameters"]["points"] == "3");

    // Lattice points report a clearing index; genuinely rational ones do not.
    CHECK(result.report["artifacts"]["values"] == Json::parse(R"([
        {"point": ["1"], "value": "5/3", "index": 3},
        {"point": ["2"], "value": "10/3", "index": 3},
        {"point": ["1/2"], "value": "5/6"}
    ])"));

    CHECK_THROWS_AS(run_doc(R"({
        "kind": "straighten",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "function": {"kind": "floor-linear", "coefficients": ["5/3"]},
            "points": []
        }
    })"),
                    SchemaError);
}

TEST_CASE("piecewise-linear detection certifies the two-functional fan")
{
    std::string text = kinked_plcone("");
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitPass);
    CHECK(result.report["verdict"] == "pass");

    const Json& cert = result.report["certificates"][0];
    CHECK(cert["check"] == "piecewise-linear-detection");
    CHECK(cert["parameters"]["ray_resolution"] == "12");
    CHECK(cert["parameters"]["pieces"] == "7");

    const Json& artifacts = result.report["artifacts"];
    CHECK(artifacts["outcome"] == "decomposition");
    REQUIRE(artifacts["pieces"].size() == 7);

    const Json lower = Json::parse(R"(["5/3", "4/3"])");
    const Json upper = Json::parse(R"(["9/8", "7/4"])");
    bool saw_lower = false;
    bool saw_upper = false;
    bool saw_kink_ray = false;
    for (const Json& piece : artifacts["pieces"]) {
        REQUIRE(piece.contains("rays"));
        REQUIRE(piece.contains("functional"));
        REQUIRE(piece.contains("witness"));
        if (piece["functional"] == lower) saw_lower = true;
        if (piece["functional"] == upper) saw_upper = true;
        for (const Json& ray : piece["rays"])
            if (ray == Json::parse("[10, 13]")) saw_kink_ray = true;
        CHECK((piece["functional"] == lower || piece["functional"] == upper));
    }
    CHECK(saw_lower);
    CHECK(saw_upper);
    // The fan subdivides exactly at the ray where the two functionals cross.
    CHECK(saw_kink_ray);

    CHECK(run_doc(text).report.dump() == result.report.dump());
}

TEST_CASE("coarse detection resolutions end inconclusive rather than wrong")
{
    RunResult result = run_doc(kinked_plcone(", \"ray_resolution\": 3"));
    CHECK(result.exit_code == kExitInconclusive);
    CHECK(result.report["verdict"] == "inconclusive");

    const Json& cert = result.report["certificates"][0];
    CHECK(cert["verdict"] == "inconclusive");
    REQUIRE(cert["witnesses"].size() == 1);
    CHECK(cert["witnesses"][0].get<std::string>().find("only 3 distinct chord functionals") !=
          std::string::npos);
    CHECK(result.report["artifacts"]["outcome"] == "inconclusive");
    CHECK(!result.report["artifacts"].contains("pieces"));
}

TEST_CASE("finite-generation scenarios report constants, pieces and generator sets")
{
    const char* text = R"({
        "kind": "fingen",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "system": {"kind": "floor-linear", "coefficients": {"P": ["5/3"]}},
            "cone": {"dim": 1, "generators": [[1]]},
            "saturation_f": {"P": "2/3"},
            "oracle_degree": 3
        }
    })";
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitPass);

    REQUIRE(result.report["certificates"].size() == 1);
    const Json& cert = result.report["certificates"][0];
    CHECK(cert["check"] == "finite-generation-pipeline");
    CHECK(cert["verdict"] == "pass");
    CHECK(cert["parameters"]["b[P]"] == "1/3");
    CHECK(cert["parameters"]["kappa"] == "6");
    CHECK(cert["parameters"]["truncation_generators"] == "1");
    CHECK(cert["parameters"]["oracle_generators"] == "3");

    const Json& artifacts = result.report["artifacts"];
    CHECK(artifacts["b"] == Json::parse(R"({"P": "1/3"})"));
    CHECK(artifacts["kappa"] == 6);
    REQUIRE(artifacts["pieces"].size() == 1);
    CHECK(artifacts["pieces"][0]["functional"] == Json::parse(R"(["5/3"])"));
    CHECK(artifacts["truncation_generators"] == Json::parse(R"({
        "provenance": "truncation-derived",
        "degree_bound_checked": 3,
        "entries": [{"point": [6], "divisor": {"P": 10}}]
    })"));
    CHECK(artifacts["oracle_generators"] == Json::parse(R"({
        "provenance": "oracle-minimal",
        "degree_bound_checked": 3,
        "entries": [
            {"point": [1], "divisor": {"P": 1}},
            {"point": [2], "divisor": {"P": 3}},
            {"point": [3], "divisor": {"P": 5}}
        ]
    })"));
}

TEST_CASE("diophantine scenarios walk the recurrence with exact monitors")
{
    const char* text = R"json({
        "kind": "diophantine",
        "payload": {"target": ["1", "sqrt(2)"]},
        "bounds": {"steps": 256}
    })json";
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitPass);

    const Json& cert = result.report["certificates"][0];
    CHECK(cert["check"] == "diophantine-walk");
    CHECK(cert["parameters"]["q_max"] == "10000");
    CHECK(cert["parameters"]["q"] == "2");
    CHECK(cert["parameters"]["wall_crossings"] == "88");
    CHECK(cert["parameters"]["window_max_strictly_decreasing"] == "false");

    const Json& artifacts = result.report["artifacts"];
    CHECK(artifacts["approximant"]["q"] == 2);
    CHECK(artifacts["approximant"]["p"] == Json::parse("[3]"));
    CHECK(artifacts["approximant"]["errors"].size() == 1);
    CHECK(artifacts["approximant"]["certification_bits"].get<int>() >= 16);
    CHECK(artifacts["u_system"]["u"] == Json::parse("[[2, 3], [2, 2]]"));
    CHECK(artifacts["u_system"]["degenerate"] == Json::parse("[false]"));

    const Json& walk = artifacts["walk"];
    CHECK(walk["steps"] == 256);
    REQUIRE(walk["checkpoints"].size() == 9);  // n = 1, 2, 4, ..., 256
    CHECK(walk["checkpoints"][8]["n"] == 256);
    CHECK(walk["checkpoints"][0]["v"] == Json::parse("[6, 8]"));
    CHECK(walk["checkpoints"][0]["distance_squared"]["exact"] == "136/9 - 32/3*sqrt(2)");
    CHECK(walk["window_max_distance_squared"].size() == 9);
}

TEST_CASE("rational targets degrade to an inconclusive diophantine verdict")
{
    const char* text = R"({
        "kind": "diophantine",
        "payload": {"target": ["1", "3/2"]},
        "bounds": {"steps": 64}
    })";
    RunResult result = run_doc(text);
    CHECK(result.exit_code == kExitInconclusive);
    CHECK(result.report["verdict"] == "inconclusive");

    const Json& cert = result.report["certificates"][0];
    CHECK(cert["verdict"] == "inconclusive");
    REQUIRE(cert["witnesses"].size() == 1);
    CHECK(cert["witnesses"][0] == "walk: u-system has degenerate coordinates");

    // The approximant and u-system were computed before the walk refused.
    CHECK(result.report["artifacts"].contains("approximant"));
    CHECK(result.report["artifacts"].contains("u_system"));
    CHECK(!result.report["artifacts"].contains("walk"));
}

TEST_CASE("the boundary counterexample scenario certifies the factor-two jump")
{
    RunResult result = run_doc(R"({"kind": "counterexample"})");
    CHECK(result.exit_code == kExitPass);

    const Json& cert = result.report["certificates"][0];
    CHECK(cert["check"] == "boundary-counterexample");
    CHECK(cert["verdict"] == "pass");
    CHECK(cert["parameters"]["ray_bound"] == "30");
    CHECK(cert["parameters"]["mu_nu_bound"] == "8");
    CHECK(cert["parameters"]["rays_checked"] == "279");

    // Ray values survive; interior values double.
    CHECK(result.report["artifacts"]["doubled_sample"] == Json::parse(R"([
        {"point": [1, 0], "divisor": {"P": 1}},
        {"point": [0, 1], "divisor": {"P": 1}},
        {"point": [1, 1], "divisor": {"P": 4}},
        {"point": [2, 1], "divisor": {"P": 6}},
        {"point": [1, 2], "divisor": {"P": 6}},
        {"point": [2, 2], "divisor": {"P": 8}}
    ])"));
}

TEST_CASE("the staircase scenario reports exact wedge values and chord evidence")
{
    RunResult result = run_doc(R"({"kind": "example33"})");
    CHECK(result.exit_code == kExitPass);
    CHECK(result.report["verdict"] == "pass");
    CHECK(result.report["scenario"]["payload"] == Json::object());

    const Json& certs = result.report["certificates"];
    REQUIRE(certs.size() == 3);
    CHECK(certs[0]["check"] == "staircase-values");
    CHECK(certs[1]["check"] == "staircase-superadditivity");
    CHECK(certs[2]["check"] == "staircase-evidence");
    for (const Json& cert : certs) CHECK(cert["verdict"] == "pass");
    CHECK(certs[1]["parameters"]["pairs"] == "998");
    CHECK(certs[1]["parameters"]["box"] == "40");
    CHECK(certs[2]["parameters"]["distinct_functionals"] == "20");
    CHECK(certs[2]["parameters"]["samples"] == "4096");

    CHECK(result.report["artifacts"]["values"] == Json::parse(R"([
        {"point": ["1/4", "1"], "value": "3"},
        {"point": ["1/8", "1"], "value": "47/16"},
        {"point": ["0", "1"], "value": "17/6"},
        {"point": ["1", "0"], "value": "1/2"},
        {"point": ["-1", "1"], "value": "11/6"}
    ])"));
    CHECK(result.report["artifacts"]["evidence_functionals"].size() == 20);
    CHECK(result.report["artifacts"]["evidence_functionals"][0] ==
          Json::parse(R"(["1/2", "23/8"])"));

    CHECK_THROWS_AS(run_doc(R"({"kind": "example33", "payload": {"x": 1}})"), SchemaError);
}

TEST_CASE("payload and bounds schemas reject unknown or malformed fields")
{
    // Unknown payload key.
    CHECK_THROWS_AS(run_doc(R"({
        "kind": "hilbert",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "cone": {"dim": 1, "generators": [[1]]},
            "extra": 1
        }
    })"),
                    SchemaError);
    // Unknown bounds key.
    CHECK_THROWS_AS(run_doc(R"({
        "kind": "hilbert",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "cone": {"dim": 1, "generators": [[1]]}
        },
        "bounds": {"coordinate_bound": 64, "extra": 1}
    })"),
                    SchemaError);
    // Missing payload field.
    CHECK_THROWS_AS(
        run_doc(R"({"kind": "hilbert", "payload": {"monoid": {"dim": 1, "generators": [[1]]}}})"),
        SchemaError);
    // Unknown function kind.
    CHECK_THROWS_AS(run_doc(R"({
        "kind": "saturate",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "system": {"kind": "quadratic", "coefficients": {"P": ["1"]}},
            "saturation_f": {"P": "1/2"}
        }
    })"),
                    SchemaError);
    // Floor-linear system coefficients must be an object keyed by point name.
    CHECK_THROWS_AS(run_doc(R"({
        "kind": "saturate",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "system": {"kind": "floor-linear", "coefficients": ["5/3"]},
            "saturation_f": {"P": "1/2"}
        }
    })"),
                    SchemaError);
    // Construction failures on document data surface as schema errors: a line
    // is not a pointed cone.
    CHECK_THROWS_AS(run_doc(R"({
        "kind": "hilbert",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "cone": {"dim": 1, "generators": [[1], [-1]]}
        }
    })"),
                    SchemaError);
    // Small bounds are range checked before narrowing.
    CHECK_THROWS_AS(run_doc(R"({
        "kind": "saturate",
        "payload": {
            "monoid": {"dim": 1, "generators": [[1]]},
            "system": {"kind": "floor-linear", "coefficients": {"P": ["5/3"]}},
            "saturation_f": {"P": "2/3"}
        },
        "bounds": {"ray_samples": 10000000}
    })"),
                    SchemaError);
}

TEST_CASE("suite reports are deterministic across worker counts")
{
    RunOptions serial;
    serial.jobs = 1;
    RunOptions parallel;
    parallel.jobs = 4;
    RunResult one = run_suite(7, 6, 2, serial);
    RunResult four = run_suite(7, 6, 2, parallel);
    CHECK(one.report.dump() == four.report.dump());
    CHECK(one.exit_code == kExitPass);
    CHECK(four.exit_code == kExitPass);

    const Json& report = one.report;
    CHECK(report["verdict"] == "pass");
    CHECK(report["scenario"] == Json::parse(R"({"kind": "suite", "seed": 7, "count": 6, "rank": 2})"));
    CHECK(report["artifacts"]["count"] == 6);
    CHECK(report["artifacts"]["rank"] == 2);

    const Json& instances = report["artifacts"]["instances"];
    REQUIRE(instances.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        const Json& entry = instances[i];
        CHECK(entry["seed"] == 7 + i);
        CHECK(entry["verdict"] == "pass");
        CHECK(!entry.contains("error"));
        CHECK(entry["certificates"].size() == 4);  // the saturated chain ran fully
    }
    CHECK(instances[0]["b"] == Json::parse(R"({"P": "1/2", "Q": "1/3"})"));
    CHECK(instances[0]["kappa"] == 6);
    CHECK(instances[4]["kappa"] == 720);
}

TEST_CASE("suite parameters are validated")
{
    RunOptions options;
    CHECK_THROWS_AS(run_suite(1, 0, 2, options), ValidationError);
    CHECK_THROWS_AS(run_suite(1, -3, 2, options), ValidationError);
    CHECK_THROWS_AS(run_suite(1, 3, 0, options), ValidationError);
    CHECK_THROWS_AS(run_suite(1, 3, 4, options), ValidationError);
}

TEST_CASE("plot prefixes persist SVG artifacts next to the report")
{
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "bdiv_scenario_plots";
    fs::remove_all(dir);
    fs::create_directories(dir);

    RunOptions options;
    options.plot_prefix = (dir / "fan").string();
    RunResult result = run_doc(kinked_plcone(""), options);
    CHECK(result.exit_code == kExitPass);
    REQUIRE(result.report.contains("plots"));
    REQUIRE(result.report["plots"].size() == 1);

    fs::path plot = result.report["plots"][0].get<std::string>();
    CHECK(plot == dir / "fan.pieces.svg");
    REQUIRE(fs::exists(plot));
    std::ifstream in(plot);
    std::string head;
    std::getline(in, head);
    CHECK(head.find("<svg") != std::string::npos);

    fs::remove_all(dir);
}
