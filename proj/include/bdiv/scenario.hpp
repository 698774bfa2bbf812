#pragma once

/**
 * Scenario documents and their execution: schema validation, dispatch to the
 * library operations, and deterministic machine-readable reports.  A report's
 * bytes are a pure function of (scenario, seed, options); wall-clock timings
 * are recorded only on request so the default output stays reproducible.
 */

#include "bdiv/serialize.hpp"

#include <cstdint>
#include <optional>
#include <string>

namespace bdiv {

inline constexpr int kExitPass = 0;
inline constexpr int kExitViolation = 2;
inline constexpr int kExitInconclusive = 3;
inline constexpr int kExitParse = 64;
inline constexpr int kExitSchema = 65;
inline constexpr int kExitOperation = 70;

struct Scenario {
    std::string kind;
    Json payload = Json::object();
    std::uint64_t seed = 0;
    Json bounds = Json::object();
};

/** Validates the envelope: kind, payload, seed, bounds; nothing else. */
Scenario parse_scenario(const Json& document);

struct RunOptions {
    std::optional<Int> degree_bound;  // overrides declared system degree bounds
    unsigned precision = 32;          // enclosure width for decimal renderings
    int jobs = 1;                     // parallelism for suite instances
    bool timings = false;             // record wall-clock times (non-reproducible)
    std::string plot_prefix;          // when nonempty, SVG artifacts are written
};

struct RunResult {
    Json report;
    int exit_code = kExitPass;
};

/** Validates the payload against the kind's schema, runs it, builds the report. */
RunResult run_scenario(const Scenario& scenario, const RunOptions& options);

/**
 * Randomized saturated floor-linear instances pushed through the saturation,
 * dichotomy and index chain; instances are independent and run on `jobs`
 * threads with per-instance seeds, so the combined report is deterministic.
 */
RunResult run_suite(std::uint64_t seed, int count, Eigen::Index rank, const RunOptions& options);

}  // namespace bdiv
