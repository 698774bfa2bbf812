#include "bdiv/scenario.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

namespace {

/** Shared flag state; exactly one subcommand parses per invocation. */
struct Flags {
    std::string out_path;
    std::string plot_prefix;
    std::string degree_bound;
    std::optional<std::uint64_t> seed;
    unsigned precision = 32;
    int jobs = 1;
    bool timings = false;
};

void add_common_flags(CLI::App* sub, Flags& flags)
{
    sub->add_option("--out", flags.out_path, "write the report to this file instead of stdout");
    sub->add_option("--seed", flags.seed, "override the scenario seed");
    sub->add_option("--jobs", flags.jobs, "worker threads for suite fan-out")
        ->check(CLI::Range(1, 16));
    sub->add_option("--degree-bound", flags.degree_bound,
                    "override declared degree bounds on closed-form systems");
    sub->add_option("--precision", flags.precision,
                    "bits of interval precision for irrational values in reports");
    sub->add_flag("--timings", flags.timings, "record wall-clock timings in the report");
    sub->add_option("--plot-prefix", flags.plot_prefix,
                    "write SVG plots using this path prefix");
}

bdiv::RunOptions make_options(const Flags& flags)
{
    bdiv::RunOptions options;
    if (!flags.degree_bound.empty()) options.degree_bound = bdiv::Int(flags.degree_bound);
    options.precision = flags.precision;
    options.jobs = flags.jobs;
    options.timings = flags.timings;
    options.plot_prefix = flags.plot_prefix;
    return options;
}

void emit_report(const bdiv::RunResult& result, const Flags& flags)
{
    std::string text = result.report.dump(2);
    text += "\n";
    if (flags.out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(flags.out_path);
    if (!out) throw bdiv::ValidationError("cannot write report file: " + flags.out_path);
    out << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"exact certification for higher-rank divisorial algebras on affine curves"};
    app.require_subcommand(1);

    Flags flags;
    int exit_code = bdiv::kExitPass;

    struct KindSpec {
        const char* kind;
        const char* help;
        bool requires_file;
    };
    const std::vector<KindSpec> kind_specs = {
        {"hilbert", "intersect a finitely generated monoid with a rational cone", true},
        {"saturate", "validate a mobile divisor system and certify saturation, dichotomy"
                     " and index bounds", true},
        {"straighten", "evaluate the straightened extension of a monoid function", true},
        {"plcone", "decide piecewise-linear structure of a function over a probe cone", true},
        {"fingen", "run the finite-generation pipeline and emit generator sets", true},
        {"diophantine", "approximate a target point and walk the induced vector recurrence",
         false},
        {"counterexample", "certify that boundary extensions fail for the additive rank-two"
                           " system", false},
        {"example33", "certify the dyadic staircase: wedge values, superadditivity, and"
                      " absence of piecewise-linear structure", false},
    };

    std::map<std::string, std::string> scenario_paths;
    std::vector<std::string> target_coords = {"1", "sqrt(2)"};

    for (const KindSpec& spec : kind_specs) {
        CLI::App* sub = app.add_subcommand(spec.kind, spec.help);
        auto* positional =
            sub->add_option("scenario", scenario_paths[spec.kind], "scenario document (JSON)");
        if (spec.requires_file) positional->required();
        if (std::string(spec.kind) == "diophantine")
            sub->add_option("--target", target_coords,
                            "target coordinates (rationals or quadratic irrationals such as"
                            " \"1/2 + 3/5*sqrt(7)\") when no scenario file is given");
        add_common_flags(sub, flags);

        std::string kind = spec.kind;
        sub->callback([&, kind] {
            bdiv::Scenario scenario;
            const std::string& path = scenario_paths[kind];
            if (!path.empty()) {
                scenario = bdiv::parse_scenario(bdiv::load_json_file(path));
                if (scenario.kind != kind)
                    throw bdiv::SchemaError("scenario kind '" + scenario.kind +
                                            "' does not match subcommand '" + kind + "'");
            } else {
                scenario.kind = kind;
                if (kind == "diophantine") {
                    bdiv::Json target = bdiv::Json::array();
                    for (const std::string& coord : target_coords) target.push_back(coord);
                    scenario.payload["target"] = target;
                }
            }
            if (flags.seed) scenario.seed = *flags.seed;
            bdiv::RunResult result = bdiv::run_scenario(scenario, make_options(flags));
            emit_report(result, flags);
            exit_code = result.exit_code;
        });
    }

    int suite_count = 10;
    int suite_rank = 2;
    CLI::App* suite = app.add_subcommand(
        "suite", "generate random saturated instances and run the certification chain");
    suite->add_option("--count", suite_count, "number of random instances")
        ->check(CLI::Range(1, 1000));
    suite->add_option("--rank", suite_rank, "rank of the generated monoids")
        ->check(CLI::Range(1, 3));
    add_common_flags(suite, flags);
    suite->callback([&] {
        bdiv::RunResult result = bdiv::run_suite(flags.seed.value_or(0), suite_count,
                                                 static_cast<Eigen::Index>(suite_rank),
                                                 make_options(flags));
        emit_report(result, flags);
        exit_code = result.exit_code;
    });

    try {
        app.parse(argc, argv);
        return exit_code;
    } catch (const CLI::ParseError& error) {
        int code = app.exit(error);
        return code == 0 ? 0 : bdiv::kExitParse;
    } catch (const bdiv::ParseError& error) {
        std::cerr << "parse error: " << error.what() << "\n";
        return bdiv::kExitParse;
    } catch (const bdiv::SchemaError& error) {
        std::cerr << "schema error: " << error.what() << "\n";
        return bdiv::kExitSchema;
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return bdiv::kExitOperation;
    }
}
