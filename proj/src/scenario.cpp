#include "bdiv/scenario.hpp"

#include "bdiv/plot.hpp"

#include <chrono>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

namespace bdiv {

namespace {

// ---------------------------------------------------------------------------
// Schema plumbing.

const Json& require_field(const Json& value, const std::string& key, const std::string& context)
{
    if (!value.is_object()) throw SchemaError(context + ": expected an object");
    auto it = value.find(key);
    if (it == value.end()) throw SchemaError(context + ": missing field '" + key + "'");
    return *it;
}

std::string require_string(const Json& value, const std::string& context)
{
    if (!value.is_string()) throw SchemaError(context + ": expected a string");
    return value.get<std::string>();
}

void check_keys(const Json& object, std::initializer_list<const char*> allowed,
                const std::string& context)
{
    for (const auto& [key, value] : object.items()) {
        bool known = false;
        for (const char* name : allowed)
            if (key == name) known = true;
        if (!known) throw SchemaError(context + ": unknown field '" + key + "'");
    }
}

Int bound_value(const Json& bounds, const char* key, const Int& fallback)
{
    auto it = bounds.find(key);
    if (it == bounds.end()) return fallback;
    return json_to_int(*it, std::string("bounds.") + key);
}

int bound_small(const Json& bounds, const char* key, int fallback)
{
    Int value = bound_value(bounds, key, Int(fallback));
    if (value < -1000000 || value > 1000000)
        throw SchemaError(std::string("bounds.") + key + ": out of range");
    return value.convert_to<int>();
}

// ---------------------------------------------------------------------------
// Payload parsers.  Construction failures on document data are schema errors.

template <typename Builder>
auto schema_guard(const std::string& context, Builder&& build)
{
    try {
        return build();
    } catch (const SchemaError&) {
        throw;
    } catch (const std::runtime_error& error) {
        throw SchemaError(context + ": " + error.what());
    }
}

Int declared_bound(const Json& spec, const std::string& context, const RunOptions& options)
{
    if (options.degree_bound) return *options.degree_bound;
    auto it = spec.find("degree_bound");
    if (it != spec.end()) return json_to_int(*it, context + ".degree_bound");
    return Int(1000000);
}

MonoidFunction parse_scalar_function(const Json& spec, const FgMonoid& domain,
                                     const std::string& context, const RunOptions& options)
{
    std::string kind = require_string(require_field(spec, "kind", context), context + ".kind");
    if (kind == "floor-linear") {
        check_keys(spec, {"kind", "coefficients", "degree_bound"}, context);
        VectorQ coeffs =
            json_to_vector_q(require_field(spec, "coefficients", context), context + ".coefficients");
        return schema_guard(context, [&] {
            return floor_linear_function(domain, coeffs, declared_bound(spec, context, options));
        });
    }
    if (kind == "min-floor-linear") {
        check_keys(spec, {"kind", "coefficients", "degree_bound"}, context);
        const Json& lists = require_field(spec, "coefficients", context);
        if (!lists.is_array()) throw SchemaError(context + ".coefficients: expected an array");
        std::vector<VectorQ> coeff_list;
        for (const Json& entry : lists)
            coeff_list.push_back(json_to_vector_q(entry, context + ".coefficients"));
        return schema_guard(context, [&] {
            return min_floor_linear_function(domain, coeff_list,
                                             declared_bound(spec, context, options));
        });
    }
    if (kind == "table") {
        check_keys(spec, {"kind", "values", "degree_bound"}, context);
        const Json& rows = require_field(spec, "values", context);
        if (!rows.is_array()) throw SchemaError(context + ".values: expected an array");
        std::map<VectorZ, Rat, LexLess> values;
        Int max_grade = 1;
        for (const Json& row : rows) {
            check_keys(row, {"point", "value"}, context + ".values");
            VectorZ point =
                json_to_vector_z(require_field(row, "point", context), context + ".values.point");
            values[point] = json_to_rat(require_field(row, "value", context + ".values"),
                                        context + ".values.value");
            max_grade = std::max(max_grade, domain.grade(point));
        }
        auto it = spec.find("degree_bound");
        Int bound = it != spec.end() ? json_to_int(*it, context + ".degree_bound") : max_grade;
        return schema_guard(context,
                            [&] { return table_function(domain, std::move(values), bound); });
    }
    throw SchemaError(context + ".kind: unknown function kind '" + kind + "'");
}

MobileSystem parse_mobile_system(const Json& spec, const FgMonoid& domain,
                                 const std::string& context, const RunOptions& options)
{
    std::string kind = require_string(require_field(spec, "kind", context), context + ".kind");
    if (kind == "floor-linear") {
        check_keys(spec, {"kind", "coefficients", "degree_bound"}, context);
        const Json& table = require_field(spec, "coefficients", context);
        if (!table.is_object()) throw SchemaError(context + ".coefficients: expected an object");
        std::map<std::string, VectorQ> coefficients;
        for (const auto& [point, coeffs] : table.items())
            coefficients[point] = json_to_vector_q(coeffs, context + ".coefficients." + point);
        return schema_guard(context, [&] {
            return floor_linear_system(domain, coefficients, declared_bound(spec, context, options));
        });
    }
    if (kind == "min-floor-linear") {
        check_keys(spec, {"kind", "coefficients", "degree_bound"}, context);
        const Json& table = require_field(spec, "coefficients", context);
        if (!table.is_object()) throw SchemaError(context + ".coefficients: expected an object");
        std::map<std::string, std::vector<VectorQ>> coefficients;
        for (const auto& [point, lists] : table.items()) {
            if (!lists.is_array())
                throw SchemaError(context + ".coefficients." + point + ": expected an array");
            std::vector<VectorQ> coeff_list;
            for (const Json& entry : lists)
                coeff_list.push_back(json_to_vector_q(entry, context + ".coefficients." + point));
            coefficients[point] = std::move(coeff_list);
        }
        return schema_guard(context, [&] {
            return min_floor_linear_system(domain, coefficients,
                                           declared_bound(spec, context, options));
        });
    }
    if (kind == "table") {
        check_keys(spec, {"kind", "values", "support", "degree_bound"}, context);
        const Json& rows = require_field(spec, "values", context);
        if (!rows.is_array()) throw SchemaError(context + ".values: expected an array");
        std::map<VectorZ, CurveDivisor, LexLess> values;
        Int max_grade = 1;
        for (const Json& row : rows) {
            check_keys(row, {"point", "divisor"}, context + ".values");
            VectorZ point =
                json_to_vector_z(require_field(row, "point", context), context + ".values.point");
            values[point] = json_to_divisor(require_field(row, "divisor", context + ".values"),
                                            context + ".values.divisor");
            max_grade = std::max(max_grade, domain.grade(point));
        }
        const Json& support_list = require_field(spec, "support", context);
        if (!support_list.is_array()) throw SchemaError(context + ".support: expected an array");
        std::set<std::string> support;
        for (const Json& point : support_list)
            support.insert(require_string(point, context + ".support"));
        auto it = spec.find("degree_bound");
        Int bound = it != spec.end() ? json_to_int(*it, context + ".degree_bound") : max_grade;
        return schema_guard(context, [&] {
            return table_system(domain, std::move(values), std::move(support), bound);
        });
    }
    throw SchemaError(context + ".kind: unknown system kind '" + kind + "'");
}

/**
 * A top-level "support" list is sugar for table systems: it is folded into the
 * system sub-document when that document carries no support of its own.
 */
Json fold_support(const Json& payload)
{
    const Json& system = require_field(payload, "system", "payload");
    auto it = payload.find("support");
    if (it == payload.end()) return system;
    if (!system.is_object() || system.contains("support")) return system;
    Json folded = system;
    folded["support"] = *it;
    return folded;
}

SaturationDatum parse_datum(const Json& spec, const std::string& context)
{
    if (!spec.is_object()) throw SchemaError(context + ": expected an object");
    std::map<std::string, Rat> f;
    for (const auto& [point, value] : spec.items())
        f[point] = json_to_rat(value, context + "." + point);
    return schema_guard(context, [&] { return SaturationDatum(std::move(f)); });
}

Int kappa_of(const BConstants& constants)
{
    Int floor = rat_floor(Rat(1) / constants.minimum);
    Int out = 1;
    for (Int k = 2; k <= floor; ++k) out *= k;
    return out;
}

// ---------------------------------------------------------------------------
// Report plumbing.

struct ReportBuilder {
    Verdict overall = Verdict::Pass;
    Json certificates = Json::array();
    Json artifacts = Json::object();
    Json plots = Json::array();

    void merge(Verdict v)
    {
        if (v == Verdict::Violation) overall = Verdict::Violation;
        else if (v == Verdict::Inconclusive && overall == Verdict::Pass)
            overall = Verdict::Inconclusive;
    }

    void add(const Certificate& cert)
    {
        certificates.push_back(certificate_to_json(cert));
        merge(cert.verdict);
    }
};

int exit_for(Verdict v)
{
    switch (v) {
        case Verdict::Pass: return kExitPass;
        case Verdict::Violation: return kExitViolation;
        case Verdict::Inconclusive: return kExitInconclusive;
    }
    return kExitOperation;
}

void write_plot(ReportBuilder& rb, const RunOptions& options, const std::string& suffix,
                const std::string& svg)
{
    if (options.plot_prefix.empty()) return;
    std::string path = options.plot_prefix + suffix;
    std::ofstream out(path);
    if (!out) throw ValidationError("cannot write plot file: " + path);
    out << svg;
    rb.plots.push_back(path);
}

Json pieces_summary(const std::vector<LinearPiece>& pieces)
{
    Json out = Json::array();
    for (const LinearPiece& piece : pieces) {
        Json row = Json::object();
        Json rays = Json::array();
        for (const VectorZ& ray : piece.cone.rays()) rays.push_back(vector_z_to_json(ray));
        row["rays"] = rays;
        row["functional"] = vector_q_to_json(piece.functional);
        row["witness"] = vector_z_to_json(piece.witness);
        out.push_back(row);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Runners, one per scenario kind.

void run_hilbert(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {"monoid", "cone"}, "payload");
    check_keys(scenario.bounds, {"coordinate_bound"}, "bounds");
    FgMonoid monoid =
        json_to_monoid(require_field(scenario.payload, "monoid", "payload"), "payload.monoid");
    RationalCone cone =
        json_to_cone(require_field(scenario.payload, "cone", "payload"), "payload.cone");
    Int coordinate_bound = bound_value(scenario.bounds, "coordinate_bound", Int(64));

    FgMonoid basis = hilbert_basis_intersection(monoid, cone, coordinate_bound);
    std::vector<VectorZ> sorted(basis.generators());
    std::sort(sorted.begin(), sorted.end(), LexLess());

    Certificate cert;
    cert.check = "hilbert-basis";
    cert.parameters.emplace_back("coordinate_bound", coordinate_bound.str());
    cert.parameters.emplace_back("basis_size", std::to_string(sorted.size()));
    rb.add(cert);

    Json out = Json::array();
    for (const VectorZ& g : sorted) out.push_back(vector_z_to_json(g));
    rb.artifacts["basis"] = out;
}

void run_saturate(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {"monoid", "system", "support", "saturation_f"}, "payload");
    check_keys(scenario.bounds,
               {"validate_bound", "ray_samples", "s_bound", "mu_nu_bound"}, "bounds");
    FgMonoid monoid =
        json_to_monoid(require_field(scenario.payload, "monoid", "payload"), "payload.monoid");
    MobileSystem system =
        parse_mobile_system(fold_support(scenario.payload), monoid, "payload.system", options);
    SaturationDatum datum =
        parse_datum(require_field(scenario.payload, "saturation_f", "payload"),
                    "payload.saturation_f");

    Int validate_bound = bound_value(scenario.bounds, "validate_bound", Int(20));
    int ray_samples = bound_small(scenario.bounds, "ray_samples", 3);
    Int s_bound = bound_value(scenario.bounds, "s_bound", Int(50));
    Int mu_nu_bound = bound_value(scenario.bounds, "mu_nu_bound", Int(12));

    rb.add(validate_system(system, validate_bound, ray_samples));
    Certificate saturation = check_saturation(system, datum, s_bound, mu_nu_bound);
    rb.add(saturation);
    if (saturation.passed()) {
        rb.add(dichotomy_check(system, datum, s_bound));
        rb.add(index_bound_check(system, datum, s_bound));
    }

    BConstants constants = compute_b(datum);
    Json b = Json::object();
    Json trivial = Json::object();
    for (const auto& [point, value] : constants.b) b[point] = rat_to_json(value);
    for (const auto& [point, flag] : constants.straightening_trivial) trivial[point] = flag;
    rb.artifacts["b"] = b;
    rb.artifacts["straightening_trivial"] = trivial;
    rb.artifacts["kappa"] = int_to_json(kappa_of(constants));
}

void run_straighten(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {"monoid", "function", "points"}, "payload");
    check_keys(scenario.bounds, {"index_cap", "confirmation_bound"}, "bounds");
    FgMonoid monoid =
        json_to_monoid(require_field(scenario.payload, "monoid", "payload"), "payload.monoid");
    MonoidFunction function =
        parse_scalar_function(require_field(scenario.payload, "function", "payload"), monoid,
                              "payload.function", options);
    Int index_cap = bound_value(scenario.bounds, "index_cap", Int(20));
    Int confirmation = bound_value(scenario.bounds, "confirmation_bound", Int(20));
    StraightenedFunction sharp(function, index_cap, confirmation);

    const Json& points = require_field(scenario.payload, "points", "payload");
    if (!points.is_array() || points.empty())
        throw SchemaError("payload.points: expected a nonempty array");

    Json values = Json::array();
    for (const Json& entry : points) {
        VectorQ point = json_to_vector_q(entry, "payload.points");
        Json row = Json::object();
        row["point"] = vector_q_to_json(point);
        row["value"] = rat_to_json(sharp.value(point));
        bool integral = true;
        for (Eigen::Index i = 0; i < point.size(); ++i)
            if (rat_den(point(i)) != 1) integral = false;
        if (integral) {
            VectorZ lattice(point.size());
            for (Eigen::Index i = 0; i < point.size(); ++i) lattice(i) = rat_num(point(i));
            row["index"] = int_to_json(sharp.index(lattice));
        }
        values.push_back(row);
    }

    Certificate cert;
    cert.check = "straighten";
    cert.parameters.emplace_back("index_cap", index_cap.str());
    cert.parameters.emplace_back("points", std::to_string(points.size()));
    rb.add(cert);
    rb.artifacts["values"] = values;
}

void run_plcone(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {"monoid", "function", "cone"}, "payload");
    check_keys(scenario.bounds,
               {"ray_resolution", "evidence_threshold", "index_cap", "confirmation_bound"},
               "bounds");
    FgMonoid monoid =
        json_to_monoid(require_field(scenario.payload, "monoid", "payload"), "payload.monoid");
    MonoidFunction function =
        parse_scalar_function(require_field(scenario.payload, "function", "payload"), monoid,
                              "payload.function", options);
    RationalCone cone =
        json_to_cone(require_field(scenario.payload, "cone", "payload"), "payload.cone");
    int resolution = bound_small(scenario.bounds, "ray_resolution", 12);
    int threshold = bound_small(scenario.bounds, "evidence_threshold", 10);
    Int index_cap = bound_value(scenario.bounds, "index_cap", Int(20));
    Int confirmation = bound_value(scenario.bounds, "confirmation_bound", Int(20));
    StraightenedFunction sharp(function, index_cap, confirmation);

    Certificate cert;
    cert.check = "piecewise-linear-detection";
    cert.parameters.emplace_back("ray_resolution", std::to_string(resolution));
    cert.parameters.emplace_back("evidence_threshold", std::to_string(threshold));
    try {
        PLDetectOutcome outcome = pl_detect(sharp, cone, resolution, threshold);
        if (const auto* decomposition = std::get_if<PLDecomposition>(&outcome)) {
            cert.parameters.emplace_back("pieces", std::to_string(decomposition->pieces.size()));
            rb.artifacts["outcome"] = "decomposition";
            rb.artifacts["pieces"] = pieces_summary(decomposition->pieces);
            write_plot(rb, options, ".pieces.svg", svg_pl_pieces(decomposition->pieces));
        } else {
            const auto& evidence = std::get<NonPLEvidence>(outcome);
            cert.verdict = Verdict::Violation;
            std::ostringstream msg;
            msg << "no piecewise-linear structure: " << evidence.functionals.size()
                << " pairwise distinct chord functionals across " << evidence.samples
                << " samples";
            cert.witnesses.push_back(msg.str());
            rb.artifacts["outcome"] = "evidence";
            Json rays = Json::array();
            for (const VectorQ& ray : evidence.rays) rays.push_back(vector_q_to_json(ray));
            Json functionals = Json::array();
            for (const VectorQ& functional : evidence.functionals)
                functionals.push_back(vector_q_to_json(functional));
            rb.artifacts["rays"] = rays;
            rb.artifacts["functionals"] = functionals;
            rb.artifacts["samples"] = int_to_json(evidence.samples);
            write_plot(rb, options, ".evidence.svg", svg_chord_evidence(evidence));
        }
    } catch (const EnumerationError& error) {
        cert.verdict = Verdict::Inconclusive;
        cert.witnesses.push_back(error.what());
        rb.artifacts["outcome"] = "inconclusive";
    }
    rb.add(cert);
}

void run_fingen(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload,
               {"monoid", "system", "support", "cone", "saturation_f", "oracle_degree"},
               "payload");
    check_keys(scenario.bounds, {"ray_resolution"}, "bounds");
    FgMonoid monoid =
        json_to_monoid(require_field(scenario.payload, "monoid", "payload"), "payload.monoid");
    MobileSystem system =
        parse_mobile_system(fold_support(scenario.payload), monoid, "payload.system", options);
    RationalCone cone =
        json_to_cone(require_field(scenario.payload, "cone", "payload"), "payload.cone");
    SaturationDatum datum =
        parse_datum(require_field(scenario.payload, "saturation_f", "payload"),
                    "payload.saturation_f");
    std::optional<Int> oracle_degree;
    if (auto it = scenario.payload.find("oracle_degree"); it != scenario.payload.end())
        oracle_degree = json_to_int(*it, "payload.oracle_degree");
    int resolution = bound_small(scenario.bounds, "ray_resolution", 12);

    PipelineResult result =
        finite_generation_pipeline(system, datum, cone, oracle_degree, resolution);
    rb.add(result.certificate);

    Json b = Json::object();
    for (const auto& [point, value] : result.constants.b) b[point] = rat_to_json(value);
    rb.artifacts["b"] = b;
    rb.artifacts["kappa"] = int_to_json(result.kappa);
    rb.artifacts["pieces"] = pieces_summary(result.pieces);
    rb.artifacts["truncation_generators"] = generator_set_to_json(result.truncation_generators);
    if (result.oracle_generators)
        rb.artifacts["oracle_generators"] = generator_set_to_json(*result.oracle_generators);
    if (!result.pieces.empty())
        write_plot(rb, options, ".pieces.svg", svg_pl_pieces(result.pieces));
}

void run_diophantine(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {"target"}, "payload");
    check_keys(scenario.bounds, {"q_max", "q_min", "steps"}, "bounds");
    const Json& target_doc = require_field(scenario.payload, "target", "payload");
    if (!target_doc.is_array() || target_doc.size() < 2)
        throw SchemaError("payload.target: expected at least two coordinate strings");
    std::vector<std::string> descriptors;
    for (const Json& coord : target_doc)
        descriptors.push_back(require_string(coord, "payload.target"));
    TargetPoint target =
        schema_guard("payload.target", [&] { return TargetPoint::parse(descriptors); });

    Int q_max = bound_value(scenario.bounds, "q_max", Int(10000));
    Int q_min = bound_value(scenario.bounds, "q_min", Int(1));
    long steps = bound_small(scenario.bounds, "steps", 4096);

    Certificate cert;
    cert.check = "diophantine-walk";
    cert.parameters.emplace_back("q_max", q_max.str());
    cert.parameters.emplace_back("steps", std::to_string(steps));
    try {
        Approximant approximant = find_approximant(target, q_max, q_min);
        rb.artifacts["approximant"] = approximant_to_json(approximant, options.precision);
        USystem u = build_u_system(target, approximant);
        rb.artifacts["u_system"] = u_system_to_json(u, options.precision);
        WalkReport walk_report = walk(u, target, steps);
        rb.artifacts["walk"] = walk_report_to_json(walk_report, options.precision);
        cert.parameters.emplace_back("q", approximant.q.str());
        cert.parameters.emplace_back("wall_crossings", std::to_string(walk_report.wall_crossings));
        cert.parameters.emplace_back(
            "window_max_strictly_decreasing",
            walk_report.window_max_strictly_decreasing ? "true" : "false");
        write_plot(rb, options, ".walk.svg", svg_walk_distance(walk_report));
    } catch (const EnumerationError& error) {
        cert.verdict = Verdict::Inconclusive;
        cert.witnesses.push_back(error.what());
    } catch (const DegeneracyError& error) {
        cert.verdict = Verdict::Inconclusive;
        cert.witnesses.push_back(error.what());
    }
    rb.add(cert);
}

void run_counterexample(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {"system", "saturation_f"}, "payload");
    check_keys(scenario.bounds, {"ray_bound", "mu_nu_bound"}, "bounds");

    FgMonoid domain(2, {make_point({1, 0}), make_point({0, 1})});
    MobileSystem system = [&] {
        if (auto it = scenario.payload.find("system"); it != scenario.payload.end())
            return parse_mobile_system(*it, domain, "payload.system", options);
        // The default source: the additive system m(a,b) = (a+b)·P.
        std::map<std::string, VectorQ> coefficients;
        VectorQ ones(2);
        ones << Rat(1), Rat(1);
        coefficients["P"] = ones;
        return floor_linear_system(domain, coefficients,
                                   options.degree_bound.value_or(Int(1000000)));
    }();
    SaturationDatum datum = [&] {
        if (auto it = scenario.payload.find("saturation_f"); it != scenario.payload.end())
            return parse_datum(*it, "payload.saturation_f");
        std::map<std::string, Rat> f;
        for (const std::string& point : system.support()) f[point] = Rat(2, 3);
        return SaturationDatum(f);
    }();

    Int ray_bound = bound_value(scenario.bounds, "ray_bound", Int(30));
    Int mu_nu_bound = bound_value(scenario.bounds, "mu_nu_bound", Int(8));

    BoundaryCounterexample result = boundary_counterexample(system, datum, ray_bound, mu_nu_bound);
    rb.add(result.certificate);

    Json sample = Json::array();
    for (const VectorZ& s : {make_point({1, 0}), make_point({0, 1}), make_point({1, 1}),
                             make_point({2, 1}), make_point({1, 2}), make_point({2, 2})}) {
        Json row = Json::object();
        row["point"] = vector_z_to_json(s);
        row["divisor"] = divisor_to_json(result.doubled(s));
        sample.push_back(row);
    }
    rb.artifacts["doubled_sample"] = sample;
}

void run_example33(const Scenario& scenario, const RunOptions& options, ReportBuilder& rb)
{
    check_keys(scenario.payload, {}, "payload");
    check_keys(scenario.bounds, {"ray_resolution", "evidence_threshold", "pairs", "box"},
               "bounds");
    int resolution = bound_small(scenario.bounds, "ray_resolution", 12);
    int threshold = bound_small(scenario.bounds, "evidence_threshold", 10);
    int pairs = bound_small(scenario.bounds, "pairs", 1000);
    long box = bound_small(scenario.bounds, "box", 40);

    StraightenedFunction staircase = build_dyadic_staircase();

    // Exact wedge values, frozen from the closed form of the construction.
    Certificate values;
    values.check = "staircase-values";
    auto expect = [&](const VectorQ& point, const Rat& expected, const std::string& label) {
        Rat actual = staircase.value(point);
        if (actual != expected) {
            values.verdict = Verdict::Violation;
            values.witnesses.push_back(label + ": value " + format_rat(actual) + " != expected " +
                                       format_rat(expected));
        }
    };
    VectorQ x2(2), x3(2), limit(2), origin_ray(2), left(2);
    x2 << Rat(1, 4), Rat(1);
    x3 << Rat(1, 8), Rat(1);
    limit << Rat(0), Rat(1);
    origin_ray << Rat(1), Rat(0);
    left << Rat(-1), Rat(1);
    expect(x2, Rat(3), "f(1/4,1)");
    expect(x3, Rat(47, 16), "f(1/8,1)");
    expect(limit, Rat(17, 6), "f(0,1)");
    expect(origin_ray, Rat(1, 2), "f(1,0)");
    expect(left, Rat(11, 6), "f(-1,1)");
    if (dyadic_staircase_ray_value(2) != Rat(3) || dyadic_staircase_ray_value(3) != Rat(47, 16)) {
        values.verdict = Verdict::Violation;
        values.witnesses.push_back("closed-form wedge values disagree with the construction");
    }
    rb.add(values);
    Json value_table = Json::array();
    for (const auto& [point, value] :
         std::initializer_list<std::pair<VectorQ, Rat>>{{x2, staircase.value(x2)},
                                                        {x3, staircase.value(x3)},
                                                        {limit, staircase.value(limit)},
                                                        {origin_ray, staircase.value(origin_ray)},
                                                        {left, staircase.value(left)}}) {
        Json row = Json::object();
        row["point"] = vector_q_to_json(point);
        row["value"] = rat_to_json(value);
        value_table.push_back(row);
    }
    rb.artifacts["values"] = value_table;

    // Superadditivity across the wedges on seeded sample pairs, exact.
    Certificate superadditive;
    superadditive.check = "staircase-superadditivity";
    std::mt19937_64 rng(scenario.seed);
    auto sample_point = [&]() {
        long y = static_cast<long>(rng() % (box + 1));
        long x = -y + static_cast<long>(rng() % (box + y + 1));
        return make_point({x, y});
    };
    int checked = 0;
    for (int k = 0; k < pairs; ++k) {
        VectorZ u = sample_point();
        VectorZ v = sample_point();
        if (u.isZero() || v.isZero()) continue;
        ++checked;
        if (staircase.value(u) + staircase.value(v) > staircase.value(VectorZ(u + v))) {
            superadditive.verdict = Verdict::Violation;
            superadditive.witnesses.push_back("superadditivity fails at u=" +
                                              format_rat(Rat(u(0))) + "," + format_rat(Rat(u(1))) +
                                              " v=" + format_rat(Rat(v(0))) + "," +
                                              format_rat(Rat(v(1))));
            break;
        }
    }
    superadditive.parameters.emplace_back("pairs", std::to_string(checked));
    superadditive.parameters.emplace_back("box", std::to_string(box));
    rb.add(superadditive);

    // The probe cone contains every dyadic wall (1, 2^n), n ≥ 2, and their
    // accumulation ray; a piecewise-linear certificate here is impossible.
    RationalCone probe(2, std::vector<VectorZ>{make_point({1, 4}), make_point({0, 1})});
    Certificate evidence_cert;
    evidence_cert.check = "staircase-evidence";
    evidence_cert.parameters.emplace_back("ray_resolution", std::to_string(resolution));
    evidence_cert.parameters.emplace_back("evidence_threshold", std::to_string(threshold));
    try {
        PLDetectOutcome outcome = pl_detect(staircase, probe, resolution, threshold);
        if (const auto* evidence = std::get_if<NonPLEvidence>(&outcome)) {
            evidence_cert.parameters.emplace_back("distinct_functionals",
                                                  std::to_string(evidence->functionals.size()));
            evidence_cert.parameters.emplace_back("samples", evidence->samples.str());
            Json functionals = Json::array();
            for (const VectorQ& functional : evidence->functionals)
                functionals.push_back(vector_q_to_json(functional));
            rb.artifacts["evidence_functionals"] = functionals;
            write_plot(rb, options, ".evidence.svg", svg_chord_evidence(*evidence));
        } else {
            evidence_cert.verdict = Verdict::Violation;
            evidence_cert.witnesses.push_back(
                "the staircase unexpectedly certified as piecewise linear");
        }
    } catch (const EnumerationError& error) {
        evidence_cert.verdict = Verdict::Inconclusive;
        evidence_cert.witnesses.push_back(error.what());
    }
    rb.add(evidence_cert);
}

Json scenario_echo(const Scenario& scenario)
{
    Json echo = Json::object();
    echo["kind"] = scenario.kind;
    echo["payload"] = scenario.payload;
    echo["seed"] = scenario.seed;
    echo["bounds"] = scenario.bounds;
    return echo;
}

Json report_envelope(const Json& echo)
{
    Json report = Json::object();
    report["schema_version"] = 1;
    report["tool"] = "bdivalg";
    report["scenario"] = echo;
    return report;
}

void finish_report(Json& report, ReportBuilder& rb, const RunOptions& options,
                   std::chrono::steady_clock::time_point start)
{
    report["verdict"] = verdict_name(rb.overall);
    report["certificates"] = rb.certificates;
    report["artifacts"] = rb.artifacts;
    if (!rb.plots.empty()) report["plots"] = rb.plots;
    Json timings = Json::object();
    timings["recorded"] = options.timings;
    if (options.timings) {
        auto elapsed = std::chrono::steady_clock::now() - start;
        timings["total_ms"] = static_cast<std::int64_t>(
            std::chrono::duration_cast<std::chrono::milliseconds>(elapsed).count());
    }
    report["timings"] = timings;
}

}  // namespace

Scenario parse_scenario(const Json& document)
{
    if (!document.is_object()) throw SchemaError("scenario: expected an object");
    check_keys(document, {"kind", "payload", "seed", "bounds"}, "scenario");
    Scenario scenario;
    scenario.kind =
        require_string(require_field(document, "kind", "scenario"), "scenario.kind");
    static const std::set<std::string> kinds{"hilbert",     "saturate",       "straighten",
                                             "plcone",      "fingen",         "diophantine",
                                             "counterexample", "example33"};
    if (kinds.find(scenario.kind) == kinds.end())
        throw SchemaError("scenario: unknown kind '" + scenario.kind + "'");
    if (auto it = document.find("payload"); it != document.end()) {
        if (!it->is_object()) throw SchemaError("scenario.payload: expected an object");
        scenario.payload = *it;
    }
    if (auto it = document.find("seed"); it != document.end()) {
        if (!it->is_number_integer() && !it->is_number_unsigned())
            throw SchemaError("scenario.seed: expected an integer");
        if (it->is_number_integer() && it->get<std::int64_t>() < 0)
            throw SchemaError("scenario.seed: expected a nonnegative integer");
        scenario.seed = it->get<std::uint64_t>();
    }
    if (auto it = document.find("bounds"); it != document.end()) {
        if (!it->is_object()) throw SchemaError("scenario.bounds: expected an object");
        scenario.bounds = *it;
    }
    return scenario;
}

RunResult run_scenario(const Scenario& scenario, const RunOptions& options)
{
    auto start = std::chrono::steady_clock::now();
    ReportBuilder rb;
    if (scenario.kind == "hilbert") run_hilbert(scenario, options, rb);
    else if (scenario.kind == "saturate") run_saturate(scenario, options, rb);
    else if (scenario.kind == "straighten") run_straighten(scenario, options, rb);
    else if (scenario.kind == "plcone") run_plcone(scenario, options, rb);
    else if (scenario.kind == "fingen") run_fingen(scenario, options, rb);
    else if (scenario.kind == "diophantine") run_diophantine(scenario, options, rb);
    else if (scenario.kind == "counterexample") run_counterexample(scenario, options, rb);
    else if (scenario.kind == "example33") run_example33(scenario, options, rb);
    else throw SchemaError("scenario: unknown kind '" + scenario.kind + "'");

    Json report = report_envelope(scenario_echo(scenario));
    finish_report(report, rb, options, start);
    return RunResult{std::move(report), exit_for(rb.overall)};
}

RunResult run_suite(std::uint64_t seed, int count, Eigen::Index rank, const RunOptions& options)
{
    if (count < 1) throw ValidationError("suite: instance count must be positive");
    if (rank < 1 || rank > 3) throw ValidationError("suite: rank must be between 1 and 3");
    auto start = std::chrono::steady_clock::now();

    std::vector<Json> entries(static_cast<std::size_t>(count));
    std::vector<Verdict> verdicts(static_cast<std::size_t>(count), Verdict::Pass);
    std::vector<bool> failed(static_cast<std::size_t>(count), false);

    auto worker = [&](int index) {
        std::uint64_t instance_seed = seed + static_cast<std::uint64_t>(index);
        Json entry = Json::object();
        entry["seed"] = instance_seed;
        try {
            RandomInstance instance = random_floor_linear_instance(instance_seed, rank);
            Json certificates = Json::array();
            Verdict overall = Verdict::Pass;
            auto add = [&](const Certificate& cert) {
                certificates.push_back(certificate_to_json(cert));
                if (cert.verdict == Verdict::Violation) overall = Verdict::Violation;
                else if (cert.verdict == Verdict::Inconclusive && overall == Verdict::Pass)
                    overall = Verdict::Inconclusive;
            };
            add(validate_system(instance.system, Int(12), 2));
            Certificate saturation = check_saturation(instance.system, instance.datum, Int(20), Int(8));
            add(saturation);
            if (saturation.passed()) {
                add(dichotomy_check(instance.system, instance.datum, Int(20)));
                add(index_bound_check(instance.system, instance.datum, Int(20)));
            }
            BConstants constants = compute_b(instance.datum);
            Json b = Json::object();
            for (const auto& [point, value] : constants.b) b[point] = rat_to_json(value);
            entry["b"] = b;
            entry["kappa"] = int_to_json(kappa_of(constants));
            entry["certificates"] = certificates;
            entry["verdict"] = verdict_name(overall);
            verdicts[static_cast<std::size_t>(index)] = overall;
        } catch (const std::exception& error) {
            entry["error"] = error.what();
            failed[static_cast<std::size_t>(index)] = true;
        }
        entries[static_cast<std::size_t>(index)] = std::move(entry);
    };

    int jobs = std::max(1, std::min(options.jobs, 16));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i) worker(i);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) {
            pool.emplace_back([&, t] {
                for (int i = t; i < count; i += jobs) worker(i);
            });
        }
        for (std::thread& thread : pool) thread.join();
    }

    ReportBuilder rb;
    Json instances = Json::array();
    bool any_failed = false;
    for (int i = 0; i < count; ++i) {
        instances.push_back(entries[static_cast<std::size_t>(i)]);
        rb.merge(verdicts[static_cast<std::size_t>(i)]);
        if (failed[static_cast<std::size_t>(i)]) any_failed = true;
    }
    rb.artifacts["instances"] = instances;
    rb.artifacts["count"] = count;
    rb.artifacts["rank"] = static_cast<std::int64_t>(rank);

    Json echo = Json::object();
    echo["kind"] = "suite";
    echo["seed"] = seed;
    echo["count"] = count;
    echo["rank"] = static_cast<std::int64_t>(rank);
    Json report = report_envelope(echo);
    finish_report(report, rb, options, start);
    return RunResult{std::move(report),
                     any_failed ? kExitOperation : exit_for(rb.overall)};
}

}  // namespace bdiv
