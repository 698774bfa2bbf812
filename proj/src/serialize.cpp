#include "bdiv/serialize.hpp"

#include <fstream>
#include <limits>
#include <sstream>

namespace bdiv {

namespace {

/** Truncated fixed-point decimal rendering, independent of float rounding. */
std::string rat_to_decimal(const Rat& value, int digits)
{
    Int num = rat_num(value);
    Int den = rat_den(value);
    std::ostringstream out;
    if (num < 0) {
        out << "-";
        num = -num;
    }
    out << Int(num / den);
    num %= den;
    if (num != 0) {
        out << ".";
        for (int i = 0; i < digits && num != 0; ++i) {
            num *= 10;
            out << Int(num / den);
            num %= den;
        }
    }
    return out.str();
}

std::string require_string(const Json& value, const std::string& context)
{
    if (!value.is_string()) throw SchemaError(context + ": expected a string");
    return value.get<std::string>();
}

const Json& require_field(const Json& value, const std::string& key, const std::string& context)
{
    if (!value.is_object()) throw SchemaError(context + ": expected an object");
    auto it = value.find(key);
    if (it == value.end()) throw SchemaError(context + ": missing field '" + key + "'");
    return *it;
}

}  // namespace

Json parse_json_text(const std::string& text)
{
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& error) {
        throw ParseError(error.what());
    }
}

Json load_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot read scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_json_text(buffer.str());
}

Json int_to_json(const Int& value)
{
    static const Int kMin(std::numeric_limits<std::int64_t>::min());
    static const Int kMax(std::numeric_limits<std::int64_t>::max());
    if (value >= kMin && value <= kMax) return Json(value.convert_to<std::int64_t>());
    return Json(value.str());
}

Int json_to_int(const Json& value, const std::string& context)
{
    if (value.is_number_integer() || value.is_number_unsigned())
        return Int(value.get<std::int64_t>());
    if (value.is_string()) {
        try {
            return Int(value.get<std::string>());
        } catch (const std::runtime_error&) {
            throw SchemaError(context + ": not an integer: " + value.get<std::string>());
        }
    }
    throw SchemaError(context + ": expected an integer");
}

Json rat_to_json(const Rat& value) { return Json(format_rat(value)); }

Rat json_to_rat(const Json& value, const std::string& context)
{
    if (value.is_number_integer() || value.is_number_unsigned())
        return Rat(value.get<std::int64_t>());
    if (value.is_string()) {
        try {
            return parse_rat(value.get<std::string>());
        } catch (const ParseError& error) {
            throw SchemaError(context + ": " + error.what());
        }
    }
    throw SchemaError(context + ": expected a rational as a \"p/q\" string");
}

Json vector_z_to_json(const VectorZ& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(int_to_json(v(i)));
    return out;
}

VectorZ json_to_vector_z(const Json& value, const std::string& context)
{
    if (!value.is_array() || value.empty())
        throw SchemaError(context + ": expected a nonempty array of integers");
    VectorZ out(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = json_to_int(value[i], context);
    return out;
}

Json vector_q_to_json(const VectorQ& v)
{
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(rat_to_json(v(i)));
    return out;
}

VectorQ json_to_vector_q(const Json& value, const std::string& context)
{
    if (!value.is_array() || value.empty())
        throw SchemaError(context + ": expected a nonempty array of rationals");
    VectorQ out(static_cast<Eigen::Index>(value.size()));
    for (std::size_t i = 0; i < value.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = json_to_rat(value[i], context);
    return out;
}

Json divisor_to_json(const CurveDivisor& d)
{
    Json out = Json::object();
    for (const auto& [point, coef] : d) out[point] = int_to_json(coef);
    return out;
}

CurveDivisor json_to_divisor(const Json& value, const std::string& context)
{
    if (!value.is_object()) throw SchemaError(context + ": expected an object of coefficients");
    CurveDivisor out;
    for (const auto& [point, coef] : value.items())
        out[point] = json_to_int(coef, context + "." + point);
    return out;
}

Json monoid_to_json(const FgMonoid& monoid)
{
    Json out = Json::object();
    out["dim"] = static_cast<std::int64_t>(monoid.ambient_dim());
    Json generators = Json::array();
    for (const VectorZ& g : monoid.generators()) generators.push_back(vector_z_to_json(g));
    out["generators"] = generators;
    return out;
}

FgMonoid json_to_monoid(const Json& value, const std::string& context)
{
    Int dim = json_to_int(require_field(value, "dim", context), context + ".dim");
    const Json& gens = require_field(value, "generators", context);
    if (!gens.is_array()) throw SchemaError(context + ".generators: expected an array");
    std::vector<VectorZ> generators;
    for (std::size_t i = 0; i < gens.size(); ++i)
        generators.push_back(json_to_vector_z(gens[i], context + ".generators"));
    try {
        return FgMonoid(dim.convert_to<Eigen::Index>(), std::move(generators));
    } catch (const std::runtime_error& error) {
        throw SchemaError(context + ": " + error.what());
    }
}

Json cone_to_json(const RationalCone& cone)
{
    Json out = Json::object();
    out["dim"] = static_cast<std::int64_t>(cone.ambient_dim());
    Json rays = Json::array();
    for (const VectorZ& ray : cone.rays()) rays.push_back(vector_z_to_json(ray));
    out["generators"] = rays;
    return out;
}

RationalCone json_to_cone(const Json& value, const std::string& context)
{
    Int dim = json_to_int(require_field(value, "dim", context), context + ".dim");
    const Json& rays = require_field(value, "generators", context);
    if (!rays.is_array()) throw SchemaError(context + ".generators: expected an array");
    std::vector<VectorQ> ray_list;
    for (std::size_t i = 0; i < rays.size(); ++i)
        ray_list.push_back(json_to_vector_q(rays[i], context + ".generators"));
    try {
        return RationalCone(dim.convert_to<Eigen::Index>(), ray_list);
    } catch (const std::runtime_error& error) {
        throw SchemaError(context + ": " + error.what());
    }
}

Json certificate_to_json(const Certificate& cert)
{
    Json out = Json::object();
    out["check"] = cert.check;
    out["verdict"] = verdict_name(cert.verdict);
    Json witnesses = Json::array();
    for (const std::string& w : cert.witnesses) witnesses.push_back(w);
    out["witnesses"] = witnesses;
    Json parameters = Json::object();
    for (const auto& [key, value] : cert.parameters) parameters[key] = value;
    out["parameters"] = parameters;
    return out;
}

Json generator_set_to_json(const GeneratorSet& gens)
{
    Json out = Json::object();
    out["provenance"] = gens.provenance == Provenance::TruncationDerived ? "truncation-derived"
                                                                         : "oracle-minimal";
    out["degree_bound_checked"] = int_to_json(gens.degree_bound_checked);
    Json entries = Json::array();
    for (const GeneratorEntry& entry : gens.entries) {
        Json row = Json::object();
        row["point"] = vector_z_to_json(entry.point);
        row["divisor"] = divisor_to_json(entry.divisor);
        entries.push_back(row);
    }
    out["entries"] = entries;
    return out;
}

Json enclosure_to_json(const Enclosure& e)
{
    Json out = Json::object();
    out["lo"] = rat_to_json(e.lo);
    out["hi"] = rat_to_json(e.hi);
    return out;
}

Json quad_to_json(const QuadNum& value, unsigned bits)
{
    std::ostringstream exact;
    exact << value;
    Json out = Json::object();
    out["exact"] = exact.str();
    Enclosure e = value.enclose(bits);
    out["decimal"] = rat_to_decimal(Rat((e.lo + e.hi) / 2), 12);
    return out;
}

Json approximant_to_json(const Approximant& a, unsigned bits)
{
    (void)bits;
    Json out = Json::object();
    out["q"] = int_to_json(a.q);
    out["p"] = vector_z_to_json(a.p);
    Json errors = Json::array();
    for (const Enclosure& e : a.errors) errors.push_back(enclosure_to_json(e));
    out["errors"] = errors;
    out["certification_bits"] = a.certification_bits;
    return out;
}

Json u_system_to_json(const USystem& u, unsigned bits)
{
    Json out = Json::object();
    out["q"] = int_to_json(u.q);
    Json vectors = Json::array();
    for (const VectorZ& v : u.u) vectors.push_back(vector_z_to_json(v));
    out["u"] = vectors;
    Json weights = Json::array();
    for (const QuadNum& w : u.weights) weights.push_back(quad_to_json(w, bits));
    out["weights"] = weights;
    Json degenerate = Json::array();
    for (bool d : u.degenerate) degenerate.push_back(d);
    out["degenerate"] = degenerate;
    return out;
}

Json walk_report_to_json(const WalkReport& report, unsigned bits)
{
    Json out = Json::object();
    out["steps"] = static_cast<std::int64_t>(report.steps);
    out["wall_crossings"] = static_cast<std::int64_t>(report.wall_crossings);
    Json runs = Json::array();
    for (const auto& [branch, length] : report.chosen_runs) {
        Json run = Json::array();
        run.push_back(branch);
        run.push_back(static_cast<std::int64_t>(length));
        runs.push_back(run);
    }
    out["chosen_runs"] = runs;
    Json checkpoints = Json::array();
    for (const WalkCheckpoint& cp : report.checkpoints) {
        Json row = Json::object();
        row["n"] = static_cast<std::int64_t>(cp.n);
        row["v"] = vector_z_to_json(cp.v);
        Json tally = Json::array();
        for (const Int& t : cp.tally) tally.push_back(int_to_json(t));
        row["tally"] = tally;
        row["distance_squared"] = quad_to_json(cp.distance_squared, bits);
        checkpoints.push_back(row);
    }
    out["checkpoints"] = checkpoints;
    Json windows = Json::array();
    for (const QuadNum& w : report.window_max_distance_squared)
        windows.push_back(quad_to_json(w, bits));
    out["window_max_distance_squared"] = windows;
    out["window_max_strictly_decreasing"] = report.window_max_strictly_decreasing;
    if (!report.additivity_defects.empty()) {
        Json defects = Json::array();
        for (const Rat& e : report.additivity_defects) defects.push_back(rat_to_json(e));
        out["additivity_defects"] = defects;
    }
    return out;
}

}  // namespace bdiv
