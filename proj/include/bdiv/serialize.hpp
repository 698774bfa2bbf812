#pragma once

/**
 * JSON bindings for the geometric and certificate types: deterministic
 * key order, arbitrary-precision integers widened to strings only when they
 * overflow 64 bits, and rationals always carried as "p/q" strings.
 */

#include "bdiv/curve.hpp"
#include "bdiv/diophantine.hpp"

#include "json.hpp"

#include <string>

namespace bdiv {

using Json = nlohmann::ordered_json;

/** Parses a document, mapping parser diagnostics to ParseError. */
Json parse_json_text(const std::string& text);
Json load_json_file(const std::string& path);

Json int_to_json(const Int& value);
Int json_to_int(const Json& value, const std::string& context);

Json rat_to_json(const Rat& value);
Rat json_to_rat(const Json& value, const std::string& context);

Json vector_z_to_json(const VectorZ& v);
VectorZ json_to_vector_z(const Json& value, const std::string& context);

Json vector_q_to_json(const VectorQ& v);
VectorQ json_to_vector_q(const Json& value, const std::string& context);

Json divisor_to_json(const CurveDivisor& d);
CurveDivisor json_to_divisor(const Json& value, const std::string& context);

Json monoid_to_json(const FgMonoid& monoid);
FgMonoid json_to_monoid(const Json& value, const std::string& context);

Json cone_to_json(const RationalCone& cone);
RationalCone json_to_cone(const Json& value, const std::string& context);

Json certificate_to_json(const Certificate& cert);

Json generator_set_to_json(const GeneratorSet& gens);

Json enclosure_to_json(const Enclosure& e);

/** Exact symbolic rendering plus a decimal approximation at `bits` width. */
Json quad_to_json(const QuadNum& value, unsigned bits);

Json approximant_to_json(const Approximant& a, unsigned bits);
Json u_system_to_json(const USystem& u, unsigned bits);
Json walk_report_to_json(const WalkReport& report, unsigned bits);

}  // namespace bdiv
