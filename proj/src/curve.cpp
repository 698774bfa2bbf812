#include "bdiv/curve.hpp"

#include <algorithm>
#include <random>
#include <sstream>
#include <utility>
#include <variant>

namespace bdiv {

namespace {

constexpr long kOracleDegreeCap = 40;  // combinatorial guard for the graded-piece oracle

Rat dot_qz(const VectorQ& a, const VectorZ& b)
{
    Rat s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) * Rat(b(i));
    return s;
}

std::string vec_str(const VectorZ& v)
{
    std::ostringstream out;
    out << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (i) out << ",";
        out << v(i);
    }
    out << ")";
    return out.str();
}

std::string divisor_str(const CurveDivisor& d)
{
    if (d.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (const auto& [point, coef] : d) {
        if (!first) out << " + ";
        out << coef << "*" << point;
        first = false;
    }
    return out.str();
}

void add_parameter(Certificate& cert, const std::string& key, const std::string& value)
{
    cert.parameters.emplace_back(key, value);
}

void add_parameter(Certificate& cert, const std::string& key, const Int& value)
{
    std::ostringstream out;
    out << value;
    cert.parameters.emplace_back(key, out.str());
}

/** Elements of the domain with coordinate sum ≤ bound, in grade then lex order. */
std::vector<VectorZ> elements_by_coordinate_sum(const FgMonoid& domain, const Int& bound)
{
    std::vector<VectorZ> out;
    for (const VectorZ& s : domain.elements_with_grade_at_most(bound))
        if (coordinate_sum(s) <= bound) out.push_back(s);
    return out;
}

Int factorial(const Int& n)
{
    Int out = 1;
    for (Int k = 2; k <= n; ++k) out *= k;
    return out;
}

}  // namespace

MobileSystem::MobileSystem(FgMonoid domain, Oracle oracle, std::set<std::string> declared_support,
                           Int declared_degree_bound)
{
    if (!oracle) throw ValidationError("mobile system: oracle must be callable");
    if (declared_degree_bound <= 0)
        throw ValidationError("mobile system: declared degree bound must be positive");
    state_ = std::make_shared<State>(std::move(domain), std::move(oracle),
                                     std::move(declared_support), std::move(declared_degree_bound));
}

CurveDivisor MobileSystem::operator()(const VectorZ& s) const
{
    auto& st = *state_;
    if (s.size() != st.domain.ambient_dim())
        throw ValidationError("mobile system: dimension mismatch");
    if (st.domain.grade(s) > st.degree_bound) {
        std::ostringstream msg;
        msg << "mobile system: grade " << st.domain.grade(s)
            << " exceeds the declared degree bound " << st.degree_bound;
        throw DomainError(msg.str());
    }
    {
        std::lock_guard<std::mutex> lock(st.mutex);
        auto it = st.memo.find(s);
        if (it != st.memo.end()) return it->second;
    }
    CurveDivisor value = st.oracle(s);
    std::lock_guard<std::mutex> lock(st.mutex);
    return st.memo.emplace(s, std::move(value)).first->second;
}

MonoidFunction MobileSystem::component(const std::string& point) const
{
    if (state_->support.find(point) == state_->support.end())
        throw ValidationError("mobile system: point " + point + " is not in the declared support");
    MobileSystem self = *this;
    auto oracle = [self, point](const VectorZ& s) {
        return Rat(divisor_coefficient(self(s), point));
    };
    return MonoidFunction(state_->domain, oracle, state_->degree_bound);
}

MobileSystem floor_linear_system(FgMonoid domain, std::map<std::string, VectorQ> coefficients,
                                 Int degree_bound)
{
    if (coefficients.empty())
        throw ValidationError("floor-linear system: need at least one support point");
    std::set<std::string> support;
    for (const auto& [point, coeffs] : coefficients) {
        if (coeffs.size() != domain.ambient_dim())
            throw ValidationError("floor-linear system: coefficient dimension mismatch");
        support.insert(point);
    }
    auto oracle = [coefficients](const VectorZ& s) {
        CurveDivisor d;
        for (const auto& [point, coeffs] : coefficients) d[point] = rat_floor(dot_qz(coeffs, s));
        return d;
    };
    return MobileSystem(std::move(domain), oracle, std::move(support), std::move(degree_bound));
}

MobileSystem min_floor_linear_system(FgMonoid domain,
                                     std::map<std::string, std::vector<VectorQ>> coefficients,
                                     Int degree_bound)
{
    if (coefficients.empty())
        throw ValidationError("min-floor-linear system: need at least one support point");
    std::set<std::string> support;
    for (const auto& [point, list] : coefficients) {
        if (list.empty())
            throw ValidationError("min-floor-linear system: need at least one functional");
        for (const auto& coeffs : list) {
            if (coeffs.size() != domain.ambient_dim())
                throw ValidationError("min-floor-linear system: coefficient dimension mismatch");
        }
        support.insert(point);
    }
    auto oracle = [coefficients](const VectorZ& s) {
        CurveDivisor d;
        for (const auto& [point, list] : coefficients) {
            Rat best = dot_qz(list.front(), s);
            for (std::size_t i = 1; i < list.size(); ++i)
                best = std::min(best, dot_qz(list[i], s));
            d[point] = rat_floor(best);
        }
        return d;
    };
    return MobileSystem(std::move(domain), oracle, std::move(support), std::move(degree_bound));
}

MobileSystem table_system(FgMonoid domain, std::map<VectorZ, CurveDivisor, LexLess> values,
                          std::set<std::string> declared_support, Int degree_bound)
{
    auto oracle = [values](const VectorZ& s) {
        auto it = values.find(s);
        if (it == values.end())
            throw DomainError("table system: value not tabulated at " + vec_str(s));
        return it->second;
    };
    return MobileSystem(std::move(domain), oracle, std::move(declared_support),
                        std::move(degree_bound));
}

SaturationDatum::SaturationDatum(std::map<std::string, Rat> f) : f_(std::move(f))
{
    for (const auto& [point, value] : f_) {
        if (value >= 1)
            throw ValidationError("saturation datum: coefficient at " + point +
                                  " must be < 1 so that the rounded datum is effective");
    }
}

Rat SaturationDatum::at(const std::string& point) const
{
    auto it = f_.find(point);
    if (it == f_.end())
        throw ValidationError("saturation datum: no coefficient for point " + point);
    return it->second;
}

std::string verdict_name(Verdict v)
{
    switch (v) {
        case Verdict::Pass: return "pass";
        case Verdict::Violation: return "violation";
        case Verdict::Inconclusive: return "inconclusive";
    }
    throw ValidationError("unknown verdict");
}

Certificate validate_system(const MobileSystem& m, const Int& degree_bound, int ray_samples)
{
    if (degree_bound <= 0 || degree_bound > m.declared_degree_bound())
        throw DomainError("system validation: degree bound outside the declared limit");
    if (ray_samples < 0) throw ValidationError("system validation: negative sample count");

    Certificate cert;
    cert.check = "validate-system";
    add_parameter(cert, "degree_bound", degree_bound);
    add_parameter(cert, "ray_samples", Int(ray_samples));

    const auto elements = elements_by_coordinate_sum(m.domain(), degree_bound);
    const auto& support = m.support();

    // Effectivity and declared support, exhaustively over evaluated values.
    for (const VectorZ& s : elements) {
        for (const auto& [point, coef] : m(s)) {
            if (coef < 0) {
                cert.verdict = Verdict::Violation;
                cert.witnesses.push_back("value at s=" + vec_str(s) + " is not effective: " +
                                         divisor_str(m(s)));
                return cert;
            }
            if (coef != 0 && support.find(point) == support.end()) {
                cert.verdict = Verdict::Violation;
                cert.witnesses.push_back("support violation at s=" + vec_str(s) + ": point " +
                                         point + " is not declared");
                return cert;
            }
        }
    }

    // Superadditivity componentwise on every pair within the bound.
    Int pairs_checked = 0;
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (std::size_t j = i; j < elements.size(); ++j) {
            const VectorZ& x = elements[i];
            const VectorZ& y = elements[j];
            if (coordinate_sum(x) + coordinate_sum(y) > degree_bound) continue;
            CurveDivisor dx = m(x), dy = m(y), dxy = m(VectorZ(x + y));
            ++pairs_checked;
            for (const std::string& point : support) {
                if (divisor_coefficient(dx, point) + divisor_coefficient(dy, point) >
                    divisor_coefficient(dxy, point)) {
                    cert.verdict = Verdict::Violation;
                    cert.witnesses.push_back("superadditivity fails at x=" + vec_str(x) +
                                             ", y=" + vec_str(y) + " for point " + point);
                    add_parameter(cert, "pairs_checked", pairs_checked);
                    return cert;
                }
            }
        }
    }
    add_parameter(cert, "pairs_checked", pairs_checked);

    // Ray-limit surrogate along doubling chains: m(κs)/κ must be nondecreasing
    // and stay below m(s) + 1, the bound any admissible saturation datum gives.
    int sampled = 0;
    for (const VectorZ& s : elements) {
        if (sampled >= ray_samples) break;
        if (s.isZero()) continue;
        ++sampled;
        for (const std::string& point : support) {
            Rat previous = Rat(divisor_coefficient(m(s), point));
            const Rat bound = previous + 1;
            Int kappa = 2;
            while (kappa * m.domain().grade(s) <= m.declared_degree_bound()) {
                VectorZ scaled = s;
                for (Eigen::Index c = 0; c < scaled.size(); ++c) scaled(c) = s(c) * kappa;
                Rat current = Rat(divisor_coefficient(m(scaled), point)) / Rat(kappa);
                if (current < previous || current >= bound) {
                    if (cert.verdict == Verdict::Pass) cert.verdict = Verdict::Inconclusive;
                    cert.witnesses.push_back("ray-limit surrogate fails at s=" + vec_str(s) +
                                             ", kappa=" + format_rat(Rat(kappa)) + " for point " +
                                             point);
                    break;
                }
                previous = current;
                kappa *= 2;
            }
        }
    }
    add_parameter(cert, "rays_sampled", Int(sampled));
    return cert;
}

Certificate check_saturation(const MobileSystem& m, const SaturationDatum& F, const Int& s_bound,
                             const Int& mu_nu_bound)
{
    if (s_bound <= 0 || mu_nu_bound <= 0)
        throw ValidationError("saturation check: bounds must be positive");
    if (s_bound * mu_nu_bound > m.declared_degree_bound())
        throw DomainError("saturation check: bounds exceed the declared degree bound");

    Certificate cert;
    cert.check = "check-saturation";
    add_parameter(cert, "s_bound", s_bound);
    add_parameter(cert, "mu_nu_bound", mu_nu_bound);

    Int checks = 0;
    for (const VectorZ& s : elements_by_coordinate_sum(m.domain(), s_bound)) {
        if (s.isZero()) continue;
        for (Int nu = 1; nu <= mu_nu_bound; ++nu) {
            VectorZ nus = s;
            for (Eigen::Index c = 0; c < s.size(); ++c) nus(c) = s(c) * nu;
            const CurveDivisor m_nu = m(nus);
            for (Int mu = 1; mu <= mu_nu_bound; ++mu) {
                VectorZ mus = s;
                for (Eigen::Index c = 0; c < s.size(); ++c) mus(c) = s(c) * mu;
                const CurveDivisor m_mu = m(mus);
                for (const std::string& point : m.support()) {
                    ++checks;
                    Rat scaled = Rat(mu) / Rat(nu) * Rat(divisor_coefficient(m_nu, point));
                    if (rat_ceil(scaled - F.at(point)) > divisor_coefficient(m_mu, point)) {
                        cert.verdict = Verdict::Violation;
                        cert.witnesses.push_back(
                            "saturation fails at s=" + vec_str(s) + ", mu=" + format_rat(Rat(mu)) +
                            ", nu=" + format_rat(Rat(nu)) + ", point " + point);
                        add_parameter(cert, "checks", checks);
                        return cert;
                    }
                }
            }
        }
    }
    add_parameter(cert, "checks", checks);
    return cert;
}

BConstants compute_b(const SaturationDatum& F)
{
    if (F.f().empty()) throw ValidationError("b-constant: empty saturation datum");
    BConstants out;
    bool first = true;
    for (const auto& [point, f] : F.f()) {
        Rat b = std::min(Rat(1 - f), Rat(1, 2));
        // The forcing argument needs f strictly below 1/2: then e_s ≤ f < 1/2 ≤ b
        // rules the nonzero branch out.  At f = 1/2 both branches stay possible.
        out.straightening_trivial[point] = f < Rat(1, 2);
        out.b[point] = b;
        if (first || b < out.minimum) out.minimum = b;
        first = false;
    }
    return out;
}

StraightenedValue straightened_component(const MobileSystem& m, const std::string& point,
                                         const VectorZ& s, const Int& lambda_cap)
{
    if (lambda_cap < 1) throw ValidationError("straightened component: cap must be at least 1");
    if (s.isZero()) return {Rat(0), Int(1)};
    StraightenedValue best{Rat(divisor_coefficient(m(s), point)), Int(1)};
    for (Int lambda = 2; lambda <= lambda_cap; ++lambda) {
        VectorZ scaled = s;
        for (Eigen::Index c = 0; c < s.size(); ++c) scaled(c) = s(c) * lambda;
        Rat value = Rat(divisor_coefficient(m(scaled), point)) / Rat(lambda);
        if (value > best.value) best = {value, lambda};
    }
    return best;
}

Certificate dichotomy_check(const MobileSystem& m, const SaturationDatum& F, const Int& s_bound)
{
    const BConstants constants = compute_b(F);
    Certificate cert;
    cert.check = "dichotomy";
    add_parameter(cert, "s_bound", s_bound);

    std::map<std::string, Int> caps;
    for (const auto& [point, b] : constants.b) {
        caps[point] = rat_floor(Rat(1) / b);
        add_parameter(cert, "b[" + point + "]", format_rat(b));
        if (caps[point] * s_bound > m.declared_degree_bound())
            throw DomainError("dichotomy check: index cap exceeds the declared degree bound");
    }

    for (const VectorZ& s : elements_by_coordinate_sum(m.domain(), s_bound)) {
        if (s.isZero()) continue;
        for (const std::string& point : m.support()) {
            const Rat b = constants.b.at(point);
            Rat e = straightened_component(m, point, s, caps.at(point)).value -
                    Rat(divisor_coefficient(m(s), point));
            if (e == 0) continue;
            if (e < b || e > 1 - b) {
                cert.verdict = Verdict::Violation;
                cert.witnesses.push_back("dichotomy fails at s=" + vec_str(s) + ", point " + point +
                                         ": e=" + format_rat(e) + " outside {0} ∪ [" +
                                         format_rat(b) + ", " + format_rat(Rat(1 - b)) + "]");
                return cert;
            }
        }
    }
    return cert;
}

Certificate index_bound_check(const MobileSystem& m, const SaturationDatum& F, const Int& s_bound)
{
    const BConstants constants = compute_b(F);
    Certificate cert;
    cert.check = "index-bound";
    add_parameter(cert, "s_bound", s_bound);
    add_parameter(cert, "scan_factor", Int(2));

    std::map<std::string, Int> caps;
    for (const auto& [point, b] : constants.b) {
        caps[point] = rat_floor(Rat(1) / b);
        add_parameter(cert, "index_cap[" + point + "]", caps[point]);
        if (2 * caps[point] * s_bound > m.declared_degree_bound())
            throw DomainError("index bound check: scan window exceeds the declared degree bound");
    }

    for (const VectorZ& s : elements_by_coordinate_sum(m.domain(), s_bound)) {
        if (s.isZero()) continue;
        for (const std::string& point : m.support()) {
            const Int cap = caps.at(point);
            // Scan twice the cap: a maximum first attained beyond the cap
            // contradicts the index bound, exposing an unsaturated input.
            StraightenedValue extended = straightened_component(m, point, s, 2 * cap);
            if (extended.index > cap) {
                cert.verdict = Verdict::Violation;
                cert.witnesses.push_back("index bound fails at s=" + vec_str(s) + ", point " +
                                         point + ": first attaining multiplier " +
                                         format_rat(Rat(extended.index)) + " exceeds the cap " +
                                         format_rat(Rat(cap)));
                return cert;
            }
        }
    }
    return cert;
}

Certificate graded_piece_oracle(const MobileSystem& m, const GeneratorSet& gens,
                                const Int& degree_bound)
{
    if (degree_bound > kOracleDegreeCap)
        throw EnumerationError("graded piece oracle: degree bound exceeds the combinatorial cap");
    if (degree_bound <= 0) throw ValidationError("graded piece oracle: degree bound not positive");
    if (gens.cone.ambient_dim() != m.domain().ambient_dim())
        throw ValidationError("graded piece oracle: cone dimension mismatch");

    std::vector<std::string> points(m.support().begin(), m.support().end());
    std::vector<std::vector<Int>> entry_values;
    for (const GeneratorEntry& entry : gens.entries) {
        if (entry.point.size() != m.domain().ambient_dim())
            throw ValidationError("graded piece oracle: generator dimension mismatch");
        if (entry.point.isZero())
            throw ValidationError("graded piece oracle: generator at the origin");
        if (!gens.cone.contains(entry.point))
            throw ValidationError("graded piece oracle: generator " + vec_str(entry.point) +
                                  " lies outside the target cone");
        if (m(entry.point) != entry.divisor)
            throw ValidationError("graded piece oracle: generator divisor at " +
                                  vec_str(entry.point) + " is inconsistent with the system");
        std::vector<Int> values;
        for (const std::string& point : points)
            values.push_back(divisor_coefficient(entry.divisor, point));
        entry_values.push_back(std::move(values));
    }

    Certificate cert;
    cert.check = "graded-piece-oracle";
    add_parameter(cert, "degree_bound", degree_bound);
    add_parameter(cert, "generators", Int(gens.entries.size()));

    std::vector<VectorZ> elements;
    for (const VectorZ& s : elements_by_coordinate_sum(m.domain(), degree_bound))
        if (gens.cone.contains(s)) elements.push_back(s);
    add_parameter(cert, "elements", Int(elements.size()));

    // Per-point max-plus dynamic program over the graded elements: the best
    // pole order any multiset of generators reaches in each degree.
    std::map<VectorZ, std::vector<Int>, LexLess> best;
    for (const VectorZ& s : elements) {
        if (s.isZero()) {
            best.emplace(s, std::vector<Int>(points.size(), Int(0)));
            continue;
        }
        std::optional<std::vector<Int>> reached;
        for (std::size_t g = 0; g < gens.entries.size(); ++g) {
            VectorZ rest = s - gens.entries[g].point;
            auto it = best.find(rest);
            if (it == best.end()) continue;
            if (!reached) reached = std::vector<Int>(points.size(), Int(0));
            for (std::size_t p = 0; p < points.size(); ++p)
                reached->at(p) = std::max(reached->at(p), Int(it->second[p] + entry_values[g][p]));
        }
        if (!reached) {
            cert.verdict = Verdict::Violation;
            cert.witnesses.push_back("degree " + vec_str(s) +
                                     " has no decomposition into generators");
            return cert;
        }
        const CurveDivisor target = m(s);
        for (std::size_t p = 0; p < points.size(); ++p) {
            if (reached->at(p) != divisor_coefficient(target, points[p])) {
                cert.verdict = Verdict::Violation;
                std::ostringstream msg;
                msg << "graded piece at s=" << vec_str(s) << ", point " << points[p]
                    << " is not generated: best combination reaches " << reached->at(p)
                    << " but the system value is " << divisor_coefficient(target, points[p]);
                cert.witnesses.push_back(msg.str());
                return cert;
            }
        }
        best.emplace(s, std::move(*reached));
    }
    return cert;
}

Certificate truncation_integral_check(const MobileSystem& m, const Int& kappa,
                                      const std::vector<VectorZ>& samples)
{
    if (kappa < 1) throw ValidationError("truncation check: constant must be positive");
    if (samples.empty()) throw ValidationError("truncation check: need at least one sample");
    for (const VectorZ& s : samples) {
        if (!m.domain().contains(s))
            throw ValidationError("truncation check: sample " + vec_str(s) +
                                  " is outside the domain");
    }

    Certificate cert;
    cert.check = "truncation-integral";
    add_parameter(cert, "kappa", kappa);
    add_parameter(cert, "samples", Int(samples.size()));

    auto scaled = [](const VectorZ& s, const Int& c) {
        VectorZ out = s;
        for (Eigen::Index i = 0; i < s.size(); ++i) out(i) = s(i) * c;
        return out;
    };

    // Monomial sections: the κ-th power of a degree-s section of maximal pole
    // order lands in the truncated algebra exactly when κ·m(s) ≤ m(κs).
    for (const VectorZ& s : samples) {
        const CurveDivisor low = m(s);
        const CurveDivisor high = m(scaled(s, kappa));
        for (const std::string& point : m.support()) {
            if (kappa * divisor_coefficient(low, point) > divisor_coefficient(high, point)) {
                cert.verdict = Verdict::Violation;
                cert.witnesses.push_back("monomial truncation fails at s=" + vec_str(s) +
                                         ", point " + point);
                return cert;
            }
        }
    }

    // Two-term sections from consecutive samples: every term of the binomial
    // expansion must respect the system's bound at its own degree.
    Int terms = 0;
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        const VectorZ& a = samples[i];
        const VectorZ& b = samples[i + 1];
        const CurveDivisor da = m(a), db = m(b);
        for (Int j = 0; j <= kappa; ++j) {
            VectorZ degree = a;
            for (Eigen::Index c = 0; c < a.size(); ++c)
                degree(c) = a(c) * j + b(c) * (kappa - j);
            const CurveDivisor bound = m(degree);
            ++terms;
            for (const std::string& point : m.support()) {
                Int pole = j * divisor_coefficient(da, point) +
                           (kappa - j) * divisor_coefficient(db, point);
                if (pole > divisor_coefficient(bound, point)) {
                    cert.verdict = Verdict::Violation;
                    std::ostringstream msg;
                    msg << "binomial term " << j << " of the two-term section at " << vec_str(a)
                        << ", " << vec_str(b) << " overflows at point " << point;
                    cert.witnesses.push_back(msg.str());
                    return cert;
                }
            }
        }
    }
    add_parameter(cert, "binomial_terms", terms);
    return cert;
}

namespace {

/** Forwards evaluations of an existing system under a restricted domain. */
MobileSystem restrict_to(const MobileSystem& m, FgMonoid domain)
{
    MobileSystem inner = m;
    auto oracle = [inner](const VectorZ& s) { return inner(s); };
    return MobileSystem(std::move(domain), oracle,
                        std::set<std::string>(m.support().begin(), m.support().end()),
                        m.declared_degree_bound());
}

}  // namespace

PipelineResult finite_generation_pipeline(const MobileSystem& m, const SaturationDatum& F,
                                          const RationalCone& cone,
                                          const std::optional<Int>& oracle_degree,
                                          int ray_resolution)
{
    if (cone.ambient_dim() != m.domain().ambient_dim())
        throw ValidationError("generation pipeline: cone dimension mismatch");
    if (oracle_degree && *oracle_degree > kOracleDegreeCap)
        throw EnumerationError("generation pipeline: oracle degree exceeds the combinatorial cap");

    const BConstants constants = compute_b(F);
    const Int index_floor = rat_floor(Rat(1) / constants.minimum);
    const Int kappa = factorial(index_floor);

    Certificate cert;
    cert.check = "finite-generation-pipeline";
    for (const auto& [point, b] : constants.b) add_parameter(cert, "b[" + point + "]", format_rat(b));
    add_parameter(cert, "kappa", kappa);
    add_parameter(cert, "ray_resolution", Int(ray_resolution));

    auto aborted = [&](Verdict verdict, const std::string& witness) {
        cert.verdict = verdict;
        cert.witnesses.push_back(witness);
        GeneratorSet empty{{}, Provenance::TruncationDerived, Int(0), cone};
        return PipelineResult{constants, kappa,          {},
                              std::move(empty), std::nullopt, std::move(cert)};
    };

    // Entry checks, rerun at modest bounds so the certificate is self-contained.
    const Int validation_bound = std::min(Int(12), m.declared_degree_bound());
    Certificate validation = validate_system(m, validation_bound, 2);
    add_parameter(cert, "validation_bound", validation_bound);
    if (!validation.passed())
        return aborted(validation.verdict, "validation: " + validation.witnesses.front());

    const Int saturation_bound = std::min(Int(10), Int(m.declared_degree_bound() / 4));
    Certificate saturation = check_saturation(m, F, saturation_bound, Int(4));
    add_parameter(cert, "saturation_bound", saturation_bound);
    if (!saturation.passed())
        return aborted(saturation.verdict, "saturation: " + saturation.witnesses.front());

    // Certified piecewise-linear decomposition of each straightened component.
    std::vector<LinearPiece> pieces;
    std::vector<std::vector<RationalCone>> per_point_pieces;
    for (const std::string& point : m.support()) {
        const Int cap = rat_floor(Rat(1) / constants.b.at(point));
        StraightenedFunction sharp(m.component(point), cap);
        PLDetectOutcome outcome = [&] {
            try {
                return pl_detect(sharp, cone, ray_resolution);
            } catch (const EnumerationError& error) {
                return PLDetectOutcome(NonPLEvidence{{}, {}, Int(-1)});
            }
        }();
        if (const auto* evidence = std::get_if<NonPLEvidence>(&outcome)) {
            if (evidence->samples < 0)
                return aborted(Verdict::Inconclusive,
                               "piecewise-linear detection inconclusive for point " + point);
            std::ostringstream msg;
            msg << "component at point " << point << " shows " << evidence->functionals.size()
                << " pairwise distinct local functionals";
            return aborted(Verdict::Violation, msg.str());
        }
        auto& decomposition = std::get<PLDecomposition>(outcome);
        add_parameter(cert, "pieces[" + point + "]", Int(decomposition.pieces.size()));
        std::vector<RationalCone> cones;
        for (const LinearPiece& piece : decomposition.pieces) cones.push_back(piece.cone);
        per_point_pieces.push_back(std::move(cones));
        for (LinearPiece& piece : decomposition.pieces) pieces.push_back(std::move(piece));
    }

    // Common refinement of the per-point decompositions.
    std::vector<RationalCone> refined = per_point_pieces.front();
    for (std::size_t i = 1; i < per_point_pieces.size(); ++i) {
        std::vector<RationalCone> next;
        for (const RationalCone& a : refined) {
            for (const RationalCone& b : per_point_pieces[i]) {
                if (cone.ambient_dim() == 2) {
                    if (auto meet = intersect_planar(a, b); meet && meet->dim() == 2)
                        next.push_back(std::move(*meet));
                } else if (refined.size() == 1 && per_point_pieces[i].size() == 1) {
                    next.push_back(a);
                } else {
                    throw EnumerationError(
                        "generation pipeline: refinement beyond the plane is not supported");
                }
            }
        }
        refined = std::move(next);
    }
    add_parameter(cert, "refined_pieces", Int(refined.size()));

    // Truncation generators: Hilbert bases of the κ-fold truncation per piece.
    const FgMonoid truncated =
        truncate(m.domain(), std::vector<Int>(m.domain().ambient_dim(), kappa));
    std::set<VectorZ, LexLess> basis_points;
    for (const RationalCone& piece : refined) {
        const FgMonoid piece_basis = hilbert_basis_intersection(truncated, piece);
        for (const VectorZ& g : piece_basis.generators()) basis_points.insert(g);
    }
    GeneratorSet truncation{{}, Provenance::TruncationDerived, Int(0), cone};
    for (const VectorZ& g : basis_points) truncation.entries.push_back({g, m(g)});
    add_parameter(cert, "truncation_generators", Int(truncation.entries.size()));

    std::optional<GeneratorSet> minimal;
    if (oracle_degree) {
        const Int bound = *oracle_degree;
        truncation.degree_bound_checked = bound;
        Certificate truncated_oracle =
            graded_piece_oracle(restrict_to(m, truncated), truncation, bound);
        if (!truncated_oracle.passed())
            return aborted(truncated_oracle.verdict,
                           "truncated algebra: " + truncated_oracle.witnesses.front());

        // Greedy minimal generators of the untruncated algebra: an element is a
        // generator exactly when the best combination of earlier generators
        // misses its value at some support point.
        std::vector<std::string> points(m.support().begin(), m.support().end());
        GeneratorSet greedy{{}, Provenance::OracleMinimal, bound, cone};
        std::vector<std::vector<Int>> gen_values;
        std::map<VectorZ, std::vector<Int>, LexLess> best;
        for (const VectorZ& s : elements_by_coordinate_sum(m.domain(), bound)) {
            if (!cone.contains(s)) continue;
            if (s.isZero()) {
                best.emplace(s, std::vector<Int>(points.size(), Int(0)));
                continue;
            }
            std::optional<std::vector<Int>> reached;
            for (std::size_t g = 0; g < greedy.entries.size(); ++g) {
                VectorZ rest = s - greedy.entries[g].point;
                auto it = best.find(rest);
                if (it == best.end()) continue;
                if (!reached) reached = std::vector<Int>(points.size(), Int(0));
                for (std::size_t p = 0; p < points.size(); ++p)
                    reached->at(p) =
                        std::max(reached->at(p), Int(it->second[p] + gen_values[g][p]));
            }
            const CurveDivisor value = m(s);
            std::vector<Int> target;
            for (const std::string& point : points)
                target.push_back(divisor_coefficient(value, point));
            if (!reached || *reached != target) {
                greedy.entries.push_back({s, value});
                gen_values.push_back(target);
            }
            best.emplace(s, std::move(target));
        }
        Certificate minimal_oracle = graded_piece_oracle(m, greedy, bound);
        if (!minimal_oracle.passed())
            return aborted(minimal_oracle.verdict,
                           "oracle-minimal generators: " + minimal_oracle.witnesses.front());
        add_parameter(cert, "oracle_degree", bound);
        add_parameter(cert, "oracle_generators", Int(greedy.entries.size()));
        minimal = std::move(greedy);
    }

    return PipelineResult{constants,        kappa,   std::move(pieces), std::move(truncation),
                          std::move(minimal), std::move(cert)};
}

BoundaryCounterexample boundary_counterexample(const MobileSystem& m, const SaturationDatum& F,
                                               const Int& ray_bound, const Int& mu_nu_bound)
{
    const FgMonoid& domain = m.domain();
    if (domain.ambient_dim() != 2)
        throw ValidationError("boundary counterexample: domain must be the free orthant in rank 2");
    for (const VectorZ& g : domain.generators())
        if (g(0) < 0 || g(1) < 0)
            throw ValidationError("boundary counterexample: domain must be the free orthant");
    if (!domain.contains(make_point({1, 0})) || !domain.contains(make_point({0, 1})))
        throw ValidationError("boundary counterexample: domain must be the free orthant");

    // The construction doubles interior arguments, so additivity of the source
    // system is load-bearing; verify it exhaustively at a small bound.
    const auto elements = elements_by_coordinate_sum(domain, Int(8));
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (std::size_t j = i; j < elements.size(); ++j) {
            const VectorZ &x = elements[i], &y = elements[j];
            CurveDivisor sum = m(x);
            for (const auto& [point, coef] : m(y)) sum[point] += coef;
            for (auto it = sum.begin(); it != sum.end();) {
                it = it->second == 0 ? sum.erase(it) : std::next(it);
            }
            CurveDivisor joint = m(VectorZ(x + y));
            for (auto it = joint.begin(); it != joint.end();) {
                it = it->second == 0 ? joint.erase(it) : std::next(it);
            }
            if (sum != joint)
                throw ValidationError("boundary counterexample: the source system is not additive");
        }
    }

    MobileSystem source = m;
    auto oracle = [source](const VectorZ& s) {
        if (s(0) > 0 && s(1) > 0) {
            VectorZ doubled = s;
            doubled(0) = s(0) * 2;
            doubled(1) = s(1) * 2;
            return source(doubled);
        }
        return source(s);
    };
    MobileSystem doubled(domain, oracle,
                         std::set<std::string>(m.support().begin(), m.support().end()),
                         m.declared_degree_bound() / 2);

    Certificate cert;
    cert.check = "boundary-counterexample";
    add_parameter(cert, "ray_bound", ray_bound);
    add_parameter(cert, "mu_nu_bound", mu_nu_bound);
    if (ray_bound * mu_nu_bound > doubled.declared_degree_bound())
        throw DomainError("boundary counterexample: bounds exceed the declared degree bound");

    Certificate superadditive = validate_system(doubled, Int(12), 2);
    add_parameter(cert, "superadditivity_bound", Int(12));
    if (!superadditive.passed()) {
        cert.verdict = superadditive.verdict;
        cert.witnesses.push_back("doubled system: " + superadditive.witnesses.front());
        return {std::move(doubled), std::move(cert)};
    }
    for (const auto& [key, value] : superadditive.parameters)
        if (key == "pairs_checked") add_parameter(cert, "superadditivity_pairs", value);

    // Saturation is a property of rays: check it along every primitive ray.
    Int rays_checked = 0;
    for (const VectorZ& s : elements_by_coordinate_sum(domain, ray_bound)) {
        if (s.isZero() || int_gcd(s(0), s(1)) != 1) continue;
        ++rays_checked;
        for (Int nu = 1; nu <= mu_nu_bound; ++nu) {
            VectorZ nus = s;
            nus(0) = s(0) * nu;
            nus(1) = s(1) * nu;
            const CurveDivisor d_nu = doubled(nus);
            for (Int mu = 1; mu <= mu_nu_bound; ++mu) {
                VectorZ mus = s;
                mus(0) = s(0) * mu;
                mus(1) = s(1) * mu;
                const CurveDivisor d_mu = doubled(mus);
                for (const std::string& point : doubled.support()) {
                    Rat scaled = Rat(mu) / Rat(nu) * Rat(divisor_coefficient(d_nu, point));
                    if (rat_ceil(scaled - F.at(point)) > divisor_coefficient(d_mu, point)) {
                        cert.verdict = Verdict::Violation;
                        cert.witnesses.push_back("per-ray saturation fails at s=" + vec_str(s) +
                                                 ", mu=" + format_rat(Rat(mu)) +
                                                 ", nu=" + format_rat(Rat(nu)) + ", point " +
                                                 point);
                        return {std::move(doubled), std::move(cert)};
                    }
                }
            }
        }
    }
    add_parameter(cert, "rays_checked", rays_checked);

    // The jump: along interior rays (ν,1) approaching the axis, the
    // straightened value is exactly twice the additive one, so the per-unit
    // deviation from the boundary linear extension never falls below half the
    // boundary value — no continuous extension exists.
    bool jump_witnessed = false;
    for (int axis = 0; axis < 2; ++axis) {
        VectorZ boundary = make_point({1 - axis, axis});
        VectorZ other = make_point({axis, 1 - axis});
        for (const std::string& point : doubled.support()) {
            const Int boundary_value = divisor_coefficient(m(boundary), point);
            if (boundary_value <= 0) continue;
            jump_witnessed = true;
            StraightenedValue along = straightened_component(doubled, point, boundary, Int(4));
            if (along.value != Rat(boundary_value)) {
                cert.verdict = Verdict::Violation;
                cert.witnesses.push_back("boundary ray " + vec_str(boundary) + " at point " +
                                         point + " is not additive for the doubled system");
                return {std::move(doubled), std::move(cert)};
            }
            const Int other_value = divisor_coefficient(m(other), point);
            for (Int nu = 1; nu <= 6; ++nu) {
                VectorZ approach = boundary;
                approach(axis) = 1;
                approach(1 - axis) = nu;
                StraightenedValue inner = straightened_component(doubled, point, approach, Int(4));
                Rat expected = 2 * (Rat(nu) * Rat(boundary_value) + Rat(other_value));
                if (inner.value != expected ||
                    inner.value - Rat(nu) * Rat(boundary_value) < Rat(boundary_value, 2)) {
                    cert.verdict = Verdict::Violation;
                    cert.witnesses.push_back("factor-2 jump fails along " + vec_str(approach) +
                                             " at point " + point + ": straightened value " +
                                             format_rat(inner.value) + ", expected " +
                                             format_rat(expected));
                    return {std::move(doubled), std::move(cert)};
                }
            }
        }
    }
    if (!jump_witnessed) {
        cert.verdict = Verdict::Inconclusive;
        cert.witnesses.push_back("no support point has a positive value on a boundary ray");
    }
    return {std::move(doubled), std::move(cert)};
}

RandomInstance random_floor_linear_instance(std::uint64_t seed, Eigen::Index rank)
{
    if (rank < 1 || rank > 3)
        throw ValidationError("random instance: rank must be between 1 and 3");
    std::mt19937_64 rng(seed);
    auto pick = [&rng](unsigned n) { return static_cast<long>(rng() % n); };

    std::vector<VectorZ> unit_generators;
    for (Eigen::Index i = 0; i < rank; ++i) {
        VectorZ e = VectorZ::Zero(rank);
        e(i) = 1;
        unit_generators.push_back(e);
    }
    FgMonoid domain(rank, unit_generators);

    const int point_count = 1 + static_cast<int>(pick(2));
    const std::vector<std::string> names{"P", "Q"};
    std::map<std::string, VectorQ> coefficients;
    std::map<std::string, Rat> f;
    for (int p = 0; p < point_count; ++p) {
        long denominator = 2 + pick(5);
        VectorQ coeffs(rank);
        for (Eigen::Index i = 0; i < rank; ++i)
            coeffs(i) = Rat(1 + pick(static_cast<unsigned>(3 * denominator)), denominator);
        coefficients[names[p]] = coeffs;
        f[names[p]] = Rat(denominator - 1, denominator);
    }

    std::vector<VectorZ> rays;
    if (rank == 1) {
        rays.push_back(make_point({1}));
    } else {
        // Strictly positive rays keep the cone interior to the orthant.
        while (static_cast<Eigen::Index>(rays.size()) < rank) {
            VectorZ ray(rank);
            for (Eigen::Index i = 0; i < rank; ++i) ray(i) = 1 + pick(3);
            ray = primitive_ray(ray);
            bool fresh = true;
            for (const VectorZ& seen : rays)
                if (seen == ray) fresh = false;
            if (!fresh) continue;
            rays.push_back(ray);
            MatrixQ span(static_cast<Eigen::Index>(rays.size()), rank);
            for (std::size_t r = 0; r < rays.size(); ++r)
                span.row(static_cast<Eigen::Index>(r)) = to_rational(rays[r]).transpose();
            if (rank_exact(span) != static_cast<Eigen::Index>(rays.size())) rays.pop_back();
        }
    }

    return RandomInstance{floor_linear_system(domain, coefficients, Int(1000000)),
                          SaturationDatum(f), RationalCone(rank, rays)};
}

}  // namespace bdiv
