#include "bdiv/superlinear.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <utility>

namespace bdiv {

namespace {

constexpr int kMultipleScanCap = 64;      // multiples tried when clearing a rational point into the monoid
constexpr int kMaxRayResolution = 20;     // dyadic depth cap for splitting and evidence sampling

Rat dot_qz(const VectorQ& a, const VectorZ& b)
{
    Rat s = 0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += a(i) * Rat(b(i));
    return s;
}

Rat rat_abs(const Rat& x) { return x < 0 ? Rat(-x) : x; }

}  // namespace

MonoidFunction::MonoidFunction(FgMonoid domain, Oracle oracle, Int declared_degree_bound)
{
    if (!oracle) throw ValidationError("monoid function: oracle must be callable");
    if (declared_degree_bound <= 0)
        throw ValidationError("monoid function: declared degree bound must be positive");
    state_ = std::make_shared<State>(std::move(domain), std::move(oracle),
                                     std::move(declared_degree_bound));
}

Rat MonoidFunction::operator()(const VectorZ& p) const
{
    auto& st = *state_;
    if (p.size() != st.domain.ambient_dim())
        throw ValidationError("monoid function: dimension mismatch");
    if (st.domain.grade(p) > st.degree_bound) {
        std::ostringstream msg;
        msg << "monoid function: grade " << st.domain.grade(p)
            << " exceeds the declared degree bound " << st.degree_bound;
        throw DomainError(msg.str());
    }
    {
        std::lock_guard<std::mutex> lock(st.mutex);
        auto it = st.memo.find(p);
        if (it != st.memo.end()) return it->second;
    }
    Rat value = st.oracle(p);
    std::lock_guard<std::mutex> lock(st.mutex);
    return st.memo.emplace(p, std::move(value)).first->second;
}

MonoidFunction floor_linear_function(FgMonoid domain, VectorQ coeffs, Int degree_bound)
{
    if (coeffs.size() != domain.ambient_dim())
        throw ValidationError("floor-linear function: coefficient dimension mismatch");
    auto oracle = [coeffs](const VectorZ& p) { return Rat(rat_floor(dot_qz(coeffs, p))); };
    return MonoidFunction(std::move(domain), oracle, std::move(degree_bound));
}

MonoidFunction min_floor_linear_function(FgMonoid domain, std::vector<VectorQ> coeff_list,
                                         Int degree_bound)
{
    if (coeff_list.empty())
        throw ValidationError("min-floor-linear function: need at least one functional");
    for (const auto& c : coeff_list) {
        if (c.size() != domain.ambient_dim())
            throw ValidationError("min-floor-linear function: coefficient dimension mismatch");
    }
    auto oracle = [coeff_list](const VectorZ& p) {
        Rat best = dot_qz(coeff_list.front(), p);
        for (std::size_t i = 1; i < coeff_list.size(); ++i)
            best = std::min(best, dot_qz(coeff_list[i], p));
        return Rat(rat_floor(best));
    };
    return MonoidFunction(std::move(domain), oracle, std::move(degree_bound));
}

MonoidFunction table_function(FgMonoid domain, std::map<VectorZ, Rat, LexLess> values,
                              Int degree_bound)
{
    auto table = std::make_shared<std::map<VectorZ, Rat, LexLess>>(std::move(values));
    auto oracle = [table](const VectorZ& p) {
        auto it = table->find(p);
        if (it == table->end()) throw DomainError("table function: point not in the value table");
        return it->second;
    };
    return MonoidFunction(std::move(domain), oracle, std::move(degree_bound));
}

SuperadditivityReport check_superadditive(const MonoidFunction& f, const Int& degree_bound)
{
    if (degree_bound > f.declared_degree_bound())
        throw DomainError("superadditivity check: bound exceeds the declared degree bound");
    SuperadditivityReport report;
    const auto elems = f.domain().elements_with_grade_at_most(degree_bound);
    for (std::size_t i = 0; i < elems.size(); ++i) {
        const Int gi = f.domain().grade(elems[i]);
        for (std::size_t j = i; j < elems.size(); ++j) {
            if (gi + f.domain().grade(elems[j]) > degree_bound) continue;
            VectorZ sum = elems[i] + elems[j];
            ++report.pairs_checked;
            if (f(elems[i]) + f(elems[j]) > f(sum)) {
                report.holds = false;
                report.witness = std::make_pair(elems[i], elems[j]);
                return report;
            }
        }
    }
    return report;
}

bool one_point_additivity(const MonoidFunction& f, const VectorZ& s0, const Int& kappa_max)
{
    const auto& gens = f.domain().generators();
    if (s0.size() != f.domain().ambient_dim())
        throw ValidationError("one-point additivity: dimension mismatch");
    if (kappa_max < 1) throw ValidationError("one-point additivity: kappa_max must be positive");

    // Strictly positive representation: s0 = sum (w_i + 1) e_i with w >= 0.
    VectorZ base = VectorZ::Zero(s0.size());
    for (const auto& g : gens) base += g;
    auto witness = f.domain().membership_witness(s0 - base);
    if (!witness)
        throw DomainError("one-point additivity: point has no strictly positive representation");

    Rat split = 0;
    for (std::size_t i = 0; i < gens.size(); ++i)
        split += Rat((*witness)[i] + 1) * f(gens[i]);
    const Rat at_point = f(s0);
    if (split != at_point) return false;
    for (Int k = 2; k <= kappa_max; ++k) {
        if (f(VectorZ(s0 * k)) != Rat(k) * at_point) return false;
    }
    return true;
}

Int compute_index(const MonoidFunction& f, const VectorZ& s, const Int& index_cap,
                  const Int& confirmation_bound)
{
    if (index_cap < 1) throw ValidationError("index: cap must be positive");
    if (confirmation_bound < 2) throw ValidationError("index: confirmation bound must be >= 2");
    for (Int lambda = 1; lambda <= index_cap; ++lambda) {
        VectorZ base = s * lambda;
        const Rat value = f(base);
        bool stable = true;
        for (Int mu = 2; mu <= confirmation_bound; ++mu) {
            if (f(VectorZ(base * mu)) != Rat(mu) * value) {
                stable = false;
                break;
            }
        }
        if (stable) return lambda;
    }
    std::ostringstream msg;
    msg << "index: no multiplier up to " << index_cap << " evaluates linearly";
    throw EnumerationError(msg.str());
}

StraightenedFunction::StraightenedFunction(MonoidFunction base, Int index_cap,
                                           Int confirmation_bound)
{
    if (index_cap < 1) throw ValidationError("straightening: index cap must be positive");
    FgMonoid domain = base.domain();
    state_ = std::make_shared<State>(std::move(domain), std::move(base), nullptr,
                                     std::move(index_cap), std::move(confirmation_bound));
}

StraightenedFunction::StraightenedFunction(FgMonoid domain,
                                           std::function<Rat(const VectorQ&)> homogeneous)
{
    if (!homogeneous) throw ValidationError("straightening: evaluator must be callable");
    state_ = std::make_shared<State>(std::move(domain), std::nullopt, std::move(homogeneous),
                                     Int(1), Int(1));
}

const FgMonoid& StraightenedFunction::domain() const { return state_->domain; }

const MonoidFunction& StraightenedFunction::base() const
{
    if (!state_->base) throw ValidationError("straightening: no discrete base function attached");
    return *state_->base;
}

Int StraightenedFunction::index(const VectorZ& s) const
{
    if (!state_->base) return Int(1);  // already homogeneous
    auto& st = *state_;
    {
        std::lock_guard<std::mutex> lock(st.mutex);
        auto it = st.index_table.find(s);
        if (it != st.index_table.end()) return it->second;
    }
    Int iota = compute_index(*st.base, s, st.index_cap, st.confirmation_bound);
    std::lock_guard<std::mutex> lock(st.mutex);
    return st.index_table.emplace(s, std::move(iota)).first->second;
}

Rat StraightenedFunction::value(const VectorQ& s) const
{
    auto& st = *state_;
    if (s.size() != st.domain.ambient_dim())
        throw ValidationError("straightening: dimension mismatch");
    if (st.direct) return st.direct(s);
    if (s.isZero()) return Rat(0);
    if (!st.domain.associated_cone().contains(s))
        throw DomainError("straightening: point outside the domain cone");
    Int kappa0 = 1;
    for (Eigen::Index i = 0; i < s.size(); ++i) kappa0 = int_lcm(kappa0, rat_den(s(i)));
    for (int t = 1; t <= kMultipleScanCap; ++t) {
        const Int factor = kappa0 * t;
        VectorZ v(s.size());
        for (Eigen::Index i = 0; i < s.size(); ++i) v(i) = rat_num(s(i) * Rat(factor));
        if (!st.domain.contains(v)) continue;
        const Int iota = index(v);
        return (*st.base)(VectorZ(v * iota)) / Rat(iota * factor);
    }
    throw EnumerationError("straightening: no integral multiple lies in the monoid within the scan cap");
}

Rat straighten(const MonoidFunction& f, const VectorQ& s, const Int& index_cap)
{
    return StraightenedFunction(f, index_cap).value(s);
}

Rat lipschitz_estimate(const StraightenedFunction& f, const VectorQ& center, const Rat& radius)
{
    const Eigen::Index r = f.domain().ambient_dim();
    if (center.size() != r) throw ValidationError("Lipschitz estimate: dimension mismatch");
    if (radius <= 0) throw ValidationError("Lipschitz estimate: radius must be positive");
    if (r > 12) throw EnumerationError("Lipschitz estimate: too many ball corners in this dimension");

    const RationalCone& cone = f.domain().associated_cone();
    const auto corner = [&](const Rat& rho, unsigned long mask) {
        VectorQ p = center;
        for (Eigen::Index i = 0; i < r; ++i) p(i) += ((mask >> i) & 1u) ? rho : -rho;
        return p;
    };
    const unsigned long corners = 1ul << r;

    // Concavity pins the range on the doubled ball by its corner values:
    // min on a box is attained at a corner, and f(x) <= 2 f(c) - f(2c - x).
    Rat low;
    bool first = true;
    for (unsigned long mask = 0; mask < corners; ++mask) {
        VectorQ p = corner(2 * radius, mask);
        if (cone.position(p) != ConePosition::RelativeInterior)
            throw DomainError("Lipschitz estimate: doubled ball leaves the domain cone interior");
        Rat v = f.value(p);
        if (first || v < low) low = v;
        first = false;
    }
    const Rat at_center = f.value(center);
    const Rat bound = std::max(rat_abs(low), rat_abs(2 * at_center - low));
    const Rat slope = 2 * bound / radius;

    // Self-check on sampled pairs inside the inner ball.
    std::vector<VectorQ> samples;
    samples.push_back(center);
    for (unsigned long mask = 0; mask < corners; ++mask) samples.push_back(corner(radius, mask));
    for (Eigen::Index i = 0; i < r; ++i) {
        VectorQ p = center;
        p(i) += radius / 2;
        samples.push_back(p);
    }
    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t j = i + 1; j < samples.size(); ++j) {
            Rat dist = 0;
            for (Eigen::Index k = 0; k < r; ++k)
                dist = std::max(dist, rat_abs(samples[i](k) - samples[j](k)));
            if (rat_abs(f.value(samples[i]) - f.value(samples[j])) > slope * dist)
                throw ValidationError("Lipschitz estimate: sampled pair exceeds the certified constant");
        }
    }
    return slope;
}

namespace {

/**
 * Attempts the additivity certificate on one simplicial piece: Hilbert basis,
 * equality at the sum of its elements (the one-point hypothesis for the
 * homogeneous function), an exactly consistent linear functional through all
 * basis values, and — when a discrete base exists — the same identity at base
 * level after clearing every ray index.
 */
std::optional<LinearPiece> certify_piece(const StraightenedFunction& f, const RationalCone& piece)
{
    const Eigen::Index r = piece.ambient_dim();
    try {
        FgMonoid basis = hilbert_basis_intersection(f.domain(), piece);
        const auto& gens = basis.generators();
        if (gens.empty()) return std::nullopt;

        VectorZ s0 = VectorZ::Zero(r);
        for (const auto& g : gens) s0 += g;
        Rat total = 0;
        for (const auto& g : gens) total += f.value(g);
        if (f.value(s0) != total) return std::nullopt;

        MatrixQ rows(static_cast<Eigen::Index>(gens.size()), r);
        VectorQ values(static_cast<Eigen::Index>(gens.size()));
        for (std::size_t i = 0; i < gens.size(); ++i) {
            for (Eigen::Index j = 0; j < r; ++j) rows(static_cast<Eigen::Index>(i), j) = Rat(gens[i](j));
            values(static_cast<Eigen::Index>(i)) = f.value(gens[i]);
        }
        VectorQ functional;
        try {
            functional = solve_exact(rows, values);
        } catch (const ValidationError&) {
            return std::nullopt;
        }

        if (f.has_base()) {
            Int mu = f.index(s0);
            for (const auto& g : gens) mu = int_lcm(mu, f.index(g));
            Rat base_total = 0;
            for (const auto& g : gens) base_total += f.base()(VectorZ(g * mu));
            if (f.base()(VectorZ(s0 * mu)) != base_total) return std::nullopt;
        }
        return LinearPiece{piece, functional, std::move(basis), std::move(s0)};
    } catch (const EnumerationError&) {
        return std::nullopt;
    } catch (const DomainError&) {
        return std::nullopt;
    }
}

/** Chord functional between consecutive arc samples, canonicalized by its
 *  values on the two arc endpoints. */
struct ChordKey {
    Rat at_u;
    Rat at_v;
    bool operator<(const ChordKey& o) const
    {
        if (at_u != o.at_u) return at_u < o.at_u;
        return at_v < o.at_v;
    }
};

}  // namespace

PLDetectOutcome pl_detect(const StraightenedFunction& f, const RationalCone& cone,
                          int ray_resolution, int evidence_threshold)
{
    if (ray_resolution < 1 || ray_resolution > kMaxRayResolution)
        throw ValidationError("piecewise-linear detection: resolution out of range");
    if (evidence_threshold < 2)
        throw ValidationError("piecewise-linear detection: evidence threshold must be >= 2");
    if (cone.ambient_dim() != f.domain().ambient_dim())
        throw ValidationError("piecewise-linear detection: dimension mismatch");

    const RationalCone& domain_cone = f.domain().associated_cone();
    for (const auto& ray : cone.rays()) {
        if (domain_cone.position(ray) != ConePosition::RelativeInterior)
            throw DomainError(
                "piecewise-linear detection: target cone must lie in the domain cone interior");
    }

    std::vector<LinearPiece> pieces;
    const std::function<bool(const RationalCone&, int)> process =
        [&](const RationalCone& piece, int depth) -> bool {
        if (auto cert = certify_piece(f, piece)) {
            pieces.push_back(std::move(*cert));
            return true;
        }
        if (piece.dim() == 2 && depth < ray_resolution) {
            const auto extreme = piece.extreme_rays();
            VectorZ mediant = primitive_ray(VectorZ(extreme[0] + extreme[1]));
            const bool left = process(
                RationalCone(piece.ambient_dim(), std::vector<VectorZ>{extreme[0], mediant}),
                depth + 1);
            const bool right = process(
                RationalCone(piece.ambient_dim(), std::vector<VectorZ>{mediant, extreme[1]}),
                depth + 1);
            return left && right;
        }
        return false;
    };

    bool certified = true;
    for (const auto& piece : simplicial_subdivision(cone)) {
        if (!process(piece, 0)) certified = false;
    }
    if (certified) return PLDecomposition{std::move(pieces), cone};

    if (cone.dim() != 2)
        throw EnumerationError(
            "piecewise-linear detection: certification failed and evidence sampling is planar only");

    // Dyadic chord sweep between the two extreme rays.  Each chord determines
    // a functional by its values at the arc endpoints; a genuinely piecewise
    // linear function can only realize as many distinct ones as it has pieces.
    const auto extreme = cone.extreme_rays();
    const VectorQ u = to_rational(extreme[0]);
    const VectorQ v = to_rational(extreme[1]);
    const long steps = 1l << ray_resolution;
    std::map<ChordKey, std::size_t> seen;
    NonPLEvidence evidence;
    evidence.samples = steps;

    MatrixQ endpoint_rows(2, cone.ambient_dim());
    for (Eigen::Index j = 0; j < cone.ambient_dim(); ++j) {
        endpoint_rows(0, j) = u(j);
        endpoint_rows(1, j) = v(j);
    }

    Rat prev_value = f.value(u);
    VectorQ prev_point = u;
    for (long k = 1; k <= steps; ++k) {
        const Rat t(k, steps);
        const VectorQ point = (1 - t) * u + t * v;
        const Rat value = f.value(point);
        const Rat t0(k - 1, steps);
        // Solve (1-t) L(u) + t L(v) = f(x(t)) at both chord ends; the 2x2
        // system has determinant t1 - t0 != 0, so the key is canonical.
        const Rat at_v = ((1 - t0) * value - (1 - t) * prev_value) / (t - t0);
        const Rat at_u = (t * prev_value - t0 * value) / (t - t0);
        ChordKey key{at_u, at_v};
        if (seen.emplace(key, seen.size()).second) {
            VectorQ rhs(2);
            rhs(0) = key.at_u;
            rhs(1) = key.at_v;
            evidence.functionals.push_back(solve_exact(endpoint_rows, rhs));
            evidence.rays.push_back(prev_point);
        }
        prev_value = value;
        prev_point = point;
    }

    if (static_cast<int>(evidence.functionals.size()) >= evidence_threshold) return evidence;
    std::ostringstream msg;
    msg << "piecewise-linear detection: inconclusive (certification failed, only "
        << evidence.functionals.size() << " distinct chord functionals at resolution 2^-"
        << ray_resolution << ")";
    throw EnumerationError(msg.str());
}

Rat dyadic_staircase_ray_value(unsigned n)
{
    if (n < 2) throw DomainError("staircase ray value: defined for n >= 2");
    // 17/6 + 2^-n - (4/3) 4^-n, the exact value at (1/2^n, 1).
    const Rat half_pow(Int(1), Int(1) << n);
    const Rat quarter_pow(Int(1), Int(1) << (2 * n));
    return Rat(17, 6) + half_pow - Rat(4, 3) * quarter_pow;
}

StraightenedFunction build_dyadic_staircase()
{
    FgMonoid domain(2, {make_point({-1, 1}), make_point({1, 0})});
    auto evaluator = [](const VectorQ& p) -> Rat {
        if (p.size() != 2) throw ValidationError("staircase: dimension mismatch");
        const Rat& x = p(0);
        const Rat& y = p(1);
        if (y < 0 || x + y < 0) throw DomainError("staircase: point outside the domain cone");
        // Wedge between (0,1) and (-1,1): value interpolates the limit slope
        // 17/6 at (0,1) and 11/6 at (-1,1).
        if (x <= 0) return -x * Rat(11, 6) + (x + y) * Rat(17, 6);
        // Wedge between (1,0) and (1/4,1): values 1/2 and 3.
        if (y <= 4 * x) return x / 2 + y * Rat(23, 8);
        // Wedge between (1/2^n, 1) and (1/2^(n+1), 1) for the unique n >= 2
        // with 2^n x <= y <= 2^(n+1) x.
        unsigned n = 2;
        Rat power = 8;  // 2^(n+1)
        while (power * x < y) {
            power *= 2;
            ++n;
        }
        const Rat alpha = power * x - y;
        const Rat beta = 2 * y - power * x;
        return alpha * dyadic_staircase_ray_value(n) + beta * dyadic_staircase_ray_value(n + 1);
    };
    return StraightenedFunction(std::move(domain), std::move(evaluator));
}

}  // namespace bdiv
