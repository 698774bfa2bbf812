#include "bdiv/lattice.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <utility>

namespace bdiv {

namespace {

/** Solution of a*x = b when the system is consistent, nullopt otherwise. */
std::optional<VectorQ> solve_if_consistent(const MatrixQ& a, const VectorQ& b) {
    Eigen::FullPivLU<MatrixQ> lu(a);
    lu.setThreshold(Rat(0));
    VectorQ x = lu.solve(b);
    if (a * x == b) return x;
    return std::nullopt;
}

std::vector<VectorZ> dedup_rays(Eigen::Index ambient_dim, const std::vector<VectorQ>& ray_list) {
    std::vector<VectorZ> rays;
    for (const VectorQ& ray : ray_list) {
        if (ray.size() != ambient_dim) throw DomainError("cone ray has wrong dimension");
        if (ray.isZero()) throw ValidationError("cone rays must be nonzero");
        VectorZ primitive = primitive_ray(ray);
        bool duplicate = false;
        for (const VectorZ& seen : rays)
            if (seen == primitive) { duplicate = true; break; }
        if (!duplicate) rays.push_back(std::move(primitive));
    }
    return rays;
}

}  // namespace

RationalCone::RationalCone(Eigen::Index ambient_dim, const std::vector<VectorQ>& ray_list)
    : ambient_dim_(ambient_dim), rays_(dedup_rays(ambient_dim, ray_list)) {
    if (ambient_dim_ < 1) throw DomainError("ambient dimension must be positive");
    build();
}

RationalCone::RationalCone(Eigen::Index ambient_dim, const std::vector<VectorZ>& ray_list)
    : RationalCone(ambient_dim, [&] {
          std::vector<VectorQ> rational;
          rational.reserve(ray_list.size());
          for (const VectorZ& ray : ray_list) rational.push_back(to_rational(ray));
          return rational;
      }()) {}

void RationalCone::build() {
    projector_ = MatrixQ::Zero(ambient_dim_, ambient_dim_);
    positive_functional_ = VectorQ::Zero(ambient_dim_);
    if (rays_.empty()) return;

    // Greedy span basis from the rays themselves.
    std::vector<Eigen::Index> basis_indices;
    MatrixQ basis(ambient_dim_, 0);
    for (std::size_t i = 0; i < rays_.size(); ++i) {
        MatrixQ extended(ambient_dim_, basis.cols() + 1);
        extended << basis, to_rational(rays_[i]);
        if (rank_exact(extended) == extended.cols()) {
            basis = std::move(extended);
            basis_indices.push_back(static_cast<Eigen::Index>(i));
        }
    }
    span_dim_ = basis.cols();
    const Eigen::Index k = span_dim_;

    // coordinate_map sends ambient points of the span to span coordinates:
    // (B^T B)^{-1} B^T, exact because B has full column rank.
    MatrixQ gram = basis.transpose() * basis;
    Eigen::FullPivLU<MatrixQ> gram_lu(gram);
    gram_lu.setThreshold(Rat(0));
    MatrixQ coordinate_map = gram_lu.solve(MatrixQ(basis.transpose()));
    projector_ = basis * coordinate_map;

    std::vector<VectorQ> span_coords;
    span_coords.reserve(rays_.size());
    for (const VectorZ& ray : rays_) span_coords.push_back(coordinate_map * to_rational(ray));

    // Supporting normals in span coordinates: spanned by (k-1)-subsets of the
    // rays, kept when one orientation is nonnegative on every ray.
    std::set<VectorZ, LexLess> seen;
    std::vector<VectorQ> span_normals;
    if (k == 1) {
        int first_sign = span_coords[0](0) > 0 ? 1 : -1;
        for (const VectorQ& c : span_coords) {
            int sign = c(0) > 0 ? 1 : (c(0) < 0 ? -1 : 0);
            if (sign != first_sign) throw ValidationError("cone is not strongly convex");
        }
        span_normals.push_back(VectorQ::Constant(1, Rat(first_sign)));
    } else {
        const std::size_t n = rays_.size();
        std::vector<std::size_t> subset(static_cast<std::size_t>(k - 1));
        auto process = [&](const std::vector<std::size_t>& chosen) {
            MatrixQ rows(k - 1, k);
            for (Eigen::Index row = 0; row < k - 1; ++row) rows.row(row) = span_coords[chosen[row]].transpose();
            VectorQ normal = hyperplane_normal<Rat>(rows);
            if (normal.isZero()) return;
            bool has_pos = false;
            bool has_neg = false;
            for (const VectorQ& c : span_coords) {
                Rat value = normal.dot(c);
                if (value > 0) has_pos = true;
                if (value < 0) has_neg = true;
            }
            if (has_pos && has_neg) return;
            if (has_neg) normal = -normal;
            VectorZ key = primitive_ray(normal);
            if (seen.insert(key).second) span_normals.push_back(to_rational(key));
        };
        // Enumerate (k-1)-subsets of ray indices.
        std::vector<std::size_t> stack;
        auto recurse = [&](auto&& self, std::size_t start) -> void {
            if (stack.size() == static_cast<std::size_t>(k - 1)) {
                process(stack);
                return;
            }
            for (std::size_t i = start; i < n; ++i) {
                stack.push_back(i);
                self(self, i + 1);
                stack.pop_back();
            }
        };
        recurse(recurse, 0);
    }

    // Strong convexity certificate: the normal sum must be positive on every
    // ray; a cone containing a line admits no such functional.
    VectorQ normal_sum = VectorQ::Zero(k);
    for (const VectorQ& normal : span_normals) normal_sum += normal;
    for (const VectorQ& c : span_coords)
        if (normal_sum.dot(c) <= 0) throw ValidationError("cone is not strongly convex");

    normals_.clear();
    normals_.reserve(span_normals.size());
    for (const VectorQ& normal : span_normals) normals_.push_back(coordinate_map.transpose() * normal);
    positive_functional_ = coordinate_map.transpose() * normal_sum;
}

ConePosition RationalCone::position(const VectorQ& p) const {
    if (p.size() != ambient_dim_) throw DomainError("point has wrong dimension");
    if (p.isZero()) return ConePosition::RelativeInterior;
    if (rays_.empty()) return ConePosition::Outside;
    if (projector_ * p != p) return ConePosition::Outside;
    bool on_wall = false;
    for (const VectorQ& normal : normals_) {
        Rat value = normal.dot(p);
        if (value < 0) return ConePosition::Outside;
        if (value == 0) on_wall = true;
    }
    return on_wall ? ConePosition::Boundary : ConePosition::RelativeInterior;
}

std::vector<VectorZ> RationalCone::extreme_rays() const {
    if (rays_.size() <= 1) return rays_;
    std::vector<VectorZ> extreme;
    for (std::size_t i = 0; i < rays_.size(); ++i) {
        std::vector<VectorZ> others;
        for (std::size_t j = 0; j < rays_.size(); ++j)
            if (j != i) others.push_back(rays_[j]);
        bool redundant = false;
        try {
            redundant = RationalCone(ambient_dim_, others).contains(rays_[i]);
        } catch (const ValidationError&) {
            // Dropping the ray can only make the others non-pointed if the
            // original cone already was; unreachable for validated cones.
            redundant = false;
        }
        if (!redundant) extreme.push_back(rays_[i]);
    }
    return extreme;
}

std::vector<RationalCone> simplicial_subdivision(const RationalCone& cone) {
    if (cone.is_simplicial() || cone.dim() == 0) return {cone};
    std::vector<VectorZ> extreme = cone.extreme_rays();
    if (static_cast<Eigen::Index>(extreme.size()) == cone.dim())
        return {RationalCone(cone.ambient_dim(), extreme)};

    // Star triangulation from the first extreme ray over the facets that do
    // not contain it, recursing into each facet.
    const VectorZ& apex = extreme.front();
    std::set<std::vector<std::size_t>> facet_sets;
    for (const VectorQ& normal : cone.supporting_normals()) {
        std::vector<std::size_t> on_wall;
        for (std::size_t i = 0; i < extreme.size(); ++i)
            if (normal.dot(to_rational(extreme[i])) == 0) on_wall.push_back(i);
        if (on_wall.empty() || on_wall.front() == 0) continue;
        MatrixQ rows(static_cast<Eigen::Index>(on_wall.size()), cone.ambient_dim());
        for (std::size_t row = 0; row < on_wall.size(); ++row)
            rows.row(static_cast<Eigen::Index>(row)) = to_rational(extreme[on_wall[row]]).transpose();
        if (rank_exact(MatrixQ(rows.transpose())) != cone.dim() - 1) continue;
        facet_sets.insert(on_wall);
    }

    std::vector<RationalCone> pieces;
    for (const std::vector<std::size_t>& facet : facet_sets) {
        std::vector<VectorZ> facet_rays;
        for (std::size_t index : facet) facet_rays.push_back(extreme[index]);
        for (const RationalCone& sub : simplicial_subdivision(RationalCone(cone.ambient_dim(), facet_rays))) {
            std::vector<VectorZ> piece_rays{apex};
            piece_rays.insert(piece_rays.end(), sub.rays().begin(), sub.rays().end());
            pieces.emplace_back(cone.ambient_dim(), piece_rays);
        }
    }
    return pieces;
}

std::optional<RationalCone> intersect_planar(const RationalCone& a, const RationalCone& b) {
    if (a.ambient_dim() != 2 || b.ambient_dim() != 2)
        throw DomainError("planar intersection requires ambient dimension 2");
    // Extreme rays of the intersection of two convex sectors are extreme rays
    // of one of them; collect the ones inside the other cone.
    std::vector<VectorZ> candidates;
    auto add = [&](const VectorZ& ray) {
        // Primitive representatives are canonical, so equality decides rays.
        for (const VectorZ& seen : candidates)
            if (seen == ray) return;
        candidates.push_back(ray);
    };
    for (const VectorZ& ray : a.rays())
        if (b.contains(ray)) add(ray);
    for (const VectorZ& ray : b.rays())
        if (a.contains(ray)) add(ray);
    if (candidates.empty()) return std::nullopt;
    return RationalCone(2, candidates);
}

FgMonoid::FgMonoid(Eigen::Index ambient_dim, std::vector<VectorZ> generator_list)
    : ambient_dim_(ambient_dim),
      generators_([&] {
          std::vector<VectorZ> deduped;
          for (VectorZ& g : generator_list) {
              if (g.size() != ambient_dim) throw DomainError("generator has wrong dimension");
              if (g.isZero()) throw ValidationError("monoid generators must be nonzero");
              bool duplicate = false;
              for (const VectorZ& seen : deduped)
                  if (seen == g) { duplicate = true; break; }
              if (!duplicate) deduped.push_back(std::move(g));
          }
          return deduped;
      }()),
      cone_(ambient_dim, generators_) {
    if (ambient_dim_ < 1) throw DomainError("ambient dimension must be positive");

    nonnegative_ = true;
    for (const VectorZ& g : generators_)
        for (Eigen::Index i = 0; i < ambient_dim_; ++i)
            if (g(i) < 0) nonnegative_ = false;

    if (static_cast<Eigen::Index>(generators_.size()) == ambient_dim_) {
        std::vector<bool> axis_seen(static_cast<std::size_t>(ambient_dim_), false);
        free_orthant_ = true;
        for (const VectorZ& g : generators_) {
            Eigen::Index axis = -1;
            for (Eigen::Index i = 0; i < ambient_dim_; ++i) {
                if (g(i) == 0) continue;
                if (g(i) != 1 || axis >= 0) { axis = -2; break; }
                axis = i;
            }
            if (axis < 0 || axis_seen[static_cast<std::size_t>(axis)]) { free_orthant_ = false; break; }
            axis_seen[static_cast<std::size_t>(axis)] = true;
        }
    }

    if (nonnegative_ || generators_.empty()) {
        grading_ = VectorZ::Ones(ambient_dim_);
    } else {
        // Scale the cone's positive functional so every generator grades >= 1.
        const VectorQ& functional = cone_.positive_functional();
        Rat min_value;
        bool first = true;
        for (const VectorZ& g : generators_) {
            Rat value = functional.dot(to_rational(g));
            if (first || value < min_value) min_value = value;
            first = false;
        }
        VectorQ scaled = functional / min_value;
        Int denominator_lcm = 1;
        for (Eigen::Index i = 0; i < ambient_dim_; ++i)
            denominator_lcm = int_lcm(denominator_lcm, rat_den(scaled(i)));
        grading_ = VectorZ(ambient_dim_);
        for (Eigen::Index i = 0; i < ambient_dim_; ++i)
            grading_(i) = rat_num(scaled(i) * Rat(denominator_lcm));
    }
}

std::optional<std::vector<Int>> FgMonoid::membership_witness(const VectorZ& p) const {
    if (p.size() != ambient_dim_) throw DomainError("point has wrong dimension");
    std::vector<Int> witness(generators_.size(), Int(0));
    if (p.isZero()) return witness;
    if (generators_.empty()) return std::nullopt;
    if (nonnegative_)
        for (Eigen::Index i = 0; i < ambient_dim_; ++i)
            if (p(i) < 0) return std::nullopt;
    Int total = grade(p);
    if (total <= 0) return std::nullopt;

    if (free_orthant_) {
        for (std::size_t j = 0; j < generators_.size(); ++j) {
            for (Eigen::Index i = 0; i < ambient_dim_; ++i)
                if (generators_[j](i) == 1) witness[j] = p(i);
        }
        return witness;
    }

    // Simplicial fast path: independent generators give a unique candidate.
    MatrixQ g_matrix(ambient_dim_, static_cast<Eigen::Index>(generators_.size()));
    for (std::size_t j = 0; j < generators_.size(); ++j)
        g_matrix.col(static_cast<Eigen::Index>(j)) = to_rational(generators_[j]);
    if (rank_exact(g_matrix) == g_matrix.cols()) {
        std::optional<VectorQ> solution = solve_if_consistent(g_matrix, to_rational(p));
        if (!solution) return std::nullopt;
        for (Eigen::Index j = 0; j < solution->size(); ++j) {
            const Rat& coeff = (*solution)(j);
            if (coeff < 0 || rat_den(coeff) != 1) return std::nullopt;
            witness[static_cast<std::size_t>(j)] = rat_num(coeff);
        }
        return witness;
    }

    // General case: depth-first search over coefficient vectors, largest
    // grade first, pruning by the remaining grade and memoizing failures.
    std::vector<std::size_t> order(generators_.size());
    for (std::size_t j = 0; j < order.size(); ++j) order[j] = j;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        Int ga = grade(generators_[a]);
        Int gb = grade(generators_[b]);
        if (ga != gb) return ga > gb;
        return a < b;
    });

    std::set<std::pair<std::size_t, std::vector<Int>>> failed;
    auto key_of = [&](std::size_t index, const VectorZ& rest) {
        std::vector<Int> key(static_cast<std::size_t>(rest.size()));
        for (Eigen::Index i = 0; i < rest.size(); ++i) key[static_cast<std::size_t>(i)] = rest(i);
        return std::make_pair(index, std::move(key));
    };
    auto search = [&](auto&& self, std::size_t index, const VectorZ& rest) -> bool {
        if (rest.isZero()) return true;
        Int rest_grade = grade(rest);
        if (rest_grade <= 0) return false;
        if (index + 1 == order.size()) {
            const VectorZ& g = generators_[order[index]];
            Int step = grade(g);
            if (rest_grade % step != 0) return false;
            Int count = rest_grade / step;
            if (rest != (g * count).eval()) return false;
            witness[order[index]] = count;
            return true;
        }
        auto key = key_of(index, rest);
        if (failed.count(key)) return false;
        const VectorZ& g = generators_[order[index]];
        Int cap = rest_grade / grade(g);
        VectorZ reduced = rest;
        for (Int count = 0; count <= cap; ++count) {
            if (self(self, index + 1, reduced)) {
                witness[order[index]] = count;
                return true;
            }
            reduced -= g;
        }
        failed.insert(std::move(key));
        return false;
    };
    if (search(search, 0, p)) return witness;
    return std::nullopt;
}

namespace {

struct GradedLess {
    const FgMonoid* monoid;
    bool operator()(const VectorZ& a, const VectorZ& b) const {
        Int ga = monoid->grade(a);
        Int gb = monoid->grade(b);
        if (ga != gb) return ga < gb;
        return LexLess{}(a, b);
    }
};

}  // namespace

std::vector<VectorZ> FgMonoid::elements_with_grade_at_most(const Int& bound) const {
    std::vector<VectorZ> elements;
    if (bound < 0) return elements;
    std::set<VectorZ, LexLess> visited;
    std::vector<VectorZ> frontier{VectorZ::Zero(ambient_dim_)};
    visited.insert(frontier.front());
    while (!frontier.empty()) {
        VectorZ current = std::move(frontier.back());
        frontier.pop_back();
        for (const VectorZ& g : generators_) {
            VectorZ next = current + g;
            if (grade(next) > bound) continue;
            if (visited.insert(next).second) frontier.push_back(std::move(next));
        }
    }
    elements.assign(visited.begin(), visited.end());
    std::sort(elements.begin(), elements.end(), GradedLess{this});
    return elements;
}

std::vector<VectorZ> FgMonoid::elements_in_box(const Int& bound) const {
    if (!nonnegative_) throw DomainError("box enumeration requires nonnegative generators");
    std::vector<VectorZ> elements;
    if (bound < 0) return elements;
    std::set<VectorZ, LexLess> visited;
    std::vector<VectorZ> frontier{VectorZ::Zero(ambient_dim_)};
    visited.insert(frontier.front());
    while (!frontier.empty()) {
        VectorZ current = std::move(frontier.back());
        frontier.pop_back();
        for (const VectorZ& g : generators_) {
            VectorZ next = current + g;
            bool in_box = true;
            for (Eigen::Index i = 0; i < ambient_dim_ && in_box; ++i)
                if (next(i) > bound) in_box = false;
            if (!in_box) continue;
            if (visited.insert(next).second) frontier.push_back(std::move(next));
        }
    }
    elements.assign(visited.begin(), visited.end());
    std::sort(elements.begin(), elements.end(), GradedLess{this});
    return elements;
}

namespace {

/** 2x2 integer inverse for determinant ±1. */
MatrixZ unimodular_inverse(const MatrixZ& m) {
    Int det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    MatrixZ inv(2, 2);
    inv << m(1, 1), -m(0, 1), -m(1, 0), m(0, 0);
    if (det == -1) inv = -inv;
    return inv;
}

/**
 * Hilbert basis of cone<(1,0),(p,q)> ∩ Z^2 with q >= 1, gcd(p,q)=1: the
 * candidates (ceil(kp/q), k) for k=1..q reduce to record minima of
 * r_k = (-kp) mod q, plus (1,0).  Complete: any other cone point exceeds a
 * candidate by (1,0) or by (p,q).
 */
std::vector<VectorZ> planar_halfopen_basis(const Int& p, const Int& q) {
    std::vector<VectorZ> basis{make_point({1, 0})};
    Int best = q;
    for (Int k = 1; k <= q; ++k) {
        Int r = ((-k * p) % q + q) % q;
        if (r < best) {
            best = r;
            VectorZ h(2);
            h(0) = (k * p + r) / q;
            h(1) = k;
            basis.push_back(std::move(h));
        }
    }
    return basis;
}

/** Hilbert basis of C ∩ Z^2 for a planar cone, via a unimodular change. */
std::vector<VectorZ> planar_lattice_basis(const RationalCone& cone) {
    if (cone.dim() == 0) return {};
    if (cone.dim() == 1) return {cone.extreme_rays().front()};
    // The listed rays may contain redundant interior ones; the change of
    // coordinates must be anchored at the two extreme rays.
    const std::vector<VectorZ> extreme = cone.extreme_rays();
    const VectorZ& u = extreme[0];
    const VectorZ& v = extreme[1];
    Int a = u(0), b = u(1);
    // Extended gcd: s*a + t*b = 1 (u is primitive).
    Int old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
    while (r != 0) {
        Int quotient = old_r / r;
        Int next_r = old_r - quotient * r;
        Int next_s = old_s - quotient * s;
        Int next_t = old_t - quotient * t;
        old_r = r; r = next_r;
        old_s = s; s = next_s;
        old_t = t; t = next_t;
    }
    if (old_r < 0) { old_s = -old_s; old_t = -old_t; }
    MatrixZ transform(2, 2);
    transform << old_s, old_t, -b, a;
    VectorZ image = transform * v;
    if (image(1) < 0) {
        transform.row(1) = -transform.row(1);
        image(1) = -image(1);
    }
    MatrixZ back = unimodular_inverse(transform);
    std::vector<VectorZ> basis;
    for (const VectorZ& h : planar_halfopen_basis(image(0), image(1)))
        basis.push_back(back * h);
    return basis;
}

std::vector<VectorZ> sorted_basis(const FgMonoid& monoid, std::vector<VectorZ> basis) {
    std::sort(basis.begin(), basis.end(), [&](const VectorZ& x, const VectorZ& y) {
        Int gx = monoid.grade(x);
        Int gy = monoid.grade(y);
        if (gx != gy) return gx < gy;
        return LexLess{}(x, y);
    });
    return basis;
}

/** Minimality reduction of candidates listed in increasing grade. */
std::vector<VectorZ> reduce_candidates(const std::vector<VectorZ>& candidates,
                                       const std::set<VectorZ, LexLess>& monoid_elements,
                                       const RationalCone& cone) {
    std::vector<VectorZ> basis;
    for (const VectorZ& p : candidates) {
        if (p.isZero()) continue;
        bool reducible = false;
        for (const VectorZ& h : basis) {
            VectorZ rest = p - h;
            if (rest.isZero()) continue;
            if (!monoid_elements.count(rest)) continue;
            if (!cone.contains(rest)) continue;
            reducible = true;
            break;
        }
        if (!reducible) basis.push_back(p);
    }
    return basis;
}

}  // namespace

FgMonoid hilbert_basis_intersection(const FgMonoid& monoid, const RationalCone& cone,
                                    const Int& coordinate_bound) {
    if (monoid.ambient_dim() != cone.ambient_dim()) throw DomainError("dimension mismatch");
    if (coordinate_bound < 1) throw DomainError("coordinate bound must be positive");
    const Eigen::Index r = monoid.ambient_dim();

    // Diagonal monoids <k_i e_i> reduce to the free orthant by scaling.
    if (!monoid.is_free_orthant() && static_cast<Eigen::Index>(monoid.generators().size()) == r) {
        VectorZ scale = VectorZ::Zero(r);
        bool diagonal = true;
        for (const VectorZ& g : monoid.generators()) {
            Eigen::Index axis = -1;
            for (Eigen::Index i = 0; i < r && diagonal; ++i) {
                if (g(i) == 0) continue;
                if (g(i) < 0 || axis >= 0) diagonal = false;
                axis = i;
            }
            if (!diagonal || axis < 0 || scale(axis) != 0) { diagonal = false; break; }
            scale(axis) = g(axis);
        }
        if (diagonal) {
            std::vector<VectorZ> unit_rays;
            for (Eigen::Index i = 0; i < r; ++i) unit_rays.push_back(VectorZ::Unit(r, i));
            std::vector<VectorQ> scaled_rays;
            for (const VectorZ& ray : cone.rays()) {
                VectorQ scaled(r);
                for (Eigen::Index i = 0; i < r; ++i) scaled(i) = Rat(ray(i), scale(i));
                scaled_rays.push_back(std::move(scaled));
            }
            FgMonoid free(r, unit_rays);
            FgMonoid reduced = hilbert_basis_intersection(free, RationalCone(r, scaled_rays), coordinate_bound);
            std::vector<VectorZ> mapped;
            for (const VectorZ& h : reduced.generators()) {
                VectorZ image(r);
                for (Eigen::Index i = 0; i < r; ++i) image(i) = h(i) * scale(i);
                mapped.push_back(std::move(image));
            }
            return FgMonoid(r, sorted_basis(monoid, std::move(mapped)));
        }
    }

    // Planar case: clip to the monoid's cone first.
    const RationalCone* effective = &cone;
    std::optional<RationalCone> clipped;
    if (r == 2) {
        clipped = intersect_planar(cone, monoid.associated_cone());
        if (!clipped) return FgMonoid(r, {});
        effective = &*clipped;

        // When the monoid is all lattice points of its cone — the free
        // orthant, or a unimodular generator pair — the closed form applies.
        bool saturated = monoid.is_free_orthant();
        if (!saturated && monoid.generators().size() == 2) {
            const VectorZ& g0 = monoid.generators()[0];
            const VectorZ& g1 = monoid.generators()[1];
            Int det = g0(0) * g1(1) - g0(1) * g1(0);
            saturated = (det == 1 || det == -1);
        }
        if (saturated)
            return FgMonoid(r, sorted_basis(monoid, planar_lattice_basis(*effective)));
    }

    if (effective->dim() == 0) return FgMonoid(r, {});

    // Free orthant with the cone inside it: candidates live in the union of
    // the zonotopes of the simplicial pieces, a provably complete box.
    bool cone_nonnegative = true;
    for (const VectorZ& ray : effective->rays())
        for (Eigen::Index i = 0; i < r; ++i)
            if (ray(i) < 0) cone_nonnegative = false;
    if (monoid.is_free_orthant() && cone_nonnegative) {
        VectorZ box = VectorZ::Zero(r);
        for (const RationalCone& piece : simplicial_subdivision(*effective)) {
            VectorZ corner = VectorZ::Zero(r);
            for (const VectorZ& ray : piece.rays()) corner += ray;
            for (Eigen::Index i = 0; i < r; ++i) box(i) = std::max(box(i), corner(i));
        }
        for (Eigen::Index i = 0; i < r; ++i)
            if (box(i) > coordinate_bound)
                throw EnumerationError("Hilbert candidate box " + box(i).str() +
                                       " exceeds coordinate bound " + coordinate_bound.str());
        std::set<VectorZ, LexLess> lattice;
        std::vector<VectorZ> candidates;
        VectorZ point = VectorZ::Zero(r);
        auto enumerate = [&](auto&& self, Eigen::Index axis) -> void {
            if (axis == r) {
                lattice.insert(point);
                if (effective->contains(point)) candidates.push_back(point);
                return;
            }
            for (point(axis) = 0; point(axis) <= box(axis); ++point(axis)) self(self, axis + 1);
            point(axis) = 0;
        };
        enumerate(enumerate, 0);
        std::sort(candidates.begin(), candidates.end(), GradedLess{&monoid});
        return FgMonoid(r, sorted_basis(monoid, reduce_candidates(candidates, lattice, *effective)));
    }

    // General fallback: graded (or boxed) enumeration plus a stability
    // margin; an irreducible in the upper half of the range means the bound
    // cannot certify completeness even heuristically.
    std::vector<VectorZ> elements = monoid.has_nonnegative_generators()
                                        ? monoid.elements_in_box(coordinate_bound)
                                        : monoid.elements_with_grade_at_most(coordinate_bound);
    std::set<VectorZ, LexLess> element_set(elements.begin(), elements.end());
    std::vector<VectorZ> candidates;
    for (const VectorZ& p : elements)
        if (!p.isZero() && effective->contains(p)) candidates.push_back(p);
    std::vector<VectorZ> basis = reduce_candidates(candidates, element_set, *effective);

    Int half = coordinate_bound / 2;
    for (const VectorZ& h : basis) {
        bool in_upper_half = false;
        if (monoid.has_nonnegative_generators()) {
            for (Eigen::Index i = 0; i < r; ++i)
                if (h(i) > half) in_upper_half = true;
        } else {
            in_upper_half = monoid.grade(h) > half;
        }
        if (in_upper_half)
            throw EnumerationError("Hilbert basis not stable within coordinate bound " +
                                   coordinate_bound.str());
    }
    return FgMonoid(r, sorted_basis(monoid, std::move(basis)));
}

FgMonoid truncate(const FgMonoid& monoid, const std::vector<Int>& factors) {
    if (factors.size() != monoid.generators().size())
        throw DomainError("one truncation factor per generator required");
    std::vector<VectorZ> scaled;
    scaled.reserve(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (factors[i] <= 0) throw DomainError("truncation factors must be positive");
        scaled.push_back(monoid.generators()[i] * factors[i]);
    }
    return FgMonoid(monoid.ambient_dim(), std::move(scaled));
}

}  // namespace bdiv
