#pragma once

/**
 * Exact combinatorics of finitely generated submonoids of Z^r and strongly
 * convex rational polyhedral cones: membership with witnesses, positions
 * relative to cones, simplicial subdivision, truncations, and minimal
 * generating sets (Hilbert bases) of monoid-cone intersections.
 *
 * Everything here is exact: cones carry primitive integer ray representatives,
 * positions are decided by signs of rational functionals, and enumeration
 * bounds are explicit parameters whose violation is a reported failure
 * (EnumerationError), never silent truncation.
 */

#include "bdiv/rational.hpp"

#include <optional>
#include <vector>

namespace bdiv {

enum class ConePosition { Outside, Boundary, RelativeInterior };

/**
 * Strongly convex rational polyhedral cone, represented by generators.
 * Construction normalizes rays to primitive integer vectors, drops duplicates
 * of the same ray, and certifies strong convexity by exhibiting a rational
 * functional positive on every ray; a cone containing a line is rejected.
 */
class RationalCone {
public:
    RationalCone(Eigen::Index ambient_dim, const std::vector<VectorQ>& ray_list);
    RationalCone(Eigen::Index ambient_dim, const std::vector<VectorZ>& ray_list);

    Eigen::Index ambient_dim() const { return ambient_dim_; }
    /** Primitive integer representatives, duplicates removed, input order. */
    const std::vector<VectorZ>& rays() const { return rays_; }
    /** Dimension of the linear span. */
    Eigen::Index dim() const { return span_dim_; }
    bool is_simplicial() const { return static_cast<Eigen::Index>(rays_.size()) == span_dim_; }

    /** Rays not generated by the remaining ones. */
    std::vector<VectorZ> extreme_rays() const;

    ConePosition position(const VectorQ& p) const;
    ConePosition position(const VectorZ& p) const { return position(to_rational(p)); }
    bool contains(const VectorQ& p) const { return position(p) != ConePosition::Outside; }
    bool contains(const VectorZ& p) const { return contains(to_rational(p)); }

    /**
     * Inward normals of the supporting hyperplanes cutting the cone out of
     * its span; empty only for the zero-dimensional cone.
     */
    const std::vector<VectorQ>& supporting_normals() const { return normals_; }

    /** A rational functional strictly positive on every nonzero cone point. */
    const VectorQ& positive_functional() const { return positive_functional_; }

private:
    void build();

    Eigen::Index ambient_dim_;
    std::vector<VectorZ> rays_;
    Eigen::Index span_dim_ = 0;
    MatrixQ projector_;               // exact orthogonal projector onto the span
    std::vector<VectorQ> normals_;    // ambient representatives, inward
    VectorQ positive_functional_;
};

/**
 * Star triangulation from the first extreme ray; pieces are simplicial,
 * cover the cone, and meet in common faces.  Deterministic: faces are
 * processed in lexicographic order of their ray index sets.
 */
std::vector<RationalCone> simplicial_subdivision(const RationalCone& cone);

/** Intersection of two cones in the plane; nullopt when it is the origin. */
std::optional<RationalCone> intersect_planar(const RationalCone& a, const RationalCone& b);

/**
 * Finitely generated submonoid of Z^r whose associated cone is strongly
 * convex.  Construction derives an integer grading w with w·g >= 1 on every
 * generator; the grading bounds every enumeration and membership search.
 */
class FgMonoid {
public:
    FgMonoid(Eigen::Index ambient_dim, std::vector<VectorZ> generator_list);

    Eigen::Index ambient_dim() const { return ambient_dim_; }
    const std::vector<VectorZ>& generators() const { return generators_; }
    const RationalCone& associated_cone() const { return cone_; }
    /** Integer functional with grading·g >= 1 for every generator g. */
    const VectorZ& grading() const { return grading_; }
    Int grade(const VectorZ& p) const { return grading_.dot(p); }

    /** True iff the generators are exactly the r unit vectors. */
    bool is_free_orthant() const { return free_orthant_; }
    bool has_nonnegative_generators() const { return nonnegative_; }

    /** Nonnegative integer coefficients expressing p, when p lies in the monoid. */
    std::optional<std::vector<Int>> membership_witness(const VectorZ& p) const;
    bool contains(const VectorZ& p) const { return membership_witness(p).has_value(); }

    /** All monoid elements with grading value <= bound, 0 included, sorted by grade. */
    std::vector<VectorZ> elements_with_grade_at_most(const Int& bound) const;

    /** All elements inside [0, bound]^r; requires nonnegative generators. */
    std::vector<VectorZ> elements_in_box(const Int& bound) const;

private:
    Eigen::Index ambient_dim_;
    std::vector<VectorZ> generators_;
    RationalCone cone_;
    VectorZ grading_;
    bool free_orthant_ = false;
    bool nonnegative_ = false;
};

/**
 * Minimal generating set of the monoid S ∩ C.  Uses a provably complete
 * closed form in the plane and a zonotope-bounded enumeration when S is the
 * free orthant; otherwise falls back to graded enumeration up to
 * coordinate_bound and insists on a stability margin (no irreducible in the
 * upper half of the range) — violations raise EnumerationError.
 */
FgMonoid hilbert_basis_intersection(const FgMonoid& monoid, const RationalCone& cone,
                                    const Int& coordinate_bound = Int(64));

/** Truncation: replaces each generator e_i by factor_i * e_i. */
FgMonoid truncate(const FgMonoid& monoid, const std::vector<Int>& factors);

}  // namespace bdiv
