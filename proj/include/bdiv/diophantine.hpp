#pragma once

/**
 * Simultaneous Diophantine approximation over exactly represented targets:
 * nearest-integer distances, approximant search with certified enclosures,
 * the associated integer vector system with its convex relation, and the
 * rebalancing walk whose normalized states converge to the target ray.
 *
 * All decisions (approximant validity, walk branch selection, hyperplane
 * monitor monotonicity) are made by exact sign computations in the real
 * quadratic algebra; enclosures appear only in reports.
 */

#include "bdiv/quad.hpp"
#include "bdiv/superlinear.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace bdiv {

/**
 * Target x = (1, x_1, ..., x_r) with exactly represented coordinates; the
 * leading coordinate is fixed to 1.
 */
class TargetPoint {
public:
    explicit TargetPoint(std::vector<QuadNum> coords);

    /** Parse coordinate descriptors like "1", "3/4", "sqrt(2)", "1/2 + 3/5*sqrt(7)". */
    static TargetPoint parse(const std::vector<std::string>& descriptors);

    const std::vector<QuadNum>& coords() const { return coords_; }
    /** Number of approximated coordinates (excludes the leading 1). */
    Eigen::Index r() const { return static_cast<Eigen::Index>(coords_.size()) - 1; }
    bool is_rational() const;

private:
    std::vector<QuadNum> coords_;
};

/** Exact distance to the nearest integer: min(α − ⌊α⌋, ⌈α⌉ − α). */
QuadNum nearest_integer_distance(const QuadNum& alpha);

/** Certified enclosure of the nearest-integer distance, width ≤ 2^-bits. */
Enclosure nearest_integer_distance(const QuadNum& alpha, unsigned bits);

/**
 * Denominator q with ‖q x_i‖ < q^(-1/r) for every i, p the nearest integers.
 * The strict inequality is decided exactly; the stored enclosures certify it
 * again at certification_bits and at twice that width.
 */
struct Approximant {
    Int q;
    VectorZ p;
    std::vector<Enclosure> errors;
    unsigned certification_bits = 0;
};

/**
 * Smallest q in [max(q_min, r^r + 1), q_max] whose distances satisfy the
 * strict simultaneous inequality; EnumerationError when none exists below
 * the cap (the underlying theorem is existential and gives no bound).
 */
Approximant find_approximant(const TargetPoint& x, const Int& q_max, const Int& q_min = Int(1));

/**
 * The vectors u_0 = (q, p_1, ..., p_r) and u_i = u_0 with coordinate i
 * replaced by the nearest integer on the other side of q x_i, together with
 * the weights realizing the exact convex relation
 *     (1 - Σ‖qx_i‖) u_0 + Σ ‖qx_i‖ u_i = q x.
 * Coordinates where q x_i is an exact integer have no other side; they are
 * flagged degenerate, carry weight 0, and leave u_i := u_0.
 */
struct USystem {
    Int q;
    std::vector<VectorZ> u;                  // r+1 vectors in Z^(r+1)
    std::vector<QuadNum> weights;            // index 0: 1 - Σ‖qx_i‖; index i: ‖qx_i‖
    std::vector<Enclosure> weight_enclosures;
    std::vector<bool> degenerate;            // size r, per approximated coordinate
    bool has_degenerate_coordinate() const;
};

USystem build_u_system(const TargetPoint& x, const Approximant& a);

/** One walk step: v_{n+1} = v_n + u_{j_n}, j_n the unique strict-interior branch. */
struct WalkState {
    long n = 0;
    VectorZ v;
    int j = -1;
    std::optional<Rat> additivity_defect;  // e_n when a monoid function is attached
};

struct WalkCheckpoint {
    long n = 0;
    VectorZ v;
    std::vector<Int> tally;        // how often each u_i was used, initial v_0 included
    QuadNum distance_squared;      // ‖v/(n+r+1) − qx‖² exactly
};

struct WalkReport {
    long steps = 0;
    std::vector<WalkCheckpoint> checkpoints;          // n = 2^k and the final step
    std::vector<std::pair<int, long>> chosen_runs;    // run-length encoded j-sequence
    std::vector<QuadNum> window_max_distance_squared; // max over n in (2^(k-1), 2^k]
    bool window_max_strictly_decreasing = true;       // over the complete windows
    long wall_crossings = 0;                          // monitor sign changes
    std::vector<Rat> additivity_defects;              // e_n sequence when f attached
};

/**
 * Runs the walk for the given number of steps from v_0 = Σ u_i.  Every step
 * certifies that exactly one branch cone contains the state strictly inside
 * (DegeneracyError otherwise — forced for rational targets) and that the
 * distance to every monitor hyperplane through qx strictly decreases between
 * sign changes (ValidationError on violation).  When f is attached, logs
 * e_n = f(v_{n+1}) − f(v_n) − f(u_{j_n}).
 */
WalkReport walk(const USystem& u, const TargetPoint& x, long steps,
                const std::optional<MonoidFunction>& f = std::nullopt);

}  // namespace bdiv
