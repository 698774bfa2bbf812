#pragma once

/**
 * Superadditive rational-valued functions on finitely generated monoids and
 * their straightenings: superadditivity checking, one-point additivity, ray
 * indices, positively homogeneous envelopes, Lipschitz constants, and
 * certified piecewise-linear decomposition (or explicit evidence against it).
 *
 * Function handles are cheap to copy and share a memo cache behind a mutex;
 * oracles must be pure, so caching is observationally invisible.
 */

#include "bdiv/lattice.hpp"

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

namespace bdiv {

/**
 * Deterministic rational-valued function on a monoid, evaluated through a
 * pure oracle with a declared grade bound.  Values are memoized.
 */
class MonoidFunction {
public:
    using Oracle = std::function<Rat(const VectorZ&)>;

    MonoidFunction(FgMonoid domain, Oracle oracle, Int declared_degree_bound);

    const FgMonoid& domain() const { return state_->domain; }
    const Int& declared_degree_bound() const { return state_->degree_bound; }

    /** Memoized evaluation; grade above the declared bound is a DomainError. */
    Rat operator()(const VectorZ& p) const;

private:
    struct State {
        State(FgMonoid d, Oracle o, Int bound)
            : domain(std::move(d)), oracle(std::move(o)), degree_bound(std::move(bound))
        {
        }
        FgMonoid domain;
        Oracle oracle;
        Int degree_bound;
        std::map<VectorZ, Rat, LexLess> memo;
        std::mutex mutex;
    };
    std::shared_ptr<State> state_;
};

/** f(s) = floor(coeffs · s). */
MonoidFunction floor_linear_function(FgMonoid domain, VectorQ coeffs, Int degree_bound);

/** f(s) = floor(min_i coeffs_i · s). */
MonoidFunction min_floor_linear_function(FgMonoid domain, std::vector<VectorQ> coeff_list,
                                         Int degree_bound);

/** Explicit value table; evaluation outside the table is a DomainError. */
MonoidFunction table_function(FgMonoid domain, std::map<VectorZ, Rat, LexLess> values,
                              Int degree_bound);

struct SuperadditivityReport {
    bool holds = true;
    std::optional<std::pair<VectorZ, VectorZ>> witness;
    Int pairs_checked = 0;
};

/**
 * Verifies f(x) + f(y) <= f(x+y) for every pair of monoid elements whose
 * combined grade stays within degree_bound; the witness is a violating pair.
 */
SuperadditivityReport check_superadditive(const MonoidFunction& f, const Int& degree_bound);

/**
 * One-point additivity hypothesis at s0 = sum s_i e_i with every s_i > 0:
 * f(s0) = sum s_i f(e_i) and f(k s0) = k f(s0) for k = 1..kappa_max.
 * A superadditive f passing this test is additive on the whole monoid.
 */
bool one_point_additivity(const MonoidFunction& f, const VectorZ& s0, const Int& kappa_max);

/**
 * Smallest lambda <= index_cap with f(mu lambda s) = mu f(lambda s) for all
 * mu up to confirmation_bound; EnumerationError when the cap is exhausted.
 * The scan is provably complete only when the caller supplies a cap that is
 * a true index bound (as the curve theory does); otherwise it is heuristic.
 */
Int compute_index(const MonoidFunction& f, const VectorZ& s, const Int& index_cap,
                  const Int& confirmation_bound = Int(20));

/**
 * Positively homogeneous superlinear envelope f#.  Either derived from a
 * discrete base function via per-ray indices, or given directly as an exact
 * homogeneous evaluator (for closed-form superlinear functions).
 */
class StraightenedFunction {
public:
    StraightenedFunction(MonoidFunction base, Int index_cap = Int(20),
                         Int confirmation_bound = Int(20));
    StraightenedFunction(FgMonoid domain, std::function<Rat(const VectorQ&)> homogeneous);

    const FgMonoid& domain() const;
    bool has_base() const { return state_->base.has_value(); }
    const MonoidFunction& base() const;
    const Int& index_cap() const { return state_->index_cap; }

    /** Memoized ray index of a monoid point. */
    Int index(const VectorZ& s) const;

    /** Exact value at a rational point of the domain cone. */
    Rat value(const VectorQ& s) const;
    Rat value(const VectorZ& s) const { return value(to_rational(s)); }

private:
    struct State {
        State(FgMonoid d, std::optional<MonoidFunction> b, std::function<Rat(const VectorQ&)> dir,
              Int cap, Int confirmation)
            : domain(std::move(d)),
              base(std::move(b)),
              direct(std::move(dir)),
              index_cap(std::move(cap)),
              confirmation_bound(std::move(confirmation))
        {
        }
        FgMonoid domain;
        std::optional<MonoidFunction> base;
        std::function<Rat(const VectorQ&)> direct;
        Int index_cap;
        Int confirmation_bound;
        std::map<VectorZ, Int, LexLess> index_table;
        std::mutex mutex;
    };
    std::shared_ptr<State> state_;
};

/** f#(s) = f(iota * kappa s) / (iota kappa) for the smallest usable kappa. */
Rat straighten(const MonoidFunction& f, const VectorQ& s, const Int& index_cap = Int(20));

/**
 * Certified Lipschitz constant L = 2M/delta on an max-norm ball interior to
 * the domain cone: M bounds |f#| on the doubled ball via corner values and
 * concavity, and sampled pairs are asserted against L exactly.
 */
Rat lipschitz_estimate(const StraightenedFunction& f, const VectorQ& center, const Rat& radius);

/** Linear piece with its self-validating additivity certificate. */
struct LinearPiece {
    RationalCone cone;
    VectorQ functional;
    FgMonoid basis;      // Hilbert basis of cone ∩ domain
    VectorZ witness;     // s0 = sum of the basis elements
};

struct PLDecomposition {
    std::vector<LinearPiece> pieces;
    RationalCone covered;
};

/** Sampled rays whose local chord functionals are pairwise distinct. */
struct NonPLEvidence {
    std::vector<VectorQ> rays;
    std::vector<VectorQ> functionals;
    Int samples = 0;
};

using PLDetectOutcome = std::variant<PLDecomposition, NonPLEvidence>;

/**
 * Attempts a certified piecewise-linear decomposition of f# over a cone
 * interior to the domain: simplicial subdivision, per-piece certification on
 * the Hilbert basis, and mediant splitting in the plane up to dyadic depth
 * ray_resolution.  On failure, samples 2^ray_resolution chords and reports
 * evidence when at least evidence_threshold distinct local functionals
 * appear; otherwise raises EnumerationError (inconclusive).
 */
PLDetectOutcome pl_detect(const StraightenedFunction& f, const RationalCone& cone,
                          int ray_resolution, int evidence_threshold = 10);

/**
 * The rank-2 superlinear, rational-valued, continuous function that is linear
 * on each wedge between consecutive dyadic-slope rays (1, 2^n) yet is not
 * piecewise linear on any cone containing their accumulation ray: the
 * standard counterexample once integrality of values is dropped.
 */
StraightenedFunction build_dyadic_staircase();

/** Wedge values of the staircase: value at (1/2^n, 1). */
Rat dyadic_staircase_ray_value(unsigned n);

}  // namespace bdiv
