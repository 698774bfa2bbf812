#include "bdiv/diophantine.hpp"

#include <algorithm>
#include <sstream>

namespace bdiv {

namespace {

constexpr unsigned kInitialCertificationBits = 16;
constexpr unsigned kMaxCertificationBits = 1u << 16;

Rat rat_pow(const Rat& base, Eigen::Index exponent)
{
    Rat out = 1;
    for (Eigen::Index i = 0; i < exponent; ++i) out *= base;
    return out;
}

}  // namespace

TargetPoint::TargetPoint(std::vector<QuadNum> coords) : coords_(std::move(coords))
{
    if (coords_.size() < 2)
        throw ValidationError("target point: need the leading 1 and at least one coordinate");
    if (!(coords_.front() == QuadNum(1)))
        throw ValidationError("target point: leading coordinate must be 1");
}

TargetPoint TargetPoint::parse(const std::vector<std::string>& descriptors)
{
    std::vector<QuadNum> coords;
    coords.reserve(descriptors.size());
    for (const auto& text : descriptors) coords.push_back(QuadNum::parse(text));
    return TargetPoint(std::move(coords));
}

bool TargetPoint::is_rational() const
{
    for (const auto& c : coords_) {
        if (!c.is_rational()) return false;
    }
    return true;
}

QuadNum nearest_integer_distance(const QuadNum& alpha)
{
    const QuadNum down = alpha - QuadNum(alpha.floor());
    const QuadNum up = QuadNum(alpha.ceil()) - alpha;
    return down <= up ? down : up;
}

Enclosure nearest_integer_distance(const QuadNum& alpha, unsigned bits)
{
    return nearest_integer_distance(alpha).enclose(bits);
}

Approximant find_approximant(const TargetPoint& x, const Int& q_max, const Int& q_min)
{
    if (q_max < 1) throw ValidationError("approximant search: q_max must be positive");
    const Eigen::Index r = x.r();

    // Side condition q^(1/r) > r, i.e. q > r^r: it forces the distance sum
    // below 1, which the convex relation and the walk both need.
    Int start = 1;
    for (Eigen::Index i = 0; i < r; ++i) start *= Int(r);
    start += 1;
    if (q_min > start) start = q_min;

    for (Int q = start; q <= q_max; ++q) {
        VectorZ p(r);
        std::vector<QuadNum> distances;
        distances.reserve(static_cast<std::size_t>(r));
        bool ok = true;
        for (Eigen::Index i = 1; i <= r; ++i) {
            const QuadNum scaled = x.coords()[static_cast<std::size_t>(i)] * QuadNum(q);
            const Int nearest = scaled.nearest();
            const QuadNum dist = (scaled - QuadNum(nearest)).abs();
            // strict inequality ‖qx_i‖ < q^(-1/r), cleared of roots: ‖qx_i‖^r q < 1
            if (!(dist.pow(static_cast<unsigned>(r)) * QuadNum(q) < QuadNum(1))) {
                ok = false;
                break;
            }
            p(i - 1) = nearest;
            distances.push_back(dist);
        }
        if (!ok) continue;

        // The exact test passed, so some finite enclosure width certifies the
        // strict inequality; find it, then re-check at doubled precision.
        Approximant found;
        found.q = q;
        found.p = p;
        for (unsigned bits = kInitialCertificationBits; bits <= kMaxCertificationBits; bits *= 2) {
            const auto certifies = [&](unsigned width_bits, std::vector<Enclosure>* out) {
                for (const auto& dist : distances) {
                    Enclosure e = dist.enclose(width_bits);
                    if (!(rat_pow(e.hi, r) * Rat(q) < 1)) return false;
                    if (out) out->push_back(e);
                }
                return true;
            };
            if (!certifies(bits, nullptr)) continue;
            std::vector<Enclosure> doubled;
            if (!certifies(2 * bits, &doubled))
                throw ValidationError("approximant: doubled-precision recheck failed");
            found.errors = std::move(doubled);
            found.certification_bits = bits;
            return found;
        }
        throw EnumerationError("approximant: enclosure certification exceeded the precision cap");
    }
    std::ostringstream msg;
    msg << "approximant: no q <= " << q_max << " satisfies the simultaneous inequality";
    throw EnumerationError(msg.str());
}

bool USystem::has_degenerate_coordinate() const
{
    return std::find(degenerate.begin(), degenerate.end(), true) != degenerate.end();
}

USystem build_u_system(const TargetPoint& x, const Approximant& a)
{
    const Eigen::Index r = x.r();
    if (a.p.size() != r) throw ValidationError("u-system: approximant dimension mismatch");
    if (a.q < 1) throw ValidationError("u-system: q must be positive");

    USystem sys;
    sys.q = a.q;
    sys.degenerate.assign(static_cast<std::size_t>(r), false);

    VectorZ u0(r + 1);
    u0(0) = a.q;
    for (Eigen::Index i = 0; i < r; ++i) u0(i + 1) = a.p(i);
    sys.u.assign(static_cast<std::size_t>(r) + 1, u0);

    std::vector<QuadNum> weights(static_cast<std::size_t>(r) + 1);
    QuadNum total(0);
    for (Eigen::Index i = 1; i <= r; ++i) {
        const QuadNum scaled = x.coords()[static_cast<std::size_t>(i)] * QuadNum(a.q);
        const QuadNum offset = scaled - QuadNum(a.p(i - 1));
        if (QuadNum(Rat(1, 2)) < offset.abs())
            throw ValidationError("u-system: p_i is not a nearest integer to q x_i");
        const int side = offset.sign();
        if (side == 0) {
            // q x_i is an exact integer: there is no other side to swap to.
            sys.degenerate[static_cast<std::size_t>(i - 1)] = true;
        } else {
            sys.u[static_cast<std::size_t>(i)](i) += (side > 0) ? 1 : -1;
            weights[static_cast<std::size_t>(i)] = offset.abs();
        }
        total += weights[static_cast<std::size_t>(i)];
    }
    if (!(total < QuadNum(1)))
        throw DomainError("u-system: nearest-integer distances sum to 1 or more");
    weights[0] = QuadNum(1) - total;

    // Exact convex relation (1 - Σ‖qx_i‖) u_0 + Σ ‖qx_i‖ u_i = q x.
    for (Eigen::Index c = 0; c <= r; ++c) {
        QuadNum lhs(0);
        for (Eigen::Index i = 0; i <= r; ++i)
            lhs += weights[static_cast<std::size_t>(i)] * QuadNum(sys.u[static_cast<std::size_t>(i)](c));
        const QuadNum rhs = x.coords()[static_cast<std::size_t>(c)] * QuadNum(a.q);
        if (!(lhs == rhs)) throw ValidationError("u-system: convex relation violated");
    }

    sys.weights = std::move(weights);
    sys.weight_enclosures.reserve(sys.weights.size());
    for (const auto& w : sys.weights) sys.weight_enclosures.push_back(w.enclose(64));
    return sys;
}

namespace {

/** Branch cone K_j = R+ (qx) + Σ_{k≠j} R+ u_k, with strict interior decided
 *  by agreement of all Cramer determinant signs (division-free). */
struct BranchCone {
    MatrixA columns;  // qx in column 0, then u_k for k != j
    int det_sign = 0;
};

BranchCone make_branch(const VectorA& target, const std::vector<VectorZ>& u, int j)
{
    const Eigen::Index dim = target.size();
    BranchCone branch;
    branch.columns.resize(dim, dim);
    branch.columns.col(0) = target;
    Eigen::Index cc = 1;
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (static_cast<int>(k) == j) continue;
        for (Eigen::Index row = 0; row < dim; ++row)
            branch.columns(row, cc) = QuadNum(u[k](row));
        ++cc;
    }
    branch.det_sign = cofactor_determinant<QuadNum>(branch.columns).sign();
    return branch;
}

bool strictly_inside(const BranchCone& branch, const VectorZ& v)
{
    const Eigen::Index dim = branch.columns.rows();
    MatrixA replaced = branch.columns;
    for (Eigen::Index c = 0; c < dim; ++c) {
        for (Eigen::Index row = 0; row < dim; ++row) replaced(row, c) = QuadNum(v(row));
        if (cofactor_determinant<QuadNum>(replaced).sign() != branch.det_sign) return false;
        replaced.col(c) = branch.columns.col(c);
    }
    return true;
}

/** Hyperplane through qx and all u_k except two; distances of the normalized
 *  states are compared through the linear form, whose chart gradient is
 *  constant, so monotonicity transfers exactly. */
struct Monitor {
    std::vector<QuadNum> form_at_u;  // the linear form at each u_k
    QuadNum form_at_v;
    int last_sign = 0;
};

}  // namespace

WalkReport walk(const USystem& sys, const TargetPoint& x, long steps,
                const std::optional<MonoidFunction>& f)
{
    const Eigen::Index r = x.r();
    const Eigen::Index dim = r + 1;
    if (static_cast<Eigen::Index>(sys.u.size()) != dim)
        throw ValidationError("walk: u-system dimension mismatch");
    if (steps < 1) throw ValidationError("walk: need at least one step");
    if (sys.has_degenerate_coordinate())
        throw DegeneracyError("walk: u-system has degenerate coordinates");
    if (f && f->domain().ambient_dim() != dim)
        throw ValidationError("walk: attached function dimension mismatch");

    VectorA target(dim);
    for (Eigen::Index c = 0; c < dim; ++c)
        target(c) = x.coords()[static_cast<std::size_t>(c)] * QuadNum(sys.q);

    std::vector<BranchCone> branches;
    branches.reserve(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
        branches.push_back(make_branch(target, sys.u, j));
        if (branches.back().det_sign == 0)
            throw ValidationError("walk: u-system vectors are linearly dependent");
    }

    // Initial state v_0 = Σ u_i.
    VectorZ v = VectorZ::Zero(dim);
    for (const auto& ui : sys.u) v += ui;
    std::vector<Int> tally(static_cast<std::size_t>(dim), Int(1));

    // Monitors: for every pair {i,k}, the hyperplane spanned by qx and the
    // remaining u's.  Its form vanishes on those u's by construction.
    std::vector<Monitor> monitors;
    for (int i = 0; i < dim; ++i) {
        for (int k = i + 1; k < dim; ++k) {
            MatrixA rows(dim - 1, dim);
            for (Eigen::Index c = 0; c < dim; ++c) rows(0, c) = target(c);
            Eigen::Index rr = 1;
            for (int j = 0; j < dim; ++j) {
                if (j == i || j == k) continue;
                for (Eigen::Index c = 0; c < dim; ++c) rows(rr, c) = QuadNum(sys.u[static_cast<std::size_t>(j)](c));
                ++rr;
            }
            VectorA normal = hyperplane_normal<QuadNum>(rows);
            Monitor mon;
            for (const auto& uk : sys.u) {
                QuadNum value(0);
                for (Eigen::Index c = 0; c < dim; ++c) value += normal(c) * QuadNum(uk(c));
                mon.form_at_u.push_back(value);
            }
            QuadNum at_v(0);
            for (Eigen::Index c = 0; c < dim; ++c) at_v += normal(c) * QuadNum(v(c));
            mon.form_at_v = at_v;
            mon.last_sign = at_v.sign();
            if (mon.last_sign == 0)
                throw DegeneracyError("walk: initial state lies on a monitor hyperplane");
            monitors.push_back(std::move(mon));
        }
    }

    WalkReport report;
    report.steps = steps;

    const auto distance_squared = [&](const VectorZ& state, long n) {
        const Int divisor = Int(n) + dim;
        QuadNum sum(0);
        for (Eigen::Index c = 1; c < dim; ++c) {
            QuadNum diff = QuadNum(state(c)) - QuadNum(divisor) * target(c);
            sum += diff * diff;
        }
        return sum * QuadNum(Rat(1, divisor * divisor));
    };

    long next_checkpoint = 1;
    long window_end = 1;  // current window is (window_end/2, window_end]
    QuadNum window_max(0);
    bool window_has_value = false;

    for (long n = 0; n < steps; ++n) {
        int chosen = -1;
        for (int j = 0; j < dim; ++j) {
            if (strictly_inside(branches[static_cast<std::size_t>(j)], v)) {
                if (chosen >= 0)
                    throw DegeneracyError("walk: state interior to two branch cones");
                chosen = j;
            }
        }
        if (chosen < 0) {
            std::ostringstream msg;
            msg << "walk: state on a branch wall at step " << n
                << " (expected for targets with rational dependencies)";
            throw DegeneracyError(msg.str());
        }

        for (auto& mon : monitors) {
            QuadNum next = mon.form_at_v + mon.form_at_u[static_cast<std::size_t>(chosen)];
            const int s = next.sign();
            if (s == 0) throw DegeneracyError("walk: state reached a monitor hyperplane");
            if (s == mon.last_sign) {
                // dist(w_{n+1}) < dist(w_n):  |φ(v_{n+1})| (n+dim) < |φ(v_n)| (n+1+dim)
                const QuadNum lhs = next.abs() * QuadNum(Int(n) + dim);
                const QuadNum rhs = mon.form_at_v.abs() * QuadNum(Int(n) + 1 + dim);
                if (!(lhs < rhs))
                    throw ValidationError("walk: monitor distance failed to decrease strictly");
            } else {
                ++report.wall_crossings;
            }
            mon.form_at_v = std::move(next);
            mon.last_sign = s;
        }

        if (f) {
            const VectorZ& step_vector = sys.u[static_cast<std::size_t>(chosen)];
            Rat defect = (*f)(VectorZ(v + step_vector)) - (*f)(v) - (*f)(step_vector);
            report.additivity_defects.push_back(std::move(defect));
        }

        v += sys.u[static_cast<std::size_t>(chosen)];
        ++tally[static_cast<std::size_t>(chosen)];
        if (!report.chosen_runs.empty() && report.chosen_runs.back().first == chosen)
            ++report.chosen_runs.back().second;
        else
            report.chosen_runs.emplace_back(chosen, 1);

        const long m = n + 1;
        const QuadNum d2 = distance_squared(v, m);

        if (m > window_end) {
            report.window_max_distance_squared.push_back(window_max);
            window_end *= 2;
            window_has_value = false;
        }
        if (!window_has_value || window_max < d2) {
            window_max = d2;
            window_has_value = true;
        }

        if (m == next_checkpoint || m == steps) {
            // Conservation self-check: v = Σ tally_i u_i exactly.
            VectorZ recon = VectorZ::Zero(dim);
            for (Eigen::Index i = 0; i < dim; ++i)
                recon += sys.u[static_cast<std::size_t>(i)] * tally[static_cast<std::size_t>(i)];
            if (recon != v) throw ValidationError("walk: tally conservation violated");
            report.checkpoints.push_back(WalkCheckpoint{m, v, tally, d2});
            while (next_checkpoint <= m) next_checkpoint *= 2;
        }
    }
    if (window_has_value && window_end <= steps)
        report.window_max_distance_squared.push_back(window_max);

    for (std::size_t k = 0; k + 1 < report.window_max_distance_squared.size(); ++k) {
        if (!(report.window_max_distance_squared[k + 1] < report.window_max_distance_squared[k])) {
            report.window_max_strictly_decreasing = false;
            break;
        }
    }
    return report;
}

}  // namespace bdiv
