#pragma once

/**
 * Exact scalar types and small dense linear-algebra helpers shared across the
 * library.  Every certified computation runs on arbitrary-precision integers
 * and rationals (GMP via Boost.Multiprecision); floating point never enters a
 * decision path.  Eigen supplies the dense containers; scalar interop comes
 * from <boost/multiprecision/eigen.hpp>.
 */

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdiv {

using Int = boost::multiprecision::mpz_int;
using Rat = boost::multiprecision::mpq_rational;

using VectorZ = Eigen::Matrix<Int, Eigen::Dynamic, 1>;
using VectorQ = Eigen::Matrix<Rat, Eigen::Dynamic, 1>;
using MatrixZ = Eigen::Matrix<Int, Eigen::Dynamic, Eigen::Dynamic>;
using MatrixQ = Eigen::Matrix<Rat, Eigen::Dynamic, Eigen::Dynamic>;

/** Malformed textual input (rationals, expressions, documents). */
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Structurally valid input that violates a documented schema. */
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Violated type invariant (dimension mismatch, non-convex cone, ...). */
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/** A search or enumeration hit its configured cap; never silently truncated. */
class EnumerationError : public std::runtime_error {
public:
    explicit EnumerationError(const std::string& msg) : std::runtime_error(msg) {}
};

/** Evaluation requested outside a declared domain or degree bound. */
class DomainError : public std::runtime_error {
public:
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

/** A construction whose defining case split is not decidable (wall hits, ties). */
class DegeneracyError : public std::runtime_error {
public:
    explicit DegeneracyError(const std::string& msg) : std::runtime_error(msg) {}
};

inline Int rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

/** Largest integer <= r. */
inline Int rat_floor(const Rat& r)
{
    Int n = rat_num(r), d = rat_den(r);  // d > 0 in canonical form
    Int q = n / d;
    if (n % d != 0 && n < 0) --q;
    return q;
}

/** Smallest integer >= r. */
inline Int rat_ceil(const Rat& r)
{
    Int n = rat_num(r), d = rat_den(r);
    Int q = n / d;
    if (n % d != 0 && n > 0) ++q;
    return q;
}

/** Round to nearest integer; exact halves round down (documented convention). */
inline Int rat_nearest(const Rat& r)
{
    Int f = rat_floor(r);
    // frac > 1/2  <=>  2 (r - f) > 1
    return (2 * (r - Rat(f)) > 1) ? f + 1 : f;
}

inline Int int_gcd(const Int& a, const Int& b) { return boost::multiprecision::gcd(a, b); }
inline Int int_lcm(const Int& a, const Int& b) { return boost::multiprecision::lcm(a, b); }

/** Parse "p/q", "p" (optional sign, arbitrary precision).  Throws ParseError. */
Rat parse_rat(const std::string& text);

/** Canonical form: reduced, "p" when the denominator is 1, else "p/q". */
std::string format_rat(const Rat& r);

/** Lexicographic ordering for integer vectors, usable as a map comparator. */
struct LexLess {
    bool operator()(const VectorZ& a, const VectorZ& b) const
    {
        if (a.size() != b.size()) return a.size() < b.size();
        for (Eigen::Index i = 0; i < a.size(); ++i) {
            if (a(i) != b(i)) return a(i) < b(i);
        }
        return false;
    }
};

inline VectorZ make_point(std::initializer_list<long> coords)
{
    VectorZ p(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (long c : coords) p(i++) = c;
    return p;
}

inline VectorQ make_rational_point(std::initializer_list<Rat> coords)
{
    VectorQ p(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (const Rat& c : coords) p(i++) = c;
    return p;
}

inline VectorQ to_rational(const VectorZ& p)
{
    VectorQ q(p.size());
    for (Eigen::Index i = 0; i < p.size(); ++i) q(i) = Rat(p(i));
    return q;
}

/** Sum of coordinates (the grading used for degree bounds on N^r monoids). */
inline Int coordinate_sum(const VectorZ& p)
{
    Int s = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) s += p(i);
    return s;
}

/** Clear denominators and divide by the content: the primitive integer ray
 *  representative of a nonzero rational direction. */
VectorZ primitive_ray(const VectorQ& direction);

/** Divide an integer vector by the gcd of its entries (zero vector unchanged). */
VectorZ primitive_ray(const VectorZ& direction);

/** True when a = t b for some t > 0 (both nonzero). */
bool same_ray(const VectorQ& a, const VectorQ& b);

/** Determinant by cofactor expansion; works for any exact scalar including
 *  ones without division.  Intended for the small matrices that arise here. */
template <typename Scalar>
Scalar cofactor_determinant(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& m)
{
    const Eigen::Index n = m.rows();
    if (n != m.cols()) throw ValidationError("cofactor_determinant: matrix not square");
    if (n == 0) return Scalar(1);
    if (n == 1) return m(0, 0);
    if (n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    Scalar det = Scalar(0);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sub(n - 1, n - 1);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index r = 1; r < n; ++r) {
            Eigen::Index cc = 0;
            for (Eigen::Index c = 0; c < n; ++c) {
                if (c == j) continue;
                sub(r - 1, cc++) = m(r, c);
            }
        }
        Scalar term = m(0, j) * cofactor_determinant<Scalar>(sub);
        if (j % 2 == 0) det = det + term; else det = det - term;
    }
    return det;
}

/** Generalized cross product: given k-1 rows spanning a hyperplane of R^k,
 *  returns a nonzero normal via signed maximal minors (zero vector when the
 *  rows are dependent).  Division-free, so usable over algebraic scalars. */
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
hyperplane_normal(const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>& rows)
{
    const Eigen::Index k = rows.cols();
    if (rows.rows() != k - 1) throw ValidationError("hyperplane_normal: need k-1 rows in R^k");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> n(k);
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> sub(k - 1, k - 1);
    for (Eigen::Index j = 0; j < k; ++j) {
        for (Eigen::Index r = 0; r < k - 1; ++r) {
            Eigen::Index cc = 0;
            for (Eigen::Index c = 0; c < k; ++c) {
                if (c == j) continue;
                sub(r, cc++) = rows(r, c);
            }
        }
        Scalar minor = cofactor_determinant<Scalar>(sub);
        n(j) = (j % 2 == 0) ? minor : Scalar(0) - minor;
    }
    return n;
}

/** Solve A x = b exactly; throws ValidationError when inconsistent. */
VectorQ solve_exact(const MatrixQ& a, const VectorQ& b);

/** Exact rank of a rational matrix. */
Eigen::Index rank_exact(const MatrixQ& a);

}  // namespace bdiv
