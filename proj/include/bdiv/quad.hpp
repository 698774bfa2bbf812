#pragma once

/**
 * Exact arithmetic in real multiquadratic extensions of Q.
 *
 * A QuadNum is a finite sum  sum_m  c_m * sqrt(m)  over squarefree radicands
 * m >= 1, with rational coefficients; radicand 1 carries the rational part.
 * Square roots of distinct squarefree positive integers are linearly
 * independent over Q, so the representation is unique: zero testing is
 * coefficient testing, and every nonzero value has a sign computable by
 * interval refinement that provably terminates.
 *
 * The span is closed under multiplication: sqrt(d) * sqrt(e) = g * sqrt(d1*e1)
 * where d = g*d1, e = g*e1, g = gcd(d, e), and d1*e1 is squarefree whenever
 * d and e are.  Division is intentionally absent; callers phrase comparison
 * questions multiplicatively (cross-multiplied, squared) instead.
 */

#include "bdiv/rational.hpp"

#include <iosfwd>
#include <map>
#include <string>

namespace bdiv {

/** Certified rational enclosure lo <= value <= hi. */
struct Enclosure {
    Rat lo;
    Rat hi;
    Rat width() const { return hi - lo; }
};

class QuadNum {
public:
    QuadNum() = default;
    QuadNum(const Int& value) { if (value != 0) terms_[1] = Rat(value); }
    QuadNum(const Rat& value) { if (value != 0) terms_[1] = value; }
    QuadNum(long value) : QuadNum(Int(value)) {}

    /** sqrt(d) for d >= 0, with the square part of d absorbed rationally. */
    static QuadNum sqrt_of(const Int& d);

    /** Parse descriptors like "1", "-3/4", "sqrt(2)", "1/2 + 3/5*sqrt(7)". */
    static QuadNum parse(const std::string& text);

    bool is_zero() const { return terms_.empty(); }
    bool is_rational() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == 1); }
    Rat rational_part() const;

    /** Unique representation: radicand -> nonzero rational coefficient. */
    const std::map<Int, Rat>& terms() const { return terms_; }

    QuadNum operator-() const;
    QuadNum& operator+=(const QuadNum& o);
    QuadNum& operator-=(const QuadNum& o);
    QuadNum& operator*=(const QuadNum& o);

    friend QuadNum operator+(QuadNum a, const QuadNum& b) { return a += b; }
    friend QuadNum operator-(QuadNum a, const QuadNum& b) { return a -= b; }
    friend QuadNum operator*(QuadNum a, const QuadNum& b) { return a *= b; }

    QuadNum pow(unsigned exponent) const;

    bool operator==(const QuadNum& o) const { return terms_ == o.terms_; }
    bool operator!=(const QuadNum& o) const { return !(*this == o); }

    /** Exact sign in {-1, 0, +1}. */
    int sign() const;

    bool operator<(const QuadNum& o) const { return (*this - o).sign() < 0; }
    bool operator>(const QuadNum& o) const { return (*this - o).sign() > 0; }
    bool operator<=(const QuadNum& o) const { return (*this - o).sign() <= 0; }
    bool operator>=(const QuadNum& o) const { return (*this - o).sign() >= 0; }

    QuadNum abs() const { return sign() < 0 ? -*this : *this; }

    Int floor() const;
    Int ceil() const;
    /** Nearest integer; exact rational halves round down. */
    Int nearest() const;

    /** Certified enclosure of width at most 2^-bits. */
    Enclosure enclose(unsigned bits) const;

    /** Decimal rendering of the midpoint of a tight enclosure (reporting only). */
    std::string decimal(unsigned digits) const;

    std::string to_string() const;

private:
    void add_term(const Int& radicand, const Rat& coeff);

    std::map<Int, Rat> terms_;
};

std::ostream& operator<<(std::ostream& os, const QuadNum& x);

using VectorA = Eigen::Matrix<QuadNum, Eigen::Dynamic, 1>;
using MatrixA = Eigen::Matrix<QuadNum, Eigen::Dynamic, Eigen::Dynamic>;

/** d = f^2 * m with m squarefree: returns {f, m}.  Trial division. */
std::pair<Int, Int> squarefree_split(const Int& d);

/** Truncated integer square root. */
inline Int isqrt(const Int& n) { return boost::multiprecision::sqrt(n); }

}  // namespace bdiv

namespace Eigen {

template <>
struct NumTraits<bdiv::QuadNum> : GenericNumTraits<bdiv::QuadNum> {
    typedef bdiv::QuadNum Real;
    typedef bdiv::QuadNum NonInteger;
    typedef bdiv::QuadNum Nested;
    enum {
        IsComplex = 0,
        IsInteger = 0,
        IsSigned = 1,
        RequireInitialization = 1,
        ReadCost = 8,
        AddCost = 60,
        MulCost = 120,
    };
    static inline Real epsilon() { return Real(); }
    static inline Real dummy_precision() { return Real(); }
    static inline int digits10() { return 0; }
};

}  // namespace Eigen
