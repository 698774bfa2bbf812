#include "bdiv/rational.hpp"

#include <cctype>

namespace bdiv {

Rat parse_rat(const std::string& text)
{
    std::string s;
    for (char c : text) {
        if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
    }
    if (s.empty()) throw ParseError("empty rational literal");
    auto slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + text + "'");
        return Rat(num) / Rat(den);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("malformed rational literal '" + text + "'");
    }
}

std::string format_rat(const Rat& r)
{
    Int n = rat_num(r), d = rat_den(r);
    if (d == 1) return n.str();
    return n.str() + "/" + d.str();
}

VectorZ primitive_ray(const VectorQ& direction)
{
    Int lcm = 1;
    for (Eigen::Index i = 0; i < direction.size(); ++i) lcm = int_lcm(lcm, rat_den(direction(i)));
    VectorZ v(direction.size());
    for (Eigen::Index i = 0; i < direction.size(); ++i) v(i) = rat_num(direction(i)) * (lcm / rat_den(direction(i)));
    return primitive_ray(v);
}

VectorZ primitive_ray(const VectorZ& direction)
{
    Int g = 0;
    for (Eigen::Index i = 0; i < direction.size(); ++i) g = int_gcd(g, direction(i));
    if (g == 0 || g == 1) return direction;
    VectorZ v(direction.size());
    for (Eigen::Index i = 0; i < direction.size(); ++i) v(i) = direction(i) / g;
    return v;
}

bool same_ray(const VectorQ& a, const VectorQ& b)
{
    if (a.size() != b.size()) return false;
    if (a.isZero() || b.isZero()) return false;
    // a = t b, t > 0: cross-ratios vanish and matching signs on some coordinate.
    Eigen::Index pivot = -1;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
        if (b(i) != 0) { pivot = i; break; }
    }
    if (a(pivot) == 0) return false;
    Rat t = a(pivot) / b(pivot);
    if (t <= 0) return false;
    for (Eigen::Index i = 0; i < a.size(); ++i) {
        if (a(i) != t * b(i)) return false;
    }
    return true;
}

VectorQ solve_exact(const MatrixQ& a, const VectorQ& b)
{
    Eigen::FullPivLU<MatrixQ> lu(a);
    lu.setThreshold(Rat(0));
    VectorQ x = lu.solve(b);
    if (a * x != b) throw ValidationError("solve_exact: inconsistent linear system");
    return x;
}

Eigen::Index rank_exact(const MatrixQ& a)
{
    if (a.rows() == 0 || a.cols() == 0) return 0;
    Eigen::FullPivLU<MatrixQ> lu(a);
    // Exact scalars: a zero pivot is exactly zero, so Eigen's rank is exact
    // once the threshold is pinned to "nonzero".
    lu.setThreshold(Rat(0));
    return lu.rank();
}

}  // namespace bdiv
