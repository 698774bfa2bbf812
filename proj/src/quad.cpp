#include "bdiv/quad.hpp"

#include <ostream>
#include <sstream>
#include <utility>

namespace bdiv {

std::pair<Int, Int> squarefree_split(const Int& d) {
    if (d < 1) throw DomainError("squarefree_split requires a positive integer");
    Int square = 1;
    Int free = 1;
    Int n = d;
    for (Int p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
        unsigned count = 0;
        while (n % p == 0) {
            n /= p;
            ++count;
        }
        if (count >= 2) square *= boost::multiprecision::pow(p, count / 2);
        if (count % 2 == 1) free *= p;
    }
    if (n > 1) free *= n;
    return {square, free};
}

QuadNum QuadNum::sqrt_of(const Int& d) {
    if (d < 0) throw DomainError("square root of a negative integer");
    QuadNum result;
    if (d == 0) return result;
    auto [square, free] = squarefree_split(d);
    result.terms_[free] = Rat(square);
    return result;
}

Rat QuadNum::rational_part() const {
    auto it = terms_.find(Int(1));
    return it == terms_.end() ? Rat(0) : it->second;
}

void QuadNum::add_term(const Int& radicand, const Rat& coeff) {
    if (coeff == 0) return;
    auto it = terms_.find(radicand);
    if (it == terms_.end()) {
        terms_.emplace(radicand, coeff);
        return;
    }
    it->second += coeff;
    if (it->second == 0) terms_.erase(it);
}

QuadNum QuadNum::operator-() const {
    QuadNum result;
    for (const auto& [m, c] : terms_) result.terms_.emplace(m, -c);
    return result;
}

QuadNum& QuadNum::operator+=(const QuadNum& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
}

QuadNum& QuadNum::operator-=(const QuadNum& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
}

QuadNum& QuadNum::operator*=(const QuadNum& o) {
    // sqrt(d)*sqrt(e) = g*sqrt((d/g)(e/g)) with g = gcd(d, e); the product
    // radicand is squarefree because d/g and e/g are squarefree and coprime.
    QuadNum result;
    for (const auto& [d, a] : terms_) {
        for (const auto& [e, b] : o.terms_) {
            Int g = int_gcd(d, e);
            result.add_term((d / g) * (e / g), a * b * Rat(g));
        }
    }
    terms_ = std::move(result.terms_);
    return *this;
}

QuadNum QuadNum::pow(unsigned exponent) const {
    QuadNum result(Int(1));
    for (unsigned i = 0; i < exponent; ++i) result *= *this;
    return result;
}

int QuadNum::sign() const {
    if (terms_.empty()) return 0;
    if (terms_.size() == 1) {
        const Rat& c = terms_.begin()->second;
        return c > 0 ? 1 : -1;
    }
    if (terms_.size() == 2) {
        // a*sqrt(m) + b*sqrt(e): with opposite coefficient signs the value is
        // sign(a) * sign(a^2 m - b^2 e); equality is impossible for distinct
        // squarefree radicands.
        auto it = terms_.begin();
        const auto& [m, a] = *it;
        const auto& [e, b] = *std::next(it);
        int sa = a > 0 ? 1 : -1;
        int sb = b > 0 ? 1 : -1;
        if (sa == sb) return sa;
        Rat diff = a * a * Rat(m) - b * b * Rat(e);
        return sa * (diff > 0 ? 1 : -1);
    }
    for (unsigned bits = 16; bits <= (1u << 20); bits *= 2) {
        Enclosure box = enclose(bits);
        if (box.lo > 0) return 1;
        if (box.hi < 0) return -1;
    }
    throw DomainError("sign refinement exceeded the precision cap");
}

Enclosure QuadNum::enclose(unsigned bits) const {
    // Per-term sqrt enclosures of width 2^-p; total width sum(|c|) * 2^-p.
    Rat coeff_sum(0);
    for (const auto& [m, c] : terms_)
        if (m != 1) coeff_sum += boost::multiprecision::abs(c);
    unsigned p = bits;
    for (Rat s = coeff_sum; s > 1; s /= 2) ++p;

    Enclosure box{Rat(0), Rat(0)};
    Int scale = Int(1) << p;
    for (const auto& [m, c] : terms_) {
        if (m == 1) {
            box.lo += c;
            box.hi += c;
            continue;
        }
        Int root = isqrt(m * scale * scale);
        Rat lo(root, scale);
        Rat hi(root + 1, scale);
        if (c >= 0) {
            box.lo += c * lo;
            box.hi += c * hi;
        } else {
            box.lo += c * hi;
            box.hi += c * lo;
        }
    }
    return box;
}

Int QuadNum::floor() const {
    if (is_rational()) return rat_floor(rational_part());
    // Irrational values never sit on an integer, so refinement terminates.
    for (unsigned bits = 8;; bits *= 2) {
        Enclosure box = enclose(bits);
        Int lo = rat_floor(box.lo);
        if (lo == rat_floor(box.hi)) return lo;
    }
}

Int QuadNum::ceil() const {
    if (is_rational()) return rat_ceil(rational_part());
    return floor() + 1;
}

Int QuadNum::nearest() const {
    if (is_rational()) return rat_nearest(rational_part());
    return (*this + QuadNum(Rat(1, 2))).floor();
}

std::string QuadNum::decimal(unsigned digits) const {
    Enclosure box = enclose(4 * digits + 8);
    Rat mid = (box.lo + box.hi) / 2;
    Int pow10 = 1;
    for (unsigned i = 0; i < digits; ++i) pow10 *= 10;
    Int scaled = rat_nearest(mid * Rat(pow10));
    bool negative = scaled < 0;
    if (negative) scaled = -scaled;
    Int whole = scaled / pow10;
    Int frac = scaled % pow10;
    std::string frac_text = frac.str();
    frac_text.insert(0, digits - frac_text.size(), '0');
    std::string out = negative ? "-" : "";
    out += whole.str();
    if (digits > 0) out += "." + frac_text;
    return out;
}

std::string QuadNum::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        Rat mag = boost::multiprecision::abs(c);
        if (first) {
            if (c < 0) out += "-";
            first = false;
        } else {
            out += c < 0 ? " - " : " + ";
        }
        if (m == 1) {
            out += format_rat(mag);
        } else {
            if (mag != 1) out += format_rat(mag) + "*";
            out += "sqrt(" + m.str() + ")";
        }
    }
    return out;
}

std::ostream& operator<<(std::ostream& os, const QuadNum& x) { return os << x.to_string(); }

namespace {

/** Strips whitespace; the grammar has no tokens containing spaces. */
std::string strip_spaces(const std::string& text) {
    std::string out;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) out += ch;
    return out;
}

class DescriptorScanner {
public:
    explicit DescriptorScanner(std::string text) : text_(std::move(text)) {}

    QuadNum run() {
        QuadNum total = parse_term(parse_sign());
        while (pos_ < text_.size()) {
            char op = text_[pos_];
            if (op != '+' && op != '-') fail("expected '+' or '-'");
            ++pos_;
            QuadNum term = parse_term(op == '-' ? -1 : 1);
            total += term;
        }
        return total;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ParseError("bad number descriptor '" + text_ + "': " + why);
    }

    int parse_sign() {
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) {
            return text_[pos_++] == '-' ? -1 : 1;
        }
        return 1;
    }

    QuadNum parse_term(int sign) {
        if (starts_with_sqrt()) {
            QuadNum root = parse_radical();
            return sign < 0 ? -root : root;
        }
        Rat coeff = Rat(sign) * parse_rational();
        if (pos_ < text_.size() && text_[pos_] == '*') {
            ++pos_;
            if (!starts_with_sqrt()) fail("expected sqrt(...) after '*'");
            return QuadNum(coeff) * parse_radical();
        }
        return QuadNum(coeff);
    }

    bool starts_with_sqrt() const { return text_.compare(pos_, 5, "sqrt(") == 0; }

    QuadNum parse_radical() {
        pos_ += 5;
        std::size_t close = text_.find(')', pos_);
        if (close == std::string::npos) fail("unterminated sqrt(");
        std::string digits = text_.substr(pos_, close - pos_);
        if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
            fail("sqrt argument must be a nonnegative integer");
        pos_ = close + 1;
        return QuadNum::sqrt_of(Int(digits));
    }

    Rat parse_rational() {
        std::size_t end = pos_;
        while (end < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '/'))
            ++end;
        if (end == pos_) fail("expected a rational literal");
        Rat value = parse_rat(text_.substr(pos_, end - pos_));
        pos_ = end;
        return value;
    }

    std::string text_;
    std::size_t pos_ = 0;
};

}  // namespace

QuadNum QuadNum::parse(const std::string& text) {
    std::string stripped = strip_spaces(text);
    if (stripped.empty()) throw ParseError("empty number descriptor");
    return DescriptorScanner(stripped).run();
}

}  // namespace bdiv
