#pragma once

// Coefficient field: exact complex rationals (CQ) and complex doubles (CD),
// unified behind coeff_ops so series code is generic over the mode.

#include "summa/rational.hpp"

#include <cctype>
#include <complex>
#include <cstdlib>
#include <sstream>
#include <string>

namespace summa {

using CD = std::complex<double>;

// Complex number with exact rational real and imaginary parts.
struct CQ {
    Rat re;
    Rat im;

    CQ() : re(0), im(0) {}
    CQ(Rat r) : re(std::move(r)), im(0) {}
    CQ(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}
    CQ(long long r) : re(r), im(0) {}

    friend CQ operator+(const CQ& a, const CQ& b) { return {a.re + b.re, a.im + b.im}; }
    friend CQ operator-(const CQ& a, const CQ& b) { return {a.re - b.re, a.im - b.im}; }
    friend CQ operator-(const CQ& a) { return {-a.re, -a.im}; }
    friend CQ operator*(const CQ& a, const CQ& b) {
        return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
    }
    friend CQ operator/(const CQ& a, const CQ& b) {
        Rat n2 = b.re * b.re + b.im * b.im;
        if (n2 == 0) throw std::domain_error("division by zero coefficient");
        return {(a.re * b.re + a.im * b.im) / n2, (a.im * b.re - a.re * b.im) / n2};
    }
    CQ& operator+=(const CQ& b) { re += b.re; im += b.im; return *this; }
    CQ& operator-=(const CQ& b) { re -= b.re; im -= b.im; return *this; }
    CQ& operator*=(const CQ& b) { *this = *this * b; return *this; }
    friend bool operator==(const CQ& a, const CQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const CQ& a, const CQ& b) { return !(a == b); }
};

inline CD to_cd(const CQ& z) { return CD(to_double(z.re), to_double(z.im)); }
inline CD to_cd(const CD& z) { return z; }

// Parses "a", "a+bi", "bi", "i", "-i" with rational or decimal parts.
inline CQ parse_cq(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty number literal");

    // Split at the last top-level '+' or '-' that is not a leading sign.
    auto term_of = [](const std::string& part) -> CQ {
        if (part == "i" || part == "+i") return CQ(Rat(0), Rat(1));
        if (part == "-i") return CQ(Rat(0), Rat(-1));
        if (!part.empty() && part.back() == 'i')
            return CQ(Rat(0), parse_rational(part.substr(0, part.size() - 1)));
        return CQ(parse_rational(part));
    };
    std::size_t split = std::string::npos;
    for (std::size_t idx = s.size(); idx-- > 1;) {
        if ((s[idx] == '+' || s[idx] == '-') && s[idx - 1] != '/' && s[idx - 1] != '+' &&
            s[idx - 1] != '-') {
            split = idx;
            break;
        }
    }
    if (split == std::string::npos) return term_of(s);
    CQ lhs = term_of(s.substr(0, split));
    std::string rest = s.substr(split);  // keeps the sign
    if (rest == "+" || rest == "-") throw std::invalid_argument("bad number literal '" + text + "'");
    return lhs + term_of(rest);
}

// Generic coefficient operations; specialized for CQ and CD.
template <class C>
struct coeff_ops;

template <>
struct coeff_ops<CQ> {
    static constexpr bool exact = true;
    static CQ zero() { return CQ(); }
    static CQ one() { return CQ(1); }
    static CQ from_int(long long n) { return CQ(n); }
    static CQ from_rat(const Rat& r) { return CQ(r); }
    static bool is_zero(const CQ& z) { return z.re == 0 && z.im == 0; }
    static std::string to_string(const CQ& z) {
        std::ostringstream out;
        out << rat_to_string(z.re);
        if (z.im != 0) out << (z.im > 0 ? "+" : "") << rat_to_string(z.im) << "i";
        return out.str();
    }
};

template <>
struct coeff_ops<CD> {
    static constexpr bool exact = false;
    static CD zero() { return CD(0.0, 0.0); }
    static CD one() { return CD(1.0, 0.0); }
    static CD from_int(long long n) { return CD(static_cast<double>(n), 0.0); }
    static CD from_rat(const Rat& r) { return CD(to_double(r), 0.0); }
    static bool is_zero(const CD& z) { return z.real() == 0.0 && z.imag() == 0.0; }
    static std::string to_string(const CD& z) {
        std::ostringstream out;
        out << z.real();
        if (z.imag() != 0.0) out << (z.imag() > 0 ? "+" : "") << z.imag() << "i";
        return out.str();
    }
};

}  // namespace summa
