#pragma once

// Arbitrary-precision rational scalars and string conversions.

#include <boost/multiprecision/cpp_int.hpp>

#include <cctype>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace summa {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long long p, long long q = 1) {
    if (q == 0) throw std::domain_error("rational with zero denominator");
    return Rat(Int(p), Int(q));
}

inline double to_double(const Rat& r) { return static_cast<double>(r); }

inline Rat factorial_rat(int n) {
    if (n < 0) throw std::domain_error("factorial of negative integer");
    Int acc = 1;
    for (int i = 2; i <= n; ++i) acc *= i;
    return Rat(acc);
}

// Renders as "p/q" with q > 0, e.g. "2/1", "-3/4".
inline std::string rat_to_string(const Rat& r) {
    Int num = boost::multiprecision::numerator(r);
    Int den = boost::multiprecision::denominator(r);
    return num.str() + "/" + den.str();
}

// Accepts "p", "p/q", finite decimals such as "-1.25" or ".5", and
// scientific notation like "2.5e-3".
inline Rat parse_rational(const std::string& text) {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (s[0] == '+') s.erase(0, 1);
    if (s.empty()) throw std::invalid_argument("empty rational literal");

    auto epos = s.find_first_of("eE");
    if (epos != std::string::npos) {
        Rat mant = parse_rational(s.substr(0, epos));
        std::string et = s.substr(epos + 1);
        if (!et.empty() && et[0] == '+') et.erase(0, 1);
        if (et.empty()) throw std::invalid_argument("bad exponent in '" + text + "'");
        long long e = 0;
        try {
            e = std::stoll(et);
        } catch (const std::exception&) {
            throw std::invalid_argument("bad exponent in '" + text + "'");
        }
        Int pow = 1;
        for (long long i = 0; i < (e < 0 ? -e : e); ++i) pow *= 10;
        return e >= 0 ? Rat(mant * Rat(pow)) : Rat(mant / Rat(pow));
    }

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + text + "'");
        return Rat(num, den);
    }

    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(Int(s));

    std::string head = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool negative = !head.empty() && head[0] == '-';
    if (!head.empty() && (head[0] == '+' || head[0] == '-')) head.erase(0, 1);
    if (head.empty()) head = "0";
    for (char ch : head + frac)
        if (!std::isdigit(static_cast<unsigned char>(ch)))
            throw std::invalid_argument("bad rational literal '" + text + "'");
    Int scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Int num = Int(head) * scale + (frac.empty() ? Int(0) : Int(frac));
    Rat value(num, scale);
    return negative ? Rat(-value) : value;
}

}  // namespace summa
