#pragma once

// JSON (de)serialization for series and equation specs, the compact
// polynomial-string coefficient format, and CSV grid emission.
//
// Series JSON: {"vars":[...], "trunc":[...], "mode":"exact"|"float",
// "coeffs":[[exponents...],[re,im], ...]} where the coeffs array alternates
// exponent tuples with coefficient pairs; exact coefficients are rational
// strings "p/q", float ones are numbers. Equation specs: {"k", "a", "b",
// "c", "nonlinear":[{"i","j","alpha","coeff"}], "trunc":[Nt,Nx], "mode"}
// where each coefficient series is a polynomial string, a coefficient
// list, or a full series object.

#include "summa/equation.hpp"
#include "summa/series.hpp"
#include "summa/singular.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

namespace summa {

using nlohmann::json;

inline std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ---- coefficient scalars ---------------------------------------------------

inline std::string cq_to_string(const CQ& z) {
    if (z.im == 0) return rat_to_string(z.re);
    std::string out = rat_to_string(z.re);
    if (z.im > 0) out += "+";
    return out + rat_to_string(z.im) + "i";
}

inline Rat json_to_rat(const json& j) {
    if (j.is_string()) return parse_rational(j.get<std::string>());
    if (j.is_number_integer()) return Rat(Int(j.get<long long>()));
    if (j.is_number_float()) return parse_rational(json(j.get<double>()).dump());
    throw ArgumentError("expected a rational literal, got " + j.dump());
}

inline CQ json_to_cq(const json& j) {
    if (j.is_string()) return parse_cq(j.get<std::string>());
    return CQ(json_to_rat(j));
}

inline CD json_to_cd(const json& j) {
    if (j.is_number()) return CD(j.get<double>(), 0.0);
    if (j.is_string()) return to_cd(parse_cq(j.get<std::string>()));
    throw ArgumentError("expected a numeric literal, got " + j.dump());
}

// ---- polynomial strings ----------------------------------------------------

// Parses "x^2+3x", "1/2x^2-1", "2", "-x", "3i", "0.5x^3" into an exact
// series in the given variable.
inline SeriesQ parse_polynomial(const std::string& text, const Var& var = "x") {
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(ch);
    if (s.empty()) throw ArgumentError("empty polynomial literal");

    std::vector<std::string> terms;
    std::size_t start = 0;
    for (std::size_t i = 1; i < s.size(); ++i) {
        char prev = s[i - 1];
        if ((s[i] == '+' || s[i] == '-') && prev != 'e' && prev != 'E' && prev != '/' &&
            prev != '*' && prev != '^' && prev != '+' && prev != '-') {
            terms.push_back(s.substr(start, i - start));
            start = i;
        }
    }
    terms.push_back(s.substr(start));

    std::map<int, CQ> coeff;
    int top = 0;
    for (auto& term : terms) {
        auto pos = term.find(var);
        if (pos == std::string::npos) {
            coeff[0] += parse_cq(term);
            continue;
        }
        std::string pre = term.substr(0, pos);
        std::string post = term.substr(pos + var.size());
        int expo = 1;
        if (!post.empty()) {
            if (post[0] != '^') throw ArgumentError("malformed term '" + term + "'");
            try {
                expo = std::stoi(post.substr(1));
            } catch (const std::exception&) {
                throw ArgumentError("malformed exponent in '" + term + "'");
            }
            if (expo < 0) throw ArgumentError("negative exponent in '" + term + "'");
        }
        CQ c(1);
        if (!pre.empty() && pre.back() == '*') pre.pop_back();
        if (pre == "-") c = CQ(-1);
        else if (!pre.empty() && pre != "+") c = parse_cq(pre);
        coeff[expo] += c;
        top = std::max(top, expo);
    }

    SeriesQ out({var}, {top});
    for (auto& [e, c] : coeff)
        if (!coeff_ops<CQ>::is_zero(c)) out.set(std::vector<int>{e}, c);
    return out;
}

// ---- series <-> JSON -------------------------------------------------------

inline json series_to_json(const SeriesQ& s) {
    json j;
    j["vars"] = s.vars();
    std::vector<int> trunc;
    for (auto& v : s.vars()) trunc.push_back(s.bound(v));
    j["trunc"] = trunc;
    j["mode"] = "exact";
    json coeffs = json::array();
    s.for_each_nonzero([&](const std::vector<int>& e, const CQ& c) {
        coeffs.push_back(e);
        coeffs.push_back(json::array({rat_to_string(c.re), rat_to_string(c.im)}));
    });
    j["coeffs"] = coeffs;
    return j;
}

inline json series_to_json(const SeriesD& s) {
    json j;
    j["vars"] = s.vars();
    std::vector<int> trunc;
    for (auto& v : s.vars()) trunc.push_back(s.bound(v));
    j["trunc"] = trunc;
    j["mode"] = "float";
    json coeffs = json::array();
    s.for_each_nonzero([&](const std::vector<int>& e, const CD& c) {
        coeffs.push_back(e);
        coeffs.push_back(json::array({c.real(), c.imag()}));
    });
    j["coeffs"] = coeffs;
    return j;
}

namespace detail {

// Accepts both the alternating flat layout and nested [[e...],[re,im]]
// entries; calls fn(exps, re_json, im_json).
template <class Fn>
void walk_coeff_entries(const json& coeffs, Fn&& fn) {
    if (!coeffs.is_array()) throw ArgumentError("series coeffs must be an array");
    std::size_t i = 0;
    while (i < coeffs.size()) {
        const json& head = coeffs[i];
        if (!head.is_array()) throw ArgumentError("series coeffs entries must be arrays");
        bool nested = head.size() == 2 && head[0].is_array() && head[1].is_array();
        const json& exps = nested ? head[0] : head;
        const json& pair = nested ? head[1] : coeffs.at(i + 1);
        if (!pair.is_array() || pair.size() != 2)
            throw ArgumentError("series coefficient must be a [re,im] pair");
        fn(exps.get<std::vector<int>>(), pair[0], pair[1]);
        i += nested ? 1 : 2;
    }
}

}  // namespace detail

inline SeriesQ series_q_from_json(const json& j, const Var& default_var = "x") {
    if (j.is_string()) return parse_polynomial(j.get<std::string>(), default_var);
    if (j.is_number()) {
        SeriesQ s({default_var}, {0});
        CQ c = json_to_cq(j);
        if (!coeff_ops<CQ>::is_zero(c)) s.set(std::vector<int>{0}, c);
        return s;
    }
    if (j.is_array()) {  // coefficient list, index = exponent
        int top = j.empty() ? 0 : static_cast<int>(j.size()) - 1;
        SeriesQ s({default_var}, {top});
        for (std::size_t i = 0; i < j.size(); ++i) {
            CQ c = json_to_cq(j[i]);
            if (!coeff_ops<CQ>::is_zero(c)) s.set(std::vector<int>{static_cast<int>(i)}, c);
        }
        return s;
    }
    if (!j.is_object() || !j.contains("vars") || !j.contains("trunc") || !j.contains("coeffs"))
        throw ArgumentError("series JSON must be a string, list, or {vars,trunc,mode,coeffs}");
    auto vars = j.at("vars").get<std::vector<Var>>();
    auto trunc = j.at("trunc").get<std::vector<int>>();
    SeriesQ s(vars, trunc);
    detail::walk_coeff_entries(j.at("coeffs"), [&](const std::vector<int>& e, const json& re,
                                                   const json& im) {
        std::vector<std::pair<Var, int>> keyed;
        for (std::size_t i = 0; i < vars.size(); ++i) keyed.emplace_back(vars[i], e.at(i));
        std::vector<int> d(vars.size());
        for (auto& [v, ex] : keyed) d[s.var_index(v)] = ex;
        s.set(d, CQ(json_to_rat(re), json_to_rat(im)));
    });
    return s;
}

inline SeriesD series_d_from_json(const json& j, const Var& default_var = "x") {
    if (j.is_string() || j.is_number() || j.is_array())
        return series_q_from_json(j, default_var).to_float();
    if (!j.is_object() || !j.contains("vars") || !j.contains("trunc") || !j.contains("coeffs"))
        throw ArgumentError("series JSON must be a string, list, or {vars,trunc,mode,coeffs}");
    auto vars = j.at("vars").get<std::vector<Var>>();
    auto trunc = j.at("trunc").get<std::vector<int>>();
    SeriesD s(vars, trunc);
    detail::walk_coeff_entries(j.at("coeffs"), [&](const std::vector<int>& e, const json& re,
                                                   const json& im) {
        std::vector<int> d(vars.size());
        for (std::size_t i = 0; i < vars.size(); ++i) d[s.var_index(vars[i])] = e.at(i);
        double rr = re.is_string() ? to_double(parse_rational(re.get<std::string>()))
                                   : re.get<double>();
        double ii = im.is_string() ? to_double(parse_rational(im.get<std::string>()))
                                   : im.get<double>();
        s.set(d, CD(rr, ii));
    });
    return s;
}

// ---- equation specs --------------------------------------------------------

struct ParsedSpec {
    std::string mode = "exact";  // "exact" or "float"
    EquationSpecQ spec;          // always held exactly; convert for float runs

    EquationSpecD to_float() const { return spec_to_float(spec); }
};

inline ParsedSpec parse_spec(const json& j, bool allow_resonance = false) {
    if (!j.is_object()) throw ArgumentError("equation spec must be a JSON object");
    for (auto& [key, value] : j.items()) {
        (void)value;
        if (key != "k" && key != "a" && key != "b" && key != "c" && key != "nonlinear" &&
            key != "trunc" && key != "mode" && key != "nonlinear_xdx")
            throw ArgumentError("unknown spec field '" + key + "'");
    }
    for (const char* req : {"k", "a", "b", "c"})
        if (!j.contains(req)) throw ArgumentError(std::string("spec is missing '") + req + "'");

    ParsedSpec out;
    if (j.contains("mode")) {
        out.mode = j.at("mode").get<std::string>();
        if (out.mode != "exact" && out.mode != "float")
            throw ArgumentError("mode must be \"exact\" or \"float\"");
    }
    EquationSpecQ& eq = out.spec;
    if (!j.at("k").is_number_integer()) throw ArgumentError("k must be an integer");
    eq.k = j.at("k").get<int>();
    eq.a = series_q_from_json(j.at("a"));
    eq.b = series_q_from_json(j.at("b"));
    eq.c = series_q_from_json(j.at("c"));
    if (j.contains("trunc")) {
        auto t = j.at("trunc").get<std::vector<int>>();
        if (t.size() != 2) throw ArgumentError("trunc must be [Nt, Nx]");
        eq.trunc_t = t[0];
        eq.trunc_x = t[1];
    }
    if (j.contains("nonlinear")) {
        const json& nl = j.at("nonlinear");
        if (nl.is_array()) {
            for (auto& item : nl) {
                for (const char* req : {"i", "j", "alpha", "coeff"})
                    if (!item.contains(req))
                        throw ArgumentError(std::string("nonlinear term is missing '") + req + "'");
                eq.nonlinear.push_back({item.at("i").get<int>(), item.at("j").get<int>(),
                                        item.at("alpha").get<int>(),
                                        series_q_from_json(item.at("coeff"))});
            }
        } else if (nl.is_object()) {
            // convenience: {"i,j,alpha": coeff}
            for (auto& [key, value] : nl.items()) {
                int i = 0, jj = 0, al = 0;
                if (std::sscanf(key.c_str(), "%d,%d,%d", &i, &jj, &al) != 3)
                    throw ArgumentError("nonlinear key must be \"i,j,alpha\", got '" + key + "'");
                eq.nonlinear.push_back({i, jj, al, series_q_from_json(value)});
            }
        } else {
            throw ArgumentError("nonlinear must be an array or object");
        }
    }
    if (j.contains("nonlinear_xdx")) eq.nonlinear_xdx = j.at("nonlinear_xdx").get<bool>();
    eq.allow_resonance = allow_resonance;
    validate_spec(eq);
    return out;
}

inline json spec_to_json(const EquationSpecQ& eq, const std::string& mode = "exact") {
    json j;
    j["k"] = eq.k;
    j["a"] = series_to_json(eq.a);
    j["b"] = series_to_json(eq.b);
    j["c"] = series_to_json(eq.c);
    json nl = json::array();
    for (auto& term : eq.nonlinear) {
        json item;
        item["i"] = term.i;
        item["j"] = term.j;
        item["alpha"] = term.alpha;
        item["coeff"] = series_to_json(term.coeff);
        nl.push_back(item);
    }
    j["nonlinear"] = nl;
    j["trunc"] = {eq.trunc_t, eq.trunc_x};
    j["mode"] = mode;
    if (eq.nonlinear_xdx) j["nonlinear_xdx"] = true;
    return j;
}

// ---- singular geometry -----------------------------------------------------

namespace detail {

// A real integer point serializes as a JSON integer, a real point as a
// number, a complex one as an [re, im] pair.
inline json xi_entry(const CQ& z) {
    if (z.im == 0) {
        if (boost::multiprecision::denominator(z.re) == 1)
            return json(boost::multiprecision::numerator(z.re).convert_to<long long>());
        return json(to_double(z.re));
    }
    return json::array({to_double(z.re), to_double(z.im)});
}

inline json xi_entry(const CD& z) {
    if (z.imag() == 0.0) {
        double re = z.real();
        if (re == std::floor(re) && std::abs(re) < 9.0e15)
            return json(static_cast<long long>(re));
        return json(re);
    }
    return json::array({z.real(), z.imag()});
}

}  // namespace detail

template <class C>
json singular_to_json(const SingularData<C>& d) {
    json j;
    json xi = json::array();
    for (const auto& v : d.xi_points) xi.push_back(detail::xi_entry(v));
    j["xi"] = xi;
    j["directions_rad"] = d.directions;
    j["accumulation"] = d.accumulation;
    return j;
}

// ---- CSV grids -------------------------------------------------------------

struct GridRow {
    CD t;
    CD x;
    CD u;
    double residual = 0.0;
};

inline std::string csv_from_rows(const std::vector<GridRow>& rows) {
    std::string out = "t_re,t_im,x_re,x_im,u_re,u_im,residual\n";
    for (auto& r : rows) {
        out += fmt_g17(r.t.real()) + "," + fmt_g17(r.t.imag()) + ",";
        out += fmt_g17(r.x.real()) + "," + fmt_g17(r.x.imag()) + ",";
        out += fmt_g17(r.u.real()) + "," + fmt_g17(r.u.imag()) + ",";
        out += fmt_g17(r.residual) + "\n";
    }
    return out;
}

}  // namespace summa
