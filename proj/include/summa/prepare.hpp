#pragma once

// Normal-form preparation. Writing v for the polynomial jet made of the
// x-slices u_0(t), ..., u_ell(t) of the solution and substituting
// u = v + x w turns the model equation into one of the same class for w,
//
//   t dw/dt = A(x) t + B(x) w + x^{k+1} c(x) dw/dx + nonlinear(t, w, x dw/dx),
//
// with B = b + x^k c, val A >= k, and every nonlinear derivative factor
// rotated to x dw/dx. The rewrite is mechanical: collect
//
//   H(t,x,W,Z) = a t + b (v + x W) + x^{k+1} c (v' + W + Z)
//                + R(t, x, v + x W, v' + W + Z) - t dv/dt,
//
// where W stands for w, Z for x dw/dx and v' for dv/dx, so that the w
// equation reads x t dw/dt = H. Because v matches the solution through
// x^ell, H is divisible by x, and the coefficients of G = H/x are the
// prepared equation data. The recorded jet replays the inverse rewrite
// u = v + x w on any solution of the prepared equation.
//
// Divisibility of H by x needs every w-dependent slot coefficient and the
// equation residual of v to vanish at x = 0. A plain derivative factor
// contributes a bare w whose slot coefficient carries
// a_{i,j,alpha}(0) (v_0)^j (v_1)^{alpha-1}, and the same product guards
// the one reader of the residual that looks past the jet. It dies either
// because the coupling coefficient vanishes at the origin (condition (F))
// or because the leading jet slice v_0 does (j >= 1 under condition (F')).
// v_0 is the x^0 slice of the solution, which vanishes exactly when the
// forcing a does at x = 0; prepare requires that whenever a plain
// derivative coupling survives there, and rejects otherwise.

#include <map>
#include <string>
#include <vector>

#include <summa/equation.hpp>
#include <summa/formal.hpp>
#include <summa/transforms.hpp>

namespace summa {

template <class C>
struct PreparedEquation {
    EquationSpec<C> eq;         // normal form with rotated derivative factors
    Series<C> v;                // absorbed polynomial jet, vars (t, x)
    TransformRecord<C> record;  // replays u = v + x w
    bool transformed = false;   // false when the input was already normal
};

namespace detail {

// Verifiably val_x(s) >= want on the certified window.
template <class C>
bool x_valuation_at_least(const Series<C>& s, int want) {
    using ops = coeff_ops<C>;
    if (want <= 0) return true;
    if (!s.has_var("x")) {
        if (s.nvars() == 0) return ops::is_zero(s.at(std::vector<int>{}));
        return s.known_zero() && s.fully_exact();
    }
    if (!s.exact("x") && s.bound("x") < want - 1) return false;  // cannot verify
    for (int m = 0; m <= std::min(want - 1, s.bound("x")); ++m)
        if (!ops::is_zero(s.at({{"x", m}}))) return false;
    return true;
}

}  // namespace detail

template <class C>
PreparedEquation<C> prepare_normal_form(const EquationSpec<C>& input, int ell = -1) {
    validate_spec(input);
    using ops = coeff_ops<C>;
    using S = Series<C>;
    const int k = input.k;

    ConditionReport rep = check_conditions(input);
    if (rep.resonance)
        throw PreconditionError("resonance: b(0) in N*; preparation needs a non-resonant instance");
    if (!rep.condition_F && !rep.condition_F_prime) {
        std::string which;
        for (const auto& [i, j, alpha] : rep.offending_terms)
            which += " (" + std::to_string(i) + "," + std::to_string(j) + "," +
                     std::to_string(alpha) + ")";
        throw PreconditionError(
            "condition (F') violated: derivative terms with nonzero constant coefficient "
            "and no compensating forcing valuation block preparation; offending indices:" + which);
    }

    if (ell < 0) ell = k;
    if (ell < k)
        throw ArgumentError("prepare: the absorbed jet must reach at least x^" +
                            std::to_string(k));

    // A plain derivative coupling that survives at x = 0 forces the x^0
    // slice of the solution to vanish (see the header note); that slice is
    // driven by the forcing's value at the origin.
    if (!rep.condition_F && !input.nonlinear_xdx && !detail::x_valuation_at_least(input.a, 1))
        throw PreconditionError(
            "prepare: a derivative coupling keeps a nonzero coefficient at x = 0, so the "
            "forcing must vanish there; the solution's x^0 slice is otherwise nonzero and "
            "the substitution leaves the model class");

    const int Nt = input.trunc_t;
    const int Nx = input.trunc_x;
    if (Nx < ell)
        throw ArgumentError("prepare: the x truncation window must reach the jet order x^" +
                            std::to_string(ell));

    // The jet v: x-slices 0..ell of the formal solution.
    EquationSpec<C> jet_eq = input;
    jet_eq.trunc_x = ell;
    FormalSolution<C> jet_sol = solve_formal(jet_eq);
    S v({"t", "x"}, {Nt, ell});
    for (int n = 1; n <= Nt; ++n)
        for (int m = 0; m <= ell; ++m) {
            const C& c = jet_sol.series.at({{"t", n}, {"x", m}});
            if (!ops::is_zero(c)) v.set({{"t", n}, {"x", m}}, c);
        }
    // v is the polynomial we chose: exact by definition.

    TransformRecord<C> rec;
    rec.kind = TransformKind::prepare;
    rec.data = v;
    rec.level = k;

    // Already normal: forcing valuations at least k and derivative factors
    // already rotated. Nothing to rewrite.
    bool normal = detail::x_valuation_at_least(input.a, k);
    bool any_alpha = false;
    for (const auto& term : input.nonlinear) {
        if (term.j == 0 && term.alpha == 0)
            normal = normal && detail::x_valuation_at_least(term.coeff, k);
        if (term.alpha > 0) any_alpha = true;
    }
    if (any_alpha && !input.nonlinear_xdx) normal = false;
    if (normal) {
        PreparedEquation<C> out{input, v, rec, false};
        return out;
    }

    // Collect H(t,x,W,Z) on the window needed to read G = H/x through x^Nx.
    const int NxH = Nx + 1;
    int jmax = 0, amax = 0;
    for (const auto& term : input.nonlinear) {
        jmax = std::max(jmax, term.j);
        amax = std::max(amax, term.alpha);
    }
    const int WB = std::max(jmax, 1);
    const int ZB = std::max(amax, 1);

    auto clip = [&](S s) {
        if (s.has_var("t") && s.bound("t") > Nt) s = s.truncated("t", Nt);
        if (s.has_var("x") && s.bound("x") > NxH) s = s.truncated("x", NxH);
        return s;
    };

    S tmono = S::monomial({"t"}, {1}, {{"t", 1}}, ops::one());
    S xmono = S::monomial({"x"}, {1}, {{"x", 1}}, ops::one());
    S wslot = S::monomial({"W"}, {WB}, {{"W", 1}}, ops::one());
    S zslot = S::monomial({"Z"}, {ZB}, {{"Z", 1}}, ops::one());

    S bigu = clip(v + xmono * wslot);                 // u = v + x w
    S slope = clip(v.derive("x") + wslot + zslot);    // du/dx = v' + w + x dw/dx
    S dfac = input.nonlinear_xdx ? clip(xmono * slope) : slope;

    S acc = clip(input.a * tmono);
    acc = clip(acc + input.b * bigu);
    acc = clip(acc + input.c.shift_up("x", k + 1) * slope);
    acc = clip(acc - v.derive("t").shift_up("t", 1));

    std::vector<S> upow{S::constant(ops::one()), bigu};
    for (int j = 2; j <= jmax; ++j) upow.push_back(clip(upow.back() * bigu));
    std::vector<S> dpow{S::constant(ops::one()), dfac};
    for (int r = 2; r <= amax; ++r) dpow.push_back(clip(dpow.back() * dfac));

    for (const auto& term : input.nonlinear) {
        S f = S::constant(ops::one());
        if (term.j > 0) f = clip(f * upow[static_cast<std::size_t>(term.j)]);
        if (term.alpha > 0) f = clip(f * dpow[static_cast<std::size_t>(term.alpha)]);
        f = clip(f * term.coeff);
        if (term.i > 0) {
            if (!f.has_var("t")) f = f.lift("t", 0);
            f = clip(f.shift_up("t", term.i));
        }
        acc = clip(acc + f);
    }

    for (const auto& missing : {"t", "x", "W", "Z"})
        if (!acc.has_var(missing))
            acc = acc.lift(missing, 0);

    if (!acc.slice("x", 0).known_zero())
        throw std::logic_error("prepare: the collected right-hand side is not divisible by x");
    S g = acc.shift_down("x", 1);

    auto read = [&](int i, int p, int r) { return g.slice("t", i).slice("W", p).slice("Z", r); };

    if (!read(0, 0, 0).known_zero())
        throw std::logic_error("prepare: constant slot of the prepared data is nonzero");

    S b_new = input.b + input.c.shift_up("x", k);
    if (!S::equal_on_common(read(0, 1, 0), b_new))
        throw std::logic_error("prepare: the linear w slot disagrees with b + x^k c");
    if (!S::equal_on_common(read(0, 0, 1), input.c.shift_up("x", k)))
        throw std::logic_error("prepare: the rotated derivative slot disagrees with x^k c");

    S a_new = read(1, 0, 0);
    if (!detail::x_valuation_at_least(a_new, k))
        throw std::logic_error("prepare: the forcing slot has x valuation below k");

    // Mixed products such as (x w) dw/dx reach w degree j + alpha, so the
    // collection walks the full slot box of g, not the input degrees.
    std::vector<NonlinearTerm<C>> terms;
    for (int i = 0; i <= Nt; ++i)
        for (int p = 0; p <= g.bound("W"); ++p)
            for (int r = 0; r <= g.bound("Z"); ++r) {
                if (i + p + r < 2) continue;
                S cf = read(i, p, r);
                if (cf.known_zero()) continue;
                if (p == 0 && r == 0 && !detail::x_valuation_at_least(cf, k))
                    throw std::logic_error("prepare: a pure forcing slot has x valuation below k");
                NonlinearTerm<C> term;
                term.i = i;
                term.j = p;
                term.alpha = r;
                term.coeff = cf;
                terms.push_back(std::move(term));
            }

    EquationSpec<C> prepared = input;
    prepared.a = a_new;
    prepared.b = b_new;
    prepared.c = input.c;
    prepared.nonlinear = std::move(terms);
    prepared.nonlinear_xdx = true;
    validate_spec(prepared);

    PreparedEquation<C> out{prepared, v, rec, true};
    return out;
}

}  // namespace summa
