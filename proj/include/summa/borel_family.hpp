#pragma once

// Borel-plane family of a formal solution: the level-k transforms of the
// t-slices, the per-order convolution equation they satisfy,
//
//   (n - b0 - k c0 zeta^k) u~_n = B * u~_n + C * (k zeta^k u~_n) + F_n,
//
// and its residual, which vanishes identically through the certified
// order whenever the family was built from an actual solution.  F_1 is
// the transform of the forcing; higher F_n collect the nonlinear slices
// through level-k convolutions of earlier members.
//
// Level-k objects live on the integer grid of the ramified variable
// (degree p stands for the plane power xi^{p/k}), so multiplication by
// xi is multiplication by zeta^k, and the image of x d/dx is the
// diagonal weight zeta^p -> (p + k) zeta^p.

#include "summa/anticipative.hpp"
#include "summa/convolution.hpp"
#include "summa/equation.hpp"
#include "summa/formal.hpp"

#include <string>
#include <vector>

namespace summa {

// A Borel-plane multiplier kept by its x-plane pre-image.  At level k the
// image of x^m is zeta^{m-k} / Gamma(m/k), which leaves the nonnegative
// exponent grid when m < k; the object therefore convolves against on-grid
// series through the product identity
//   transform(f) *_k g = transform(f . inverse_transform(g)),
// which stays on the grid whenever f has zero constant term.
template <class C>
struct BorelMultiplier {
    Series<C> source{std::vector<Var>{"x"}, std::vector<int>{0}};
    int k = 1;

    bool representable() const { return source.known_zero() || source.valuation("x") >= k; }
    Series<C> transformed(const Var& out = "xi") const {
        return borel_ramified_k(source, k, "x", out);
    }
};

template <class C>
Series<C> convolve_multiplier(const BorelMultiplier<C>& f, const Series<C>& g,
                              const Var& var = "xi") {
    Series<C> gx = borel_ramified_k_inverse(g, f.k, var, "x");
    return borel_ramified_k(f.source * gx, f.k, "x", var);
}

namespace detail {

// Image of x d/dx under the level-k transform: zeta^p -> (p + k) zeta^p.
template <class C>
Series<C> borel_xdx(const Series<C>& f, int k, const Var& var = "xi") {
    Series<C> out = f.scale(coeff_ops<C>::zero());
    int vi = f.var_index(var);
    f.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        out.add_at(e, c * coeff_ops<C>::from_int(e[vi] + k));
    });
    return out;
}

// Image of d/dx under the level-1 transform on valuation >= 2 pre-images:
// f -> d^2/dxi^2 (xi f).
template <class C>
Series<C> borel_dx(const Series<C>& f, const Var& var = "xi") {
    return f.shift_up(var, 1).derive(var).derive(var);
}

}  // namespace detail

template <class C>
struct BorelTermTransform {
    int i = 0;
    int j = 0;
    int alpha = 0;
    C constant{};               // coefficient value at x = 0 (the scalar slot)
    BorelMultiplier<C> mult;    // pre-image of coefficient minus that value
};

template <class C>
struct BorelFamily {
    int k = 1;
    C b0{};
    C c0{};
    std::vector<Series<C>> members;  // members[n-1] = u~_n, series in "xi"
    Series<C> forcing{std::vector<Var>{"xi"}, std::vector<int>{0}};  // transform of a
    BorelMultiplier<C> b_mult;       // pre-image of b - b(0)
    BorelMultiplier<C> c_mult;       // pre-image of c - c(0)
    std::vector<BorelTermTransform<C>> terms;
};

// Builds the family from a solved instance.  The equation must carry its
// derivative couplings in the x d/dx normal form, and every t-slice of the
// solution (hence the forcing and the pure t^i couplings) must vanish
// through x^{k-1} so the transforms land on the nonnegative grid.
template <class C>
BorelFamily<C> borel_coefficients(const FormalSolution<C>& sol, const EquationSpec<C>& eq) {
    using ops = coeff_ops<C>;
    validate_spec(eq);
    const int k = eq.k;

    for (const auto& term : eq.nonlinear)
        if (term.alpha > 0 && !eq.nonlinear_xdx)
            throw PreconditionError(
                "borel family: derivative couplings must be given in the x d/dx normal form");

    const Series<C>& u = sol.series;
    int xv = u.var_index("x");
    u.for_each_nonzero([&](const std::vector<int>& e, const C&) {
        if (e[xv] < k)
            throw PreconditionError(
                "borel family: the solution carries nonzero x-coefficients below x^" +
                std::to_string(k));
    });
    if (!(eq.a.known_zero() || eq.a.valuation("x") >= k))
        throw PreconditionError(
            "borel family: the forcing carries nonzero x-coefficients below x^" +
            std::to_string(k));

    BorelFamily<C> fam;
    fam.k = k;
    fam.b0 = eq.b0();
    fam.c0 = eq.c0();
    fam.forcing = borel_ramified_k(eq.a, k, "x", "xi");
    fam.b_mult = {eq.b - Series<C>::constant(fam.b0), k};
    fam.c_mult = {eq.c - Series<C>::constant(fam.c0), k};

    for (const auto& term : eq.nonlinear) {
        std::vector<int> origin(term.coeff.nvars(), 0);
        C at0 = term.coeff.nvars() ? term.coeff.at(origin)
                                   : term.coeff.at(std::vector<int>{});
        BorelTermTransform<C> tt;
        tt.i = term.i;
        tt.j = term.j;
        tt.alpha = term.alpha;
        tt.constant = at0;
        tt.mult = {term.coeff - Series<C>::constant(at0), k};
        if (term.j == 0 && term.alpha == 0) {
            // A pure t^i coupling enters F_i as its own transform, so it
            // must vanish at the origin and sit at valuation >= k.
            if (!ops::is_zero(at0) || !tt.mult.representable())
                throw PreconditionError(
                    "borel family: the pure coupling t^" + std::to_string(term.i) +
                    " carries nonzero x-coefficients below x^" + std::to_string(k));
        }
        fam.terms.push_back(std::move(tt));
    }

    for (int n = 1; n <= sol.order_t; ++n)
        fam.members.push_back(borel_ramified_k(u.slice("t", n), k, "x", "xi"));
    return fam;
}

// Right-hand side F_n of the per-order convolution equation, assembled
// mechanically from the nonlinear couplings: the t^n slice of
//   t^i [ A_{i,j,alpha} * P + a_{i,j,alpha}(0) P ],
//   P = u~^{*j} * (k d/dxi (xi u~))^{*alpha},
// summed over ordered compositions of n - i into j + alpha slice orders.
template <class C>
Series<C> convolution_forcing(const BorelFamily<C>& fam, int n) {
    using ops = coeff_ops<C>;
    if (n == 1) return fam.forcing;

    std::vector<Series<C>> dmem;
    for (int m = 0; m + 1 < n; ++m)
        dmem.push_back(detail::borel_xdx(fam.members[static_cast<std::size_t>(m)], fam.k));

    Series<C> F = Series<C>::constant(ops::zero());
    for (const auto& term : fam.terms) {
        const int parts = term.j + term.alpha;
        if (parts == 0) {
            if (term.i == n) F = F + term.mult.transformed();
            continue;
        }
        const int rem = n - term.i;
        if (rem < parts) continue;  // every slice factor starts at t^1

        Series<C> acc = Series<C>::constant(ops::zero());
        std::vector<int> comp(static_cast<std::size_t>(parts), 1);
        comp.back() = rem - (parts - 1);
        for (;;) {
            const auto factor = [&](int pos) -> const Series<C>& {
                int order = comp[static_cast<std::size_t>(pos)];
                return pos < term.j ? fam.members[static_cast<std::size_t>(order) - 1]
                                    : dmem[static_cast<std::size_t>(order) - 1];
            };
            Series<C> prod = factor(0);
            for (int r = 1; r < parts; ++r) prod = convolve_k(prod, factor(r), fam.k);
            acc = acc + prod;

            // next composition of rem into `parts` positive parts
            int p = parts - 2;
            while (p >= 0 && comp[static_cast<std::size_t>(p) + 1] == 1) --p;
            if (p < 0) break;
            comp[static_cast<std::size_t>(p)] += 1;
            int used = 0;
            for (int q = 0; q <= p; ++q) used += comp[static_cast<std::size_t>(q)];
            for (int q = p + 1; q + 1 < parts; ++q) {
                comp[static_cast<std::size_t>(q)] = 1;
                used += 1;
            }
            comp.back() = rem - used;
            if (comp.back() < 1) break;
        }
        F = F + acc.scale(term.constant) + convolve_multiplier(term.mult, acc);
    }
    return F;
}

// Residual of the per-order convolution equation; identically zero through
// the certified window when the family comes from an actual solution.
template <class C>
Series<C> convolution_residual(const BorelFamily<C>& fam, int n) {
    using ops = coeff_ops<C>;
    if (n < 1) throw ArgumentError("convolution residual: order must be positive");
    if (n > static_cast<int>(fam.members.size()))
        throw TruncationError("convolution residual: insufficient truncation to assemble F_" +
                              std::to_string(n) + "; the family holds " +
                              std::to_string(fam.members.size()) + " members");

    const Series<C>& un = fam.members[static_cast<std::size_t>(n) - 1];
    Series<C> zk =
        Series<C>::monomial({"xi"}, {fam.k}, {{Var("xi"), fam.k}}, ops::one());
    Series<C> xiun = (zk * un).scale(ops::from_int(fam.k));  // k zeta^k u~_n

    Series<C> res = un.scale(ops::from_int(n) - fam.b0);
    res = res - xiun.scale(fam.c0);
    res = res - convolve_multiplier(fam.b_mult, un);
    res = res - convolve_multiplier(fam.c_mult, xiun);
    res = res - convolution_forcing(fam, n);
    return res;
}

// ---- two-timescale family ---------------------------------------------------
//
// For the halved-time model 2 s dw/ds = a(x) s + w + x^2 dw/dx + (dw/dx)^2
// the s-slices w_m satisfy (2m+1) w_m = a [m=0] + x^2 w_m' + sum w_l' w_j'.
// Removing the degree-one jet and transforming the slices at level 1 gives
// members v~_m with the per-order equation
//
//   (2m+1 - xi) v~_m = alpha_m + 2 sum_l slope_l P v~_{m-1-l}
//                              + sum_l P v~_l * P v~_{m-1-l},
//   alpha_m = forcing [m=0] + slope_m (xi - (2m+1)),     P f = d^2/dxi^2 (xi f),
//
// where slope_m is the x-slope of w_m and forcing the transform of a - a(0).

template <class C>
struct TwoScaleBorelFamily {
    Series<C> forcing{std::vector<Var>{"xi"}, std::vector<int>{0}};
    std::vector<C> slope;
    std::vector<Series<C>> members;
};

template <class C>
TwoScaleBorelFamily<C> anticipative_borel_family(const AnticipativeSolution<C>& sol,
                                                 const Series<C>& a) {
    using ops = coeff_ops<C>;
    TwoScaleBorelFamily<C> fam;
    std::vector<int> origin(a.nvars(), 0);
    C a0 = a.nvars() ? a.at(origin) : a.at(std::vector<int>{});
    fam.forcing = borel_ramified_k(a - Series<C>::constant(a0), 1, "x", "xi");

    Series<C> x1 = Series<C>::monomial({"x"}, {1}, {{Var("x"), 1}}, ops::one());
    for (int m = 0; m < sol.order_s; ++m) {
        Series<C> wm = sol.w.slice("s", m + 1);
        C w0 = wm.at({{Var("x"), 0}});
        C w1 = wm.at({{Var("x"), 1}});
        fam.slope.push_back(w1);
        Series<C> vm = wm - Series<C>::constant(w0) - x1.scale(w1);
        fam.members.push_back(borel_ramified_k(vm, 1, "x", "xi"));
    }
    return fam;
}

template <class C>
Series<C> anticipative_convolution_residual(const TwoScaleBorelFamily<C>& fam, int m) {
    using ops = coeff_ops<C>;
    if (m < 0) throw ArgumentError("convolution residual: order must be nonnegative");
    if (m >= static_cast<int>(fam.members.size()))
        throw TruncationError("convolution residual: insufficient truncation to assemble F_" +
                              std::to_string(m) + "; the family holds " +
                              std::to_string(fam.members.size()) + " members");

    std::vector<Series<C>> dmem;
    for (int l = 0; l < m; ++l)
        dmem.push_back(detail::borel_dx(fam.members[static_cast<std::size_t>(l)]));

    const Series<C>& vm = fam.members[static_cast<std::size_t>(m)];
    const C level = ops::from_int(2 * m + 1);
    Series<C> xi1 = Series<C>::monomial({"xi"}, {1}, {{Var("xi"), 1}}, ops::one());

    Series<C> res = vm.scale(level) - xi1 * vm;
    const C t = fam.slope[static_cast<std::size_t>(m)];
    res = res - xi1.scale(t) + Series<C>::constant(t * level);
    if (m == 0) res = res - fam.forcing;
    const C two = ops::from_int(2);
    for (int l = 0; l < m; ++l) {
        res = res - dmem[static_cast<std::size_t>(m - 1 - l)].scale(
                        two * fam.slope[static_cast<std::size_t>(l)]);
        res = res - convolve(dmem[static_cast<std::size_t>(l)],
                             dmem[static_cast<std::size_t>(m - 1 - l)]);
    }
    return res;
}

}  // namespace summa
