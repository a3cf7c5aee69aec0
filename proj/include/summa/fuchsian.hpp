#pragma once

// Order-by-order solver for scalar equations of Fuchsian type,
//
//   t y'(t) = G(t, y, t y')     (derivative form), or
//       y(t) = G(t, y, t y')    (direct form),
//
// with y(0) = 0. The slot variable Y stands for y and Z for t y'. Writing
// g_Y and g_Z for the constant parts of the linear slots, order n divides by
//
//   n (1 - g_Z) - g_Y    (derivative form),
//   1 - g_Y - n g_Z      (direct form),
//
// and the recursion is triangular as long as no divisor vanishes. The same
// routine powers the dominating-series construction, whose right-hand side
// is built from weighted norms of the equation data.

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <summa/equation.hpp>
#include <summa/series.hpp>

namespace summa {

enum class FuchsMode { derivative, direct };

template <class C>
Series<C> fuchsian_ode_solve(const Series<C>& G, FuchsMode mode, int N) {
    using ops = coeff_ops<C>;
    using S = Series<C>;
    if (N < 1) throw ArgumentError("fuchsian solve: order must be at least 1");
    for (const auto& v : G.vars())
        if (v != "t" && v != "Y" && v != "Z")
            throw ArgumentError("fuchsian solve: expected a series in t and the slots Y, Z, got " + v);

    S g = G;
    if (!g.has_var("t")) g = g.lift("t", 0);
    if (!g.has_var("Y")) g = g.lift("Y", 0);
    if (!g.has_var("Z")) g = g.lift("Z", 0);
    if (!g.exact("Y") || !g.exact("Z"))
        throw ArgumentError("fuchsian solve: the slot dependence must be polynomial (exact in Y and Z)");
    if (g.bound("t") < N) {
        if (!g.exact("t"))
            throw TruncationError("fuchsian solve: right-hand side certified only to t order " +
                                  std::to_string(g.bound("t")) + ", need " + std::to_string(N));
        g = g.truncated("t", N);
    }

    const int PB = g.bound("Y");
    const int QB = g.bound("Z");

    // Slot slices g_{p,q}(t); the constant parts of the two linear slots
    // move into the divisor.
    std::map<std::pair<int, int>, S> gpq;
    for (int p = 0; p <= PB; ++p)
        for (int q = 0; q <= QB; ++q) {
            S s = g.slice("Y", p).slice("Z", q);
            if (!s.known_zero()) gpq.emplace(std::make_pair(p, q), std::move(s));
        }

    auto const_part = [&](int p, int q) -> C {
        auto it = gpq.find({p, q});
        if (it == gpq.end()) return ops::zero();
        return it->second.at({{"t", 0}});
    };
    const C gY = const_part(1, 0);
    const C gZ = const_part(0, 1);
    if (!ops::is_zero(const_part(0, 0)))
        throw PreconditionError("fuchsian solve: the forcing has a nonzero constant term, so no solution vanishes at t = 0");

    std::vector<C> y(static_cast<std::size_t>(N) + 1, ops::zero());
    for (int n = 1; n <= N; ++n) {
        C divisor = (mode == FuchsMode::derivative)
                        ? ops::from_int(n) * (ops::one() - gZ) - gY
                        : ops::one() - gY - ops::from_int(n) * gZ;
        if (ops::is_zero(divisor))
            throw PreconditionError("fuchsian solve: the recursion is resonant at order t^" +
                                    std::to_string(n) + " (zero divisor)");

        S ypart({"t"}, {n - 1});
        S zpart({"t"}, {n - 1});
        for (int m = 1; m < n; ++m) {
            if (ops::is_zero(y[static_cast<std::size_t>(m)])) continue;
            ypart.set({{"t", m}}, y[static_cast<std::size_t>(m)]);
            zpart.set({{"t", m}}, ops::from_int(m) * y[static_cast<std::size_t>(m)]);
        }
        ypart = ypart.with_exact("t", false).with_lval("t", 1);
        zpart = zpart.with_exact("t", false).with_lval("t", 1);

        C rhs = ops::zero();
        std::map<int, S> py, pz;
        for (const auto& [pq, gs] : gpq) {
            const auto [p, q] = pq;
            S coeff = gs;
            if ((p == 1 && q == 0) || (p == 0 && q == 1)) {
                // remove the constant handled by the divisor
                coeff = coeff - S::constant(coeff.at({{"t", 0}}));
                coeff = coeff.with_lval("t", 1);
            }
            S f = coeff;
            if (p > 0) f = f * detail::cached_power(ypart, p, py);
            if (q > 0) f = f * detail::cached_power(zpart, q, pz);
            rhs = rhs + f.slice("t", n).at(std::vector<int>{});
        }
        y[static_cast<std::size_t>(n)] = rhs / divisor;
    }

    S out({"t"}, {N});
    for (int n = 1; n <= N; ++n)
        if (!ops::is_zero(y[static_cast<std::size_t>(n)])) out.set({{"t", n}}, y[static_cast<std::size_t>(n)]);
    return out.with_exact("t", false).with_lval("t", 1);
}

namespace detail {

inline void require_real_positive(const CQ& v, const char* name) {
    if (!(v.im == 0) || !(v.re > 0))
        throw ArgumentError(std::string(name) + " must be a positive real number");
}
inline void require_real_positive(const CD& v, const char* name) {
    if (v.imag() != 0.0 || !(v.real() > 0.0))
        throw ArgumentError(std::string(name) + " must be a positive real number");
}
inline void require_real_nonnegative(const CQ& v, const char* name) {
    if (!(v.im == 0) || v.re < 0)
        throw ArgumentError(std::string(name) + " must be a nonnegative real number");
}
inline void require_real_nonnegative(const CD& v, const char* name) {
    if (v.imag() != 0.0 || !(v.real() >= 0.0))
        throw ArgumentError(std::string(name) + " must be a nonnegative real number");
}

}  // namespace detail

// Weight attached to one nonlinear index (i,j,alpha) in the dominating
// series equation.
template <class C>
struct MajorantWeight {
    int i = 0, j = 0, alpha = 0;
    C value{};
};

// Builds the dominating series Y(t) solving
//
//   Y = Y_1 t + (2/sigma) sum W_{i,j,alpha} t^i (2 Y/sigma)^j (2 (E + 1/sigma) Y)^alpha.
//
// Every x-slice norm of the solution of a prepared equation is bounded by
// the matching coefficient of Y, provided Y_1 dominates the first slice and
// the weights dominate the equation data.
template <class C>
Series<C> majorant_series(const C& y1, const std::vector<MajorantWeight<C>>& weights,
                          const C& sigma, const C& ebound, int N) {
    using ops = coeff_ops<C>;
    using S = Series<C>;
    detail::require_real_positive(sigma, "sigma");
    detail::require_real_nonnegative(ebound, "the derivative constant");
    detail::require_real_nonnegative(y1, "the first-slice bound");

    int ib = 1, yb = 1;
    for (const auto& w : weights) {
        if (w.i < 0 || w.j < 0 || w.alpha < 0 || w.i + w.j + w.alpha < 2)
            throw ArgumentError("majorant: weight indices must satisfy i + j + alpha >= 2");
        detail::require_real_nonnegative(w.value, "a majorant weight");
        if (w.j == 0 && w.alpha == 0 && !ops::is_zero(w.value))
            throw PreconditionError("majorant: the prepared equation must carry no pure t^i forcing (W_{i,0,0} = 0)");
        ib = std::max(ib, w.i);
        yb = std::max(yb, w.j + w.alpha);
    }

    const C inv_sigma = ops::one() / sigma;
    const C two = ops::from_int(2);
    S G({"t", "Y"}, {std::max(ib, N), yb});
    G.set({{"t", 1}, {"Y", 0}}, y1);
    for (const auto& w : weights) {
        if (ops::is_zero(w.value)) continue;
        C factor = two * inv_sigma * w.value;
        for (int r = 0; r < w.j; ++r) factor = factor * (two * inv_sigma);
        for (int r = 0; r < w.alpha; ++r) factor = factor * (two * (ebound + inv_sigma));
        G.add_at({{"t", w.i}, {"Y", w.j + w.alpha}}, factor);
    }
    return fuchsian_ode_solve(G, FuchsMode::direct, N);
}

}  // namespace summa
