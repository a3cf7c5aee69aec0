#pragma once

// Anticipative x-recursion for the quadratic derivative model
//
//   t du/dt = a(x) t + x^2 du/dx + t (du/dx)^2,    u(0,x) = 0.
//
// The solution is odd in t, so in the halved time s = t^2 the product
// w = t u is a genuine series, w = sum_{m>=0} w_m(x) s^{m+1}, and solves
//
//   2 s dw/ds = a s + w + x^2 dw/dx + (dw/dx)^2.
//
// Collecting s^{m+1} x^n gives
//
//   (2m+1) w_{m,n} = a_n [m=0] + (n-1) w_{m,n-1}
//                    + sum_{j<m} sum_{l=1}^{n+1} l (n+2-l) w_{j,l} w_{m-1-j,n+2-l},
//
// which reads one x order above n from the lower s levels. The scheduler
// therefore computes level m through x^{N_x + (N_s-1-m)}; the input a(x)
// must be certified through x^{N_x + N_s - 1}, and the routine fails fast
// naming that order when it is not.

#include <string>
#include <vector>

#include <summa/equation.hpp>
#include <summa/formal.hpp>

namespace summa {

template <class C>
struct AnticipativeSolution {
    Series<C> w;  // vars (s, x); w = t u in s = t^2
    Series<C> u;  // vars (t, x); odd in t
    int order_s = 0;
    int order_x = 0;
};

namespace detail {

template <class C>
bool is_known_constant(const Series<C>& s, const C& value) {
    Series<C> d = s - Series<C>::constant(value);
    return d.known_zero() && d.fully_exact();
}

}  // namespace detail

template <class C>
AnticipativeSolution<C> solve_anticipative(const EquationSpec<C>& eq, int ns = -1, int nx = -1) {
    validate_spec(eq);
    using ops = coeff_ops<C>;
    using S = Series<C>;
    const bool shape_ok = eq.k == 1 && !eq.nonlinear_xdx &&
                          detail::is_known_constant(eq.b, ops::zero()) &&
                          detail::is_known_constant(eq.c, ops::one()) &&
                          eq.nonlinear.size() == 1 && eq.nonlinear[0].i == 1 &&
                          eq.nonlinear[0].j == 0 && eq.nonlinear[0].alpha == 2 &&
                          detail::is_known_constant(eq.nonlinear[0].coeff, ops::one());
    if (!shape_ok)
        throw ArgumentError(
            "anticipative recursion: the equation must be t du/dt = a(x) t + x^2 du/dx + t (du/dx)^2");

    const int Ns = ns > 0 ? ns : eq.trunc_t;
    const int Nx = nx > 0 ? nx : eq.trunc_x;
    if (Ns < 1 || Nx < 1) throw ArgumentError("anticipative recursion: orders must be positive");

    const int NxI = Nx + Ns - 1;
    if (NxI > kOrderCap)
        throw TruncationError("anticipative recursion: the x grid needs order " +
                              std::to_string(NxI) + " (cap " + std::to_string(kOrderCap) +
                              "); lower the requested orders");
    const std::vector<C> arow = detail::x_row(eq.a, NxI, "coefficient a");

    // lv[m] holds the x row of w_m, valid through NxI - m.
    std::vector<std::vector<C>> lv(static_cast<std::size_t>(Ns));
    for (int m = 0; m < Ns; ++m) {
        const int top = NxI - m;
        std::vector<C> row(static_cast<std::size_t>(top) + 1, ops::zero());
        const C divisor = ops::from_int(2 * m + 1);
        for (int n = 0; n <= top; ++n) {
            C rhs = (m == 0) ? arow[static_cast<std::size_t>(n)] : ops::zero();
            if (n >= 1)
                rhs = rhs + ops::from_int(n - 1) * row[static_cast<std::size_t>(n - 1)];
            for (int j = 0; j < m; ++j) {
                const auto& wj = lv[static_cast<std::size_t>(j)];
                const auto& wk = lv[static_cast<std::size_t>(m - 1 - j)];
                for (int l = 1; l <= n + 1; ++l) {
                    const int r = n + 2 - l;
                    if (r < 1) continue;
                    rhs = rhs + ops::from_int(l) * wj[static_cast<std::size_t>(l)] *
                                    ops::from_int(r) * wk[static_cast<std::size_t>(r)];
                }
            }
            row[static_cast<std::size_t>(n)] = rhs / divisor;
        }
        lv[static_cast<std::size_t>(m)] = std::move(row);
    }

    S w({"s", "x"}, {Ns, Nx});
    S u({"t", "x"}, {2 * Ns, Nx});
    for (int m = 0; m < Ns; ++m)
        for (int n = 0; n <= Nx; ++n) {
            const C& c = lv[static_cast<std::size_t>(m)][static_cast<std::size_t>(n)];
            if (ops::is_zero(c)) continue;
            w.set({{"s", m + 1}, {"x", n}}, c);
            u.set({{"t", 2 * m + 1}, {"x", n}}, c);
        }
    // The even t slots of u through 2 Ns are known zero: the solution is
    // odd in t, which is why the s rewrite exists at all.
    w = w.with_exact("s", false).with_exact("x", false).with_lval("s", 1);
    u = u.with_exact("t", false).with_exact("x", false).with_lval("t", 1);

    AnticipativeSolution<C> out;
    out.w = w;
    out.u = u;
    out.order_s = Ns;
    out.order_x = Nx;
    return out;
}

}  // namespace summa
