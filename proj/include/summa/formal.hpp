#pragma once

// Formal power-series solver for the singular first-order model
//
//   t du/dt = a(x) t + b(x) u + x^{k+1} c(x) du/dx
//             + sum_{i+j+alpha >= 2} a_{i,j,alpha}(x) t^i u^j D^alpha,
//   u(0,x) = 0,
//
// where D is du/dx, or x du/dx when the spec carries the rotated form.
// The t slices are determined one order at a time; inside a slice the x
// coefficients follow by a triangular march, because every right-hand
// contribution at x^m reads strictly earlier data.

#include <map>
#include <string>
#include <vector>

#include <summa/equation.hpp>
#include <summa/series.hpp>

namespace summa {

enum class Provenance { t_recursion, anticipative };

template <class C>
struct FormalSolution {
    Series<C> series;   // u(t,x); vanishes at t = 0
    int order_t = 0;    // certified t orders
    int order_x = 0;    // certified x orders
    Provenance provenance = Provenance::t_recursion;
    int residual_order = 0;  // the equation residual vanishes through this order
};

namespace detail {

// x-coefficient row 0..upto of a coefficient series, padding exact tails
// with zeros. A certified window too short for the march is an error that
// names the order the caller actually needs.
template <class C>
std::vector<C> x_row(const Series<C>& s, int upto, const std::string& what) {
    using ops = coeff_ops<C>;
    std::vector<C> row(static_cast<std::size_t>(upto) + 1, ops::zero());
    if (!s.has_var("x")) {
        if (s.nvars() == 0) row[0] = s.at(std::vector<int>{});
        return row;
    }
    int b = s.bound("x");
    if (b < upto && !s.exact("x"))
        throw TruncationError(what + " is certified only to x order " + std::to_string(b) +
                              "; the recursion needs order " + std::to_string(upto));
    for (int p = 0; p <= std::min(b, upto); ++p)
        row[static_cast<std::size_t>(p)] = s.at({{"x", p}});
    return row;
}

}  // namespace detail

// Residual of the model equation evaluated on a candidate series. The
// certified box of the result is exactly the window on which a vanishing
// residual has been proven.
template <class C>
Series<C> pde_residual_series(const EquationSpec<C>& eq, const Series<C>& u) {
    using ops = coeff_ops<C>;
    using S = Series<C>;
    S t_mono = S::monomial({"t"}, {1}, {{"t", 1}}, ops::one());

    S res = u.derive("t").shift_up("t", 1);
    res = res - eq.a * t_mono;
    res = res - eq.b * u;
    S du = u.derive("x");
    res = res - eq.c.shift_up("x", eq.k + 1) * du;

    S dfac = eq.nonlinear_xdx ? du.shift_up("x", 1) : du;
    std::map<int, S> pu, pd;
    for (const auto& term : eq.nonlinear) {
        S f = S::constant(ops::one());
        if (term.j > 0) f = f * detail::cached_power(u, term.j, pu);
        if (term.alpha > 0) f = f * detail::cached_power(dfac, term.alpha, pd);
        f = f * term.coeff;
        if (term.i > 0) {
            if (!f.has_var("t")) f = f.lift("t", 0);
            f = f.shift_up("t", term.i);
        }
        res = res - f;
    }
    return res;
}

// Solves the model equation order by order in t. Each slice u_n solves
//   (n - b(0)) u_{n,m} = [t^n x^m](a t) + sum_{p>=1} b_p u_{n,m-p}
//                        + sum_p c_p (m-k-p) u_{n,m-k-p} + [x^m] R_n,
// where R_n collects the nonlinear contributions of slices below n.
template <class C>
FormalSolution<C> solve_formal(const EquationSpec<C>& eq) {
    validate_spec(eq);
    using ops = coeff_ops<C>;
    using S = Series<C>;
    const int Nt = eq.trunc_t;
    const int Nx = eq.trunc_x;
    const int k = eq.k;

    bool plain_dx = false;
    bool any_nl = !eq.nonlinear.empty();
    for (const auto& term : eq.nonlinear)
        if (term.alpha > 0 && !eq.nonlinear_xdx) plain_dx = true;

    // A plain-derivative factor consumes one x order per t level, so the
    // march runs on a wider internal grid and returns the requested box.
    const long long wide = static_cast<long long>(Nx) + (plain_dx ? Nt - 1 : 0);
    if (wide > kOrderCap)
        throw TruncationError("solve: derivative growth of the nonlinearity needs x order " +
                              std::to_string(wide) + " internally (cap " +
                              std::to_string(kOrderCap) + "); lower the truncation orders");
    const int NxI = static_cast<int>(wide);

    const C b0 = eq.b0();
    const std::vector<C> arow = detail::x_row(eq.a, NxI, "coefficient a");
    const std::vector<C> brow = detail::x_row(eq.b, NxI, "coefficient b");
    const std::vector<C> crow = detail::x_row(eq.c, NxI, "coefficient c");
    for (const auto& term : eq.nonlinear)
        detail::x_row(term.coeff, NxI, "a nonlinear coefficient");

    // levels[n] holds the x row of the t^n slice, valid through validx[n].
    std::vector<std::vector<C>> levels(static_cast<std::size_t>(Nt) + 1);
    std::vector<int> validx(static_cast<std::size_t>(Nt) + 1, NxI);
    levels[0].assign(static_cast<std::size_t>(NxI) + 1, ops::zero());

    for (int n = 1; n <= Nt; ++n) {
        const C divisor = ops::from_int(n) - b0;
        if (ops::is_zero(divisor))
            throw PreconditionError("resonance: b(0) in N*; the t-recursion divides by zero at order t^" +
                                    std::to_string(n));

        // Nonlinear forcing R_n from the slices already determined.
        const int bprev = validx[static_cast<std::size_t>(n) - 1];
        S rn({"x"}, {NxI});
        if (any_nl && n >= 2) {
            S upart({"t", "x"}, {n - 1, bprev});
            int tv = n;
            for (int q = 1; q < n; ++q)
                for (int m = 0; m <= bprev; ++m) {
                    const C& c = levels[static_cast<std::size_t>(q)][static_cast<std::size_t>(m)];
                    if (ops::is_zero(c)) continue;
                    upart.set({{"t", q}, {"x", m}}, c);
                    tv = std::min(tv, q);
                }
            // The t valuation promise is sound: slices below tv are proven
            // zero and the unknown tail starts at t^n. No such promise holds
            // in x, where the tail of any slice is undetermined.
            upart = upart.with_exact("t", false).with_exact("x", false).with_lval("t", tv);
            S dpart = upart;
            bool need_d = false;
            for (const auto& term : eq.nonlinear)
                if (term.alpha > 0) need_d = true;
            if (need_d) {
                dpart = upart.derive("x");
                if (eq.nonlinear_xdx) dpart = dpart.shift_up("x", 1);
            }

            std::map<int, S> pu, pd;
            for (std::size_t ti = 0; ti < eq.nonlinear.size(); ++ti) {
                const auto& term = eq.nonlinear[ti];
                const int parts = term.j + term.alpha;
                if (parts == 0) {
                    if (term.i == n) rn = rn + term.coeff.truncated("x", NxI);
                    continue;
                }
                if (n - term.i < parts) continue;  // every slice factor starts at t^1
                S p = S::constant(ops::one());
                if (term.j > 0) p = p * detail::cached_power(upart, term.j, pu);
                if (term.alpha > 0) p = p * detail::cached_power(dpart, term.alpha, pd);
                rn = rn + term.coeff * p.slice("t", n - term.i);
            }
        }
        // n = 1 receives no nonlinear forcing: every term carries total
        // degree i + j + alpha >= 2 and every slice factor starts at t^1.

        int vn = NxI;
        if (rn.has_var("x") && !rn.exact("x")) vn = std::min(vn, rn.bound("x"));
        if (vn < Nx)
            throw std::logic_error("solve: internal grid bookkeeping lost certified orders");

        std::vector<C> row(static_cast<std::size_t>(vn) + 1, ops::zero());
        for (int m = 0; m <= vn; ++m) {
            C rhs = (n == 1) ? arow[static_cast<std::size_t>(m)] : ops::zero();
            for (int p = 1; p <= m; ++p)
                rhs = rhs + brow[static_cast<std::size_t>(p)] * row[static_cast<std::size_t>(m - p)];
            for (int p = 0; p + k <= m; ++p) {
                const int mm = m - k - p;
                if (mm >= 1)
                    rhs = rhs + crow[static_cast<std::size_t>(p)] * ops::from_int(mm) *
                                    row[static_cast<std::size_t>(mm)];
            }
            if (m <= rn.bound("x")) rhs = rhs + rn.at({{"x", m}});
            row[static_cast<std::size_t>(m)] = rhs / divisor;
        }
        levels[static_cast<std::size_t>(n)] = std::move(row);
        validx[static_cast<std::size_t>(n)] = vn;
    }

    S u({"t", "x"}, {Nt, Nx});
    int tv = Nt + 1;
    for (int n = 1; n <= Nt; ++n)
        for (int m = 0; m <= Nx; ++m) {
            const C& c = levels[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
            if (ops::is_zero(c)) continue;
            u.set({{"t", n}, {"x", m}}, c);
            tv = std::min(tv, n);
        }
    u = u.with_exact("t", false).with_exact("x", false).with_lval("t", tv);

    FormalSolution<C> out;
    out.series = u;
    out.order_t = Nt;
    out.order_x = Nx;
    out.provenance = Provenance::t_recursion;
    out.residual_order = std::min(Nt, plain_dx ? Nx - 1 : Nx);
    return out;
}

}  // namespace summa
