#pragma once

// Exact change-of-variable bookkeeping for the solver pipeline. Each
// rewrite is recorded so the inverse can be replayed on a solution:
//
//   shift_x      z = x + f(t), f(0) = 0: w(t,z) = u(t, z - f(t))
//   singular_tau tau = t/x:              w(tau,x) = u(tau x, x)
//   square_s     s = t^2, w = t u:       for odd series in t
//   prepare      u = v + x w:            jet absorption, v recorded
//
// Applying a record and then inverting it is the identity on the shared
// truncation box.

#include <stdexcept>
#include <string>
#include <vector>

#include <summa/equation.hpp>
#include <summa/series.hpp>

namespace summa {

enum class TransformKind { shift_x, singular_tau, square_s, prepare };

template <class C>
struct TransformRecord {
    TransformKind kind = TransformKind::shift_x;
    Series<C> data;  // shift_x: f(t); prepare: the absorbed jet v(t,x)
    int level = 1;   // the level k the rewrite was built for
};

namespace detail {

template <class C>
void require_vars_within(const Series<C>& s, std::initializer_list<const char*> allowed,
                         const std::string& what) {
    for (const auto& v : s.vars()) {
        bool ok = false;
        for (const char* a : allowed)
            if (v == a) ok = true;
        if (!ok) throw ArgumentError(what + ": unexpected variable " + v);
    }
}

}  // namespace detail

// w(t,z) = u(t, z - f(t)). The series must be polynomial in x, since a
// shifted truncation in x has no rectangular certificate.
template <class C>
Series<C> shift_x_apply(const Series<C>& u, const Series<C>& f) {
    using ops = coeff_ops<C>;
    using S = Series<C>;
    detail::require_vars_within(f, {"t"}, "shift");
    if (!ops::is_zero(f.at({{"t", 0}})))
        throw PreconditionError("shift: the offset function must vanish at t = 0");
    if (!u.has_var("x")) throw ArgumentError("shift: series has no x variable");
    if (!u.exact("x"))
        throw ArgumentError("shift: series must be polynomial in x; truncate explicitly first");
    const int tb = f.has_var("t") ? f.bound("t") : 0;
    S sub({"t", "z"}, {tb, 1});
    sub.set({{"z", 1}}, ops::one());
    if (f.has_var("t")) {
        f.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            sub.add_at({{"t", e[0]}}, ops::zero() - c);
        });
        if (!f.exact("t")) sub = sub.with_exact("t", false);
    }
    // a constant f passed the f(0) = 0 check, so it is zero and sub is z
    return u.compose({{"x", sub}});
}

// u(t,x) = w(t, x + f(t)).
template <class C>
Series<C> shift_x_invert(const Series<C>& w, const Series<C>& f) {
    using ops = coeff_ops<C>;
    using S = Series<C>;
    detail::require_vars_within(f, {"t"}, "shift");
    if (!ops::is_zero(f.at({{"t", 0}})))
        throw PreconditionError("shift: the offset function must vanish at t = 0");
    if (!w.has_var("z")) throw ArgumentError("shift: series has no z variable");
    if (!w.exact("z"))
        throw ArgumentError("shift: series must be polynomial in z; truncate explicitly first");
    const int tb = f.has_var("t") ? f.bound("t") : 0;
    S sub({"t", "x"}, {tb, 1});
    sub.set({{"x", 1}}, ops::one());
    if (f.has_var("t")) {
        f.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            sub.add_at({{"t", e[0]}}, c);
        });
        if (!f.exact("t")) sub = sub.with_exact("t", false);
    }
    return w.compose({{"z", sub}});
}

// w(tau, x) = u(tau x, x): the monomial rewrite t^n x^m -> tau^n x^{n+m}.
template <class C>
Series<C> singular_tau_apply(const Series<C>& u) {
    using S = Series<C>;
    detail::require_vars_within(u, {"t", "x"}, "conical rewrite");
    if (!u.has_var("t") || !u.has_var("x"))
        throw ArgumentError("conical rewrite: series must carry both t and x");
    const int nt = u.bound("t"), nx = u.bound("x");
    S w({"tau", "x"}, {nt, nx});
    u.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        const int n = e[u.var_index("t")], m = e[u.var_index("x")];
        if (n + m > nx)
            throw TruncationError("conical rewrite: the term t^" + std::to_string(n) + " x^" +
                                  std::to_string(m) + " needs x order " + std::to_string(n + m) +
                                  " beyond the truncation " + std::to_string(nx));
        w.set({{"tau", n}, {"x", n + m}}, c);
    });
    w = w.with_exact("tau", u.exact("t")).with_exact("x", u.exact("t") && u.exact("x"));
    w = w.with_lval("tau", u.declared_lval("t"))
            .with_lval("x", u.declared_lval("t") + u.declared_lval("x"));
    return w;
}

// u(t, x) from w(tau, x): tau^n x^m -> t^n x^{m-n}; every monomial must
// keep a nonnegative x exponent.
template <class C>
Series<C> singular_tau_invert(const Series<C>& w) {
    using S = Series<C>;
    detail::require_vars_within(w, {"tau", "x"}, "conical rewrite");
    if (!w.has_var("tau") || !w.has_var("x"))
        throw ArgumentError("conical rewrite: series must carry both tau and x");
    const int nt = w.bound("tau"), nx = w.bound("x");
    S u({"t", "x"}, {nt, nx});
    w.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        const int n = e[w.var_index("tau")], m = e[w.var_index("x")];
        if (m - n < 0)
            throw PreconditionError("conical rewrite: tau^" + std::to_string(n) + " x^" +
                                    std::to_string(m) +
                                    " leaves the polynomial range (t-degree exceeds the x-budget)");
        u.set({{"t", n}, {"x", m - n}}, c);
    });
    u = u.with_exact("t", w.exact("tau")).with_exact("x", w.exact("tau") && w.exact("x"));
    u = u.with_lval("t", w.declared_lval("tau"));
    return u;
}

// w(s, x) with s = t^2 and w = t u: u must be odd in t on its whole box.
template <class C>
Series<C> square_s_apply(const Series<C>& u) {
    using S = Series<C>;
    detail::require_vars_within(u, {"t", "x"}, "square rewrite");
    if (!u.has_var("t")) throw ArgumentError("square rewrite: series must carry t");
    const bool with_x = u.has_var("x");
    const int nt = u.bound("t"), nx = with_x ? u.bound("x") : 0;
    const int ns = (nt + 1) / 2;
    S w = with_x ? S({"s", "x"}, {ns, nx}) : S({"s"}, {ns});
    u.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        const int n = e[u.var_index("t")];
        if (n % 2 == 0)
            throw PreconditionError("square rewrite: needs an odd series in t, found a t^" +
                                    std::to_string(n) + " term");
        std::vector<std::pair<Var, int>> exps{{"s", (n + 1) / 2}};
        if (with_x) exps.push_back({"x", e[u.var_index("x")]});
        w.set(exps, c);
    });
    w = w.with_exact("s", u.exact("t")).with_lval("s", (u.declared_lval("t") + 1) / 2);
    if (with_x) w = w.with_exact("x", u.exact("x")).with_lval("x", u.declared_lval("x"));
    return w;
}

// u(t, x) from w(s, x): s^p -> t^{2p-1}, so w must vanish at s = 0; the
// even t slots of the result are known zero by construction.
template <class C>
Series<C> square_s_invert(const Series<C>& w) {
    using S = Series<C>;
    detail::require_vars_within(w, {"s", "x"}, "square rewrite");
    if (!w.has_var("s")) throw ArgumentError("square rewrite: series must carry s");
    const bool with_x = w.has_var("x");
    const int ns = w.bound("s"), nx = with_x ? w.bound("x") : 0;
    const int nt = 2 * ns;
    S u = with_x ? S({"t", "x"}, {nt, nx}) : S({"t"}, {nt});
    w.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        const int p = e[w.var_index("s")];
        if (p == 0)
            throw PreconditionError("square rewrite: the series must vanish at s = 0");
        std::vector<std::pair<Var, int>> exps{{"t", 2 * p - 1}};
        if (with_x) exps.push_back({"x", e[w.var_index("x")]});
        u.set(exps, c);
    });
    u = u.with_exact("t", w.exact("s"))
            .with_lval("t", w.declared_lval("s") > 0 ? 2 * w.declared_lval("s") - 1 : 0);
    if (with_x) u = u.with_exact("x", w.exact("x")).with_lval("x", w.declared_lval("x"));
    return u;
}

template <class C>
Series<C> apply_transform(const Series<C>& s, const TransformRecord<C>& rec) {
    switch (rec.kind) {
        case TransformKind::shift_x:
            return shift_x_apply(s, rec.data);
        case TransformKind::singular_tau:
            return singular_tau_apply(s);
        case TransformKind::square_s:
            return square_s_apply(s);
        case TransformKind::prepare: {
            // w = (u - v)/x
            Series<C> num = s - rec.data;
            try {
                return num.shift_down("x", 1);
            } catch (const std::domain_error&) {
                throw PreconditionError("jet removal: the difference is not divisible by x");
            }
        }
    }
    throw ArgumentError("apply_transform: unknown kind");
}

template <class C>
Series<C> invert_transform(const Series<C>& s, const TransformRecord<C>& rec) {
    switch (rec.kind) {
        case TransformKind::shift_x:
            return shift_x_invert(s, rec.data);
        case TransformKind::singular_tau:
            return singular_tau_invert(s);
        case TransformKind::square_s:
            return square_s_invert(s);
        case TransformKind::prepare:
            // u = v + x w
            return rec.data + s.shift_up("x", 1);
    }
    throw ArgumentError("invert_transform: unknown kind");
}

}  // namespace summa
