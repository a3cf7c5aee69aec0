#pragma once
// Closed-form perturbation expansion of the ray continuation problem
//     (xi - xi_n) psi = eps B*psi + eps C*(xi psi) + F
// at orders 0 and 1 in eps:
//     psi_0 = F/(xi - xi_n),
//     psi_1 = (B*psi_0 + C*(xi psi_0))/(xi - xi_n).
// With w = xi - xi_n and the substitution y = tau - xi_n, every convolution
// integral becomes int_{-xi_n}^{w} P(w - y) h(y) dy with h a Laurent
// polynomial of pole order at most one, so termwise integration in y yields
// polynomials in w plus one log channel Lambda = log(1 - xi/xi_n): exactly
// the pole-order-1, log-power-1 local shape.

#include <complex>
#include <utility>
#include <vector>

#include "summa/coeff.hpp"
#include "summa/equation.hpp"
#include "summa/logseries.hpp"
#include "summa/series.hpp"

namespace summa {

namespace detail {

// Dense univariate coefficient vector of a single-variable series.
inline std::vector<CD> poly_from_series(const SeriesD& f, const char* role) {
    if (f.nvars() != 1)
        throw ArgumentError(std::string("the ") + role +
                            " series must be univariate");
    std::vector<CD> out(static_cast<std::size_t>(f.bound(f.vars()[0])) + 1,
                        CD(0.0, 0.0));
    f.for_each_nonzero([&](const std::vector<int>& e, const CD& c) {
        out[static_cast<std::size_t>(e[0])] = c;
    });
    while (out.size() > 1 && out.back() == CD(0.0, 0.0)) out.pop_back();
    return out;
}

inline SeriesD series_from_poly(const std::vector<CD>& p, const Var& var) {
    SeriesD out({var}, {std::max<int>(0, static_cast<int>(p.size()) - 1)});
    for (std::size_t m = 0; m < p.size(); ++m)
        out.set({static_cast<int>(m)}, p[m]);
    return out;
}

// Coefficients of p(y + shift) from those of p(y).
inline std::vector<CD> taylor_shift(const std::vector<CD>& p, CD shift) {
    std::vector<CD> out(p.size(), CD(0.0, 0.0));
    for (std::size_t m = 0; m < p.size(); ++m) {
        CD binom(1.0, 0.0);  // binom(m, j) * shift^{m-j}, built from j = m down
        for (std::size_t j = m + 1; j-- > 0;) {
            out[j] += p[m] * binom;
            binom *= shift * (static_cast<double>(j) / (m - j + 1.0));
        }
    }
    return out;
}

// Expansion P(w - y) = sum_d c_d(w) y^d: c_d(w) = (-1)^d sum_m P_m binom(m, d)
// w^{m-d}, returned as one coefficient vector in w per power of y.
inline std::vector<std::vector<CD>> negated_argument_expansion(
    const std::vector<CD>& p) {
    std::vector<std::vector<CD>> c(p.size());
    for (std::size_t d = 0; d < p.size(); ++d) {
        c[d].assign(p.size() - d, CD(0.0, 0.0));
        double binom = 1.0;  // binom(m, d) as m walks upward from d
        for (std::size_t m = d; m < p.size(); ++m) {
            c[d][m - d] = (d % 2 ? -1.0 : 1.0) * binom * p[m];
            binom *= static_cast<double>(m + 1) / (m + 1 - d);
        }
    }
    return c;
}

// Accumulate scale * w^{lift} * g(w) into acc.
inline void add_scaled_shifted(std::vector<CD>& acc, const std::vector<CD>& g,
                               CD scale, std::size_t lift) {
    if (acc.size() < g.size() + lift) acc.resize(g.size() + lift, CD(0.0, 0.0));
    for (std::size_t m = 0; m < g.size(); ++m) acc[m + lift] += scale * g[m];
}

inline CD integer_power(CD base, std::size_t n) {
    CD out(1.0, 0.0);
    for (std::size_t i = 0; i < n; ++i) out *= base;
    return out;
}

// Closed form of int_{-xi_n}^{w} P(w - y) (q_pole/y + q(y)) dy, split into a
// polynomial channel in w and the coefficient of Lambda = log(1 - xi/xi_n);
// the y^{-1} monomial integrates to [log y] = Lambda exactly on the branch
// the local expansions use, every other power obeys the power rule.
inline std::pair<std::vector<CD>, std::vector<CD>> kernel_integral(
    const std::vector<CD>& p, const std::vector<CD>& q, CD q_pole, CD xi_n) {
    std::vector<std::vector<CD>> c = detail::negated_argument_expansion(p);
    std::vector<CD> poly, log_coeff;
    if (!c.empty()) add_scaled_shifted(log_coeff, c[0], q_pole, 0);
    for (std::size_t d = 1; d < c.size(); ++d) {
        CD inv_d(1.0 / static_cast<double>(d), 0.0);
        add_scaled_shifted(poly, c[d], q_pole * inv_d, d);
        add_scaled_shifted(poly, c[d], -q_pole * inv_d * integer_power(-xi_n, d), 0);
    }
    for (std::size_t d = 0; d < c.size(); ++d)
        for (std::size_t j = 0; j < q.size(); ++j) {
            std::size_t s = d + j;
            CD scale = q[j] / static_cast<double>(s + 1);
            add_scaled_shifted(poly, c[d], scale, s + 1);
            add_scaled_shifted(poly, c[d], -scale * integer_power(-xi_n, s + 1), 0);
        }
    return {std::move(poly), std::move(log_coeff)};
}

}  // namespace detail

// Orders 0 and 1 of the eps-expansion, as local log expansions at xi_n.
inline std::vector<LogSeries> perturbation_log_expansion(const SeriesD& B,
                                                         const SeriesD& C,
                                                         const SeriesD& F, CD xi_n,
                                                         int order) {
    if (order < 0 || order > 1)
        throw ArgumentError("the perturbation order must be 0 or 1");
    if (xi_n == CD(0.0, 0.0))
        throw PreconditionError("the singular point must be away from the origin");

    std::vector<CD> b = detail::poly_from_series(B, "B");
    std::vector<CD> c = detail::poly_from_series(C, "C");
    std::vector<CD> f = detail::poly_from_series(F, "F");

    // psi_0 = F/(xi - xi_n): re-expand the numerator at the singular point.
    std::vector<CD> q_full = detail::taylor_shift(f, xi_n);
    LogSeries psi0(xi_n);
    psi0.add_term(0, 1, detail::series_from_poly(q_full, "w"));
    std::vector<LogSeries> out{psi0};
    if (order == 0) return out;

    // Split q_full(y)/y = q0/y + r(y); tau psi_0 adds xi_n times that pole.
    CD q0 = q_full.empty() ? CD(0.0, 0.0) : q_full[0];
    std::vector<CD> r(q_full.begin() + (q_full.empty() ? 0 : 1), q_full.end());
    auto [b_poly, b_log] = detail::kernel_integral(b, r, q0, xi_n);
    std::vector<CD> c_reg = q_full;
    detail::add_scaled_shifted(c_reg, r, xi_n, 0);
    auto [c_poly, c_log] = detail::kernel_integral(c, c_reg, xi_n * q0, xi_n);

    detail::add_scaled_shifted(b_poly, c_poly, CD(1.0, 0.0), 0);
    detail::add_scaled_shifted(b_log, c_log, CD(1.0, 0.0), 0);
    LogSeries psi1(xi_n);
    psi1.add_term(0, 1, detail::series_from_poly(b_poly, "w"));
    psi1.add_term(1, 1, detail::series_from_poly(b_log, "w"));
    out.push_back(psi1);
    return out;
}

}  // namespace summa
