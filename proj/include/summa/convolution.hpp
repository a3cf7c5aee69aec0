#pragma once

// Borel-plane primitives on truncated series: the convolution rules
//   level 1:  xi^l * xi^m = l! m! / (l+m+1)!  xi^{l+m+1}
//   level k:  xi^j *_k xi^i = G(1+j/k) G(1+i/k) / G(2+(i+j)/k)  xi^{i+j+k}
// plus the formal Borel transforms and the ramification reindexing.
// Level-k objects live on the integer exponent grid of the ramified
// variable: degree m stands for the paper-plane power xi^{m} with the
// k-dependent shift already applied by the transform that produced it.

#include "summa/gamma.hpp"
#include "summa/series.hpp"

#include <stdexcept>

namespace summa {

namespace detail {

inline CQ conv_weight_exact(int l, int m, int k) {
    if (k != 1) {
        // exact only when k divides both exponents (integer Gamma arguments)
        if (l % k != 0 || m % k != 0 || (l + m) % k != 0)
            throw std::domain_error("convolve: fractional Gamma weight needs float mode");
        return CQ(factorial_rat(l / k) * factorial_rat(m / k) /
                  factorial_rat((l + m) / k + 1));
    }
    return CQ(factorial_rat(l) * factorial_rat(m) / factorial_rat(l + m + 1));
}

inline CD conv_weight_float(int l, int m, int k) {
    double lg = log_gamma_real(1.0 + static_cast<double>(l) / k) +
                log_gamma_real(1.0 + static_cast<double>(m) / k) -
                log_gamma_real(2.0 + static_cast<double>(l + m) / k);
    return CD(std::exp(lg), 0.0);
}

template <class C>
C conv_weight(int l, int m, int k) {
    if constexpr (coeff_ops<C>::exact) return conv_weight_exact(l, m, k);
    else return conv_weight_float(l, m, k);
}

}  // namespace detail

// Level-k convolution in `var`; all other variables multiply as scalars.
template <class C>
Series<C> convolve_k(const Series<C>& f, const Series<C>& g, int k, const Var& var = "xi") {
    if (k <= 0) throw std::invalid_argument("convolve: level must be positive");
    if (!f.has_var(var) || !g.has_var(var))
        throw std::invalid_argument("convolve: operands must carry variable " + var);

    // Build the common frame via an ordinary product, then fix up the
    // convolution variable: certified order gains k (each term rises by
    // at least val+k), exactness follows the product rule.
    Series<C> frame = f * g;
    int vi = frame.var_index(var);
    std::vector<Var> vars = frame.vars();
    std::vector<int> nb(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) nb[i] = frame.bound(vars[i]);
    nb[vi] = std::min(nb[vi] + k, kOrderCap);
    Series<C> out(vars, nb);
    for (std::size_t i = 0; i < vars.size(); ++i)
        out = out.with_exact(vars[i], frame.exact(vars[i]))
                 .with_lval(vars[i], frame.declared_lval(vars[i]));
    out = out.with_lval(var, std::min(frame.declared_lval(var) + k, kOrderCap));
    out = out.with_flags(f.flags() | g.flags());

    f.for_each_nonzero([&](const std::vector<int>& ef, const C& cf) {
        // exponent tuples are in each operand's own frame; map via names
        std::vector<std::pair<Var, int>> tf;
        for (int i = 0; i < f.nvars(); ++i) tf.emplace_back(f.vars()[i], ef[i]);
        g.for_each_nonzero([&](const std::vector<int>& eg, const C& cg) {
            std::vector<int> d(out.nvars(), 0);
            for (auto& [v, e] : tf) d[out.var_index(v)] += e;
            for (int i = 0; i < g.nvars(); ++i) d[out.var_index(g.vars()[i])] += eg[i];
            int l = 0, m = 0;
            for (auto& [v, e] : tf)
                if (v == var) l = e;
            m = eg[g.var_index(var)];
            d[out.var_index(var)] = l + m + k;
            out.add_at(d, cf * cg * detail::conv_weight<C>(l, m, k));
        });
    });
    return out;
}

template <class C>
Series<C> convolve(const Series<C>& f, const Series<C>& g, const Var& var = "xi") {
    return convolve_k(f, g, 1, var);
}

// Classical formal Borel transform with respect to var_in:
//   x^{m+1}  ->  xi^m / m!        (requires zero constant term)
// Products map to level-1 convolutions under this convention.
template <class C>
Series<C> borel_classical(const Series<C>& f, const Var& var_in = "x",
                          const Var& var_out = "xi") {
    int vi = f.var_index(var_in);
    f.for_each_nonzero([&](const std::vector<int>& e, const C&) {
        if (e[vi] == 0)
            throw std::domain_error("borel: nonzero constant term in " + var_in);
    });
    Series<C> shifted = f.shift_down(var_in, 1).rename(var_in, var_out);
    Series<C> out = shifted;
    out = out.scale(coeff_ops<C>::zero());
    shifted.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        int m = e[out.var_index(var_out)];
        C w;
        if constexpr (coeff_ops<C>::exact) w = CQ(Rat(1) / factorial_rat(m));
        else w = CD(std::exp(-log_gamma_real(m + 1.0)), 0.0);
        out.add_at(e, c * w);
    });
    return out;
}

// Inverse of borel_classical on series (multiply back by m! and shift up).
template <class C>
Series<C> borel_classical_inverse(const Series<C>& f, const Var& var_in = "xi",
                                  const Var& var_out = "x") {
    Series<C> out = f.scale(coeff_ops<C>::zero());
    f.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        int m = e[f.var_index(var_in)];
        C w;
        if constexpr (coeff_ops<C>::exact) w = CQ(Rat(factorial_rat(m)));
        else w = CD(std::exp(log_gamma_real(m + 1.0)), 0.0);
        out.add_at(e, c * w);
    });
    return out.rename(var_in, var_out).shift_up(var_out, 1);
}

// Level-k formal Borel transform:
//   sum a_n x^n  ->  sum a_n / Gamma(1+n/k) xi^{n-k},
// requiring a_0 = ... = a_{k-1} = 0.  Exact mode needs integer Gamma
// arguments (k = 1, or every contributing n divisible by k); otherwise
// use the float overload (callers demote and set kFlagDemoted).
inline SeriesQ formal_borel_k(const SeriesQ& f, int k, const Var& var_in = "x",
                              const Var& var_out = "xi") {
    if (k <= 0) throw std::invalid_argument("borel: level must be positive");
    int vi = f.var_index(var_in);
    f.for_each_nonzero([&](const std::vector<int>& e, const CQ&) {
        if (e[vi] < k)
            throw std::domain_error("borel: low-order coefficients below x^k must vanish");
        if (e[vi] % k != 0)
            throw std::domain_error("borel: fractional Gamma value needs float mode");
    });
    SeriesQ shifted = f.shift_down(var_in, k).rename(var_in, var_out);
    SeriesQ out = shifted.scale(CQ());
    shifted.for_each_nonzero([&](const std::vector<int>& e, const CQ& c) {
        int n = e[out.var_index(var_out)] + k;
        out.add_at(e, c * CQ(Rat(1) / factorial_rat(n / k)));
    });
    return out;
}

inline SeriesD formal_borel_k(const SeriesD& f, int k, const Var& var_in = "x",
                              const Var& var_out = "xi") {
    if (k <= 0) throw std::invalid_argument("borel: level must be positive");
    int vi = f.var_index(var_in);
    f.for_each_nonzero([&](const std::vector<int>& e, const CD&) {
        if (e[vi] < k)
            throw std::domain_error("borel: low-order coefficients below x^k must vanish");
    });
    SeriesD shifted = f.shift_down(var_in, k).rename(var_in, var_out);
    SeriesD out = shifted.scale(CD());
    shifted.for_each_nonzero([&](const std::vector<int>& e, const CD& c) {
        int n = e[out.var_index(var_out)] + k;
        out.add_at(e, c / CD(gamma_one_plus(n, k), 0.0));
    });
    return out;
}

// Ramified-composite Borel transform: x^m -> xi^{m-k} / Gamma(m/k) on the
// integer grid of the ramified variable (degree p stands for the fractional
// power xi^{p/k} of the unramified plane).  This is the transform under which
// products of x-series become level-k convolutions:
//   borel_ramified_k(f*g) = borel_ramified_k(f) *_k borel_ramified_k(g).
// At k = 1 it coincides with borel_classical.  Requires val(f) >= k so the
// output stays on the nonnegative grid.
template <class C>
Series<C> borel_ramified_k(const Series<C>& f, int k, const Var& var_in = "x",
                           const Var& var_out = "xi") {
    if (k <= 0) throw std::invalid_argument("borel: level must be positive");
    int vi = f.var_index(var_in);
    f.for_each_nonzero([&](const std::vector<int>& e, const C&) {
        if (e[vi] < k)
            throw std::domain_error(
                "borel: ramified transform needs valuation >= level in " + var_in);
        if constexpr (coeff_ops<C>::exact)
            if (e[vi] % k != 0)
                throw std::domain_error("borel: fractional Gamma value needs float mode");
    });
    Series<C> shifted = f.shift_down(var_in, k).rename(var_in, var_out);
    Series<C> out = shifted.scale(coeff_ops<C>::zero());
    shifted.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        int m = e[out.var_index(var_out)] + k;  // original x-exponent
        if constexpr (coeff_ops<C>::exact)
            out.add_at(e, c * CQ(Rat(1) / factorial_rat(m / k - 1)));
        else
            out.add_at(e, c / CD(gamma_one_plus(m - k, k), 0.0));
    });
    return out;
}

template <class C>
Series<C> borel_ramified_k_inverse(const Series<C>& f, int k, const Var& var_in = "xi",
                                   const Var& var_out = "x") {
    if (k <= 0) throw std::invalid_argument("borel: level must be positive");
    Series<C> out = f.scale(coeff_ops<C>::zero());
    int vi = f.var_index(var_in);
    f.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        int m = e[vi] + k;
        if constexpr (coeff_ops<C>::exact) {
            if (m % k != 0)
                throw std::domain_error("borel: fractional Gamma value needs float mode");
            out.add_at(e, c * CQ(Rat(factorial_rat(m / k - 1))));
        } else {
            out.add_at(e, c * CD(gamma_one_plus(m - k, k), 0.0));
        }
    });
    return out.rename(var_in, var_out).shift_up(var_out, k);
}

// Series-level inverse of formal_borel_k (multiplies Gamma factors back).
inline SeriesD formal_laplace_k(const SeriesD& f, int k, const Var& var_in = "xi",
                                const Var& var_out = "x") {
    SeriesD out = f.scale(CD());
    f.for_each_nonzero([&](const std::vector<int>& e, const CD& c) {
        int n = e[f.var_index(var_in)] + k;
        out.add_at(e, c * CD(gamma_one_plus(n, k), 0.0));
    });
    return out.rename(var_in, var_out).shift_up(var_out, k);
}

// Ramification rho_k: forward divides exponents by k, inverse multiplies.
template <class C>
Series<C> ramify(const Series<C>& f, int k, bool forward, const Var& var = "xi") {
    if (k <= 0) throw std::invalid_argument("ramify: level must be positive");
    if (k == 1) return f;
    int vi = f.var_index(var);
    std::vector<Var> vars = f.vars();
    std::vector<int> nb(vars.size());
    for (std::size_t i = 0; i < vars.size(); ++i) nb[i] = f.bound(vars[i]);
    if (forward) nb[vi] = nb[vi] / k;
    else nb[vi] = std::min(nb[vi] * k + (k - 1), kOrderCap);
    Series<C> out(vars, nb);
    for (std::size_t i = 0; i < vars.size(); ++i)
        out = out.with_exact(vars[i], f.exact(vars[i]));
    f.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
        std::vector<int> d = e;
        if (forward) {
            if (e[vi] % k != 0)
                throw std::domain_error("ramify: exponent not divisible by level");
            d[vi] = e[vi] / k;
        } else {
            d[vi] = e[vi] * k;
        }
        out.add_at(d, c);
    });
    return out;
}

}  // namespace summa
