#pragma once

// Dense truncated multivariate power series over an exact or floating
// coefficient field.  A series carries, per variable:
//   bound : inclusive maximal stored exponent,
//   exact : whether every coefficient beyond the bound is known to be zero
//           (polynomial tail), so the bound may be extended freely,
//   lval  : a declared lower bound on the valuation of the represented
//           object (0 when nothing is promised).
// Binary operations intersect validity boxes; products use the valuation
// promises to push the certified order past the naive minimum.  Instances
// are treated as immutable once built; set() is for builders.

#include "summa/coeff.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace summa {

using Var = std::string;

constexpr int kOrderCap = 192;          // hard per-variable exponent cap
constexpr int kValInfinity = std::numeric_limits<int>::max();

inline int var_rank(const Var& v) {
    static const char* order[] = {"t", "s", "tau", "x", "z", "xi", "zeta",
                                  "u", "v", "w", "Y", "Z", "W"};
    for (int i = 0; i < static_cast<int>(sizeof(order) / sizeof(order[0])); ++i)
        if (v == order[i]) return i;
    return 1000;
}

inline bool var_less(const Var& a, const Var& b) {
    int ra = var_rank(a), rb = var_rank(b);
    return ra != rb ? ra < rb : a < b;
}

template <class C>
class Series {
public:
    using ops = coeff_ops<C>;

    Series() : Series(std::vector<Var>{}, std::vector<int>{}) {}

    Series(std::vector<Var> vars, std::vector<int> bounds) {
        if (vars.size() != bounds.size())
            throw std::invalid_argument("series: vars/bounds size mismatch");
        std::vector<std::size_t> perm(vars.size());
        std::iota(perm.begin(), perm.end(), 0);
        std::sort(perm.begin(), perm.end(),
                  [&](std::size_t a, std::size_t b) { return var_less(vars[a], vars[b]); });
        for (std::size_t p : perm) {
            if (bounds[p] < 0 || bounds[p] > kOrderCap)
                throw std::invalid_argument("series: bound out of range for " + vars[p]);
            vars_.push_back(vars[p]);
            bound_.push_back(bounds[p]);
        }
        for (std::size_t i = 1; i < vars_.size(); ++i)
            if (vars_[i] == vars_[i - 1])
                throw std::invalid_argument("series: duplicate variable " + vars_[i]);
        exact_.assign(vars_.size(), true);
        lval_.assign(vars_.size(), 0);
        allocate();
    }

    static Series constant(const C& value) {
        Series s(std::vector<Var>{}, std::vector<int>{});
        s.c_[0] = value;
        return s;
    }

    static Series monomial(const std::vector<Var>& vars, const std::vector<int>& bounds,
                           const std::vector<std::pair<Var, int>>& exps, const C& value) {
        Series s(vars, bounds);
        std::vector<int> e(s.vars_.size(), 0);
        for (auto& [v, p] : exps) e[s.var_index(v)] = p;
        s.set(e, value);
        return s;
    }

    // ---- introspection -------------------------------------------------

    const std::vector<Var>& vars() const { return vars_; }
    int nvars() const { return static_cast<int>(vars_.size()); }
    bool has_var(const Var& v) const {
        return std::find(vars_.begin(), vars_.end(), v) != vars_.end();
    }
    int var_index(const Var& v) const {
        auto it = std::find(vars_.begin(), vars_.end(), v);
        if (it == vars_.end()) throw std::invalid_argument("series: unknown variable " + v);
        return static_cast<int>(it - vars_.begin());
    }
    int bound(const Var& v) const { return bound_[var_index(v)]; }
    bool exact(const Var& v) const { return exact_[var_index(v)]; }
    bool fully_exact() const {
        return std::all_of(exact_.begin(), exact_.end(), [](bool b) { return b; });
    }
    int declared_lval(const Var& v) const { return lval_[var_index(v)]; }
    unsigned flags() const { return flags_; }

    static constexpr unsigned kFlagDemoted = 1u;

    Series with_flags(unsigned f) const { Series s = *this; s.flags_ |= f; return s; }

    Series with_lval(const Var& v, int val) const {
        Series s = *this;
        s.lval_[s.var_index(v)] = std::max(s.lval_[s.var_index(v)], val);
        return s;
    }

    Series with_exact(const Var& v, bool e) const {
        Series s = *this;
        s.exact_[s.var_index(v)] = e;
        return s;
    }

    // Effective valuation promise usable in product certificates.
    int effective_lval(int vi) const {
        if (fully_exact()) {
            int known = known_valuation(vi);
            return known == kValInfinity ? kOrderCap : known;
        }
        return lval_[vi];
    }

    // ---- element access -------------------------------------------------

    const C& at(const std::vector<int>& exps) const {
        static const C zero = ops::zero();
        std::size_t idx;
        if (!offset(exps, idx)) return zero;
        return c_[idx];
    }

    const C& at(const std::vector<std::pair<Var, int>>& exps) const {
        std::vector<int> e(vars_.size(), 0);
        for (auto& [v, p] : exps) {
            if (!has_var(v)) {
                if (p != 0) { static const C zero = ops::zero(); return zero; }
                continue;
            }
            e[var_index(v)] = p;
        }
        return at(e);
    }

    // Brace lists of plain integers must keep resolving to the positional
    // form now that the named form exists alongside it.
    const C& at(std::initializer_list<int> exps) const {
        return at(std::vector<int>(exps));
    }

    void set(const std::vector<int>& exps, const C& value) {
        std::size_t idx;
        if (!offset(exps, idx))
            throw std::out_of_range("series: exponent outside truncation box");
        c_[idx] = value;
    }

    void set(const std::vector<std::pair<Var, int>>& exps, const C& value) {
        set(named_exponents(exps), value);
    }

    void set(std::initializer_list<int> exps, const C& value) {
        set(std::vector<int>(exps), value);
    }

    void add_at(const std::vector<int>& exps, const C& value) {
        std::size_t idx;
        if (!offset(exps, idx)) return;  // outside box: truncated away
        c_[idx] += value;
    }

    void add_at(const std::vector<std::pair<Var, int>>& exps, const C& value) {
        add_at(named_exponents(exps), value);
    }

    void add_at(std::initializer_list<int> exps, const C& value) {
        add_at(std::vector<int>(exps), value);
    }

    template <class F>
    void for_each(F&& fn) const {  // fn(exps, coeff) over the whole box
        std::vector<int> e(vars_.size(), 0);
        for (std::size_t i = 0; i < c_.size(); ++i) {
            fn(e, c_[i]);
            bump(e);
        }
    }

    template <class F>
    void for_each_nonzero(F&& fn) const {
        for_each([&](const std::vector<int>& e, const C& v) {
            if (!ops::is_zero(v)) fn(e, v);
        });
    }

    bool known_zero() const {
        return std::all_of(c_.begin(), c_.end(), [](const C& v) { return ops::is_zero(v); });
    }

    // ---- arithmetic -----------------------------------------------------

    friend Series operator+(const Series& a, const Series& b) { return combine(a, b, false); }
    friend Series operator-(const Series& a, const Series& b) { return combine(a, b, true); }

    Series operator-() const {
        Series r = *this;
        for (auto& v : r.c_) v = -v;
        return r;
    }

    Series scale(const C& k) const {
        Series r = *this;
        if (ops::is_zero(k)) { std::fill(r.c_.begin(), r.c_.end(), ops::zero()); return r; }
        for (auto& v : r.c_) v = v * k;
        return r;
    }

    friend Series operator*(const Series& a, const Series& b) {
        auto [pa, pb] = promote_pair(a, b);
        Series r = mul_shell(pa, pb);
        pa.for_each_nonzero([&](const std::vector<int>& ea, const C& ca) {
            pb.for_each_nonzero([&](const std::vector<int>& eb, const C& cb) {
                std::vector<int> e(ea.size());
                for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
                r.add_at(e, ca * cb);
            });
        });
        return r;
    }

    // d/dv; the certified order in v drops by one unless the tail is exact.
    Series derive(const Var& v) const {
        int vi = var_index(v);
        if (!exact_[vi] && bound_[vi] == 0)
            throw std::domain_error("series: derivative exhausts certified order in " + v);
        Series r = *this;
        std::fill(r.c_.begin(), r.c_.end(), ops::zero());
        if (!exact_[vi]) r.bound_[vi] = std::max(0, bound_[vi] - 1);
        r.lval_[vi] = std::max(0, lval_[vi] - 1);
        r.allocate();
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            if (e[vi] == 0) return;
            std::vector<int> d = e;
            d[vi] -= 1;
            r.add_at(d, c * ops::from_int(e[vi]));
        });
        return r;
    }

    // Antiderivative in v with zero constant term.
    Series integrate(const Var& v) const {
        int vi = var_index(v);
        Series r = *this;
        std::fill(r.c_.begin(), r.c_.end(), ops::zero());
        r.bound_[vi] = std::min(bound_[vi] + 1, kOrderCap);
        r.lval_[vi] = std::min(lval_[vi] + 1, kOrderCap);
        r.allocate();
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d = e;
            d[vi] += 1;
            r.add_at(d, c / ops::from_int(d[vi]));
        });
        return r;
    }

    // Multiplication by v^s (exponent shift up).
    Series shift_up(const Var& v, int s) const {
        if (s == 0) return *this;
        int vi = var_index(v);
        Series r = *this;
        std::fill(r.c_.begin(), r.c_.end(), ops::zero());
        r.bound_[vi] = std::min(bound_[vi] + s, kOrderCap);
        r.lval_[vi] = std::min(lval_[vi] + s, kOrderCap);
        r.allocate();
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d = e;
            d[vi] += s;
            r.add_at(d, c);
        });
        return r;
    }

    // Division by v^s; errors if any known coefficient below v^s is nonzero.
    Series shift_down(const Var& v, int s) const {
        if (s == 0) return *this;
        int vi = var_index(v);
        if (!exact_[vi] && bound_[vi] < s)
            throw std::domain_error("series: shift exhausts certified order in " + v);
        Series r = *this;
        std::fill(r.c_.begin(), r.c_.end(), ops::zero());
        r.bound_[vi] = exact_[vi] ? bound_[vi] : std::max(0, bound_[vi] - s);
        r.lval_[vi] = std::max(0, lval_[vi] - s);
        r.allocate();
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            if (e[vi] < s)
                throw std::domain_error("series: division by " + v + "^" +
                                        std::to_string(s) + " leaves a pole");
            std::vector<int> d = e;
            d[vi] -= s;
            r.add_at(d, c);
        });
        return r;
    }

    // Smallest exponent of v among nonzero stored coefficients; +inf sentinel
    // (kValInfinity) for the zero truncation.
    int valuation(const Var& v) const { return known_valuation(var_index(v)); }

    // Smallest total degree among nonzero stored coefficients.
    int total_valuation() const {
        int best = kValInfinity;
        for_each_nonzero([&](const std::vector<int>& e, const C&) {
            best = std::min(best, std::accumulate(e.begin(), e.end(), 0));
        });
        return best;
    }

    // ---- structure ------------------------------------------------------

    // Coefficient of v^e as a series in the remaining variables.
    Series slice(const Var& v, int e) const {
        int vi = var_index(v);
        std::vector<Var> nv;
        std::vector<int> nb;
        for (int i = 0; i < nvars(); ++i)
            if (i != vi) { nv.push_back(vars_[i]); nb.push_back(bound_[i]); }
        Series r(nv, nb);
        for (int i = 0, j = 0; i < nvars(); ++i)
            if (i != vi) { r.exact_[j] = exact_[i]; r.lval_[j] = lval_[i]; ++j; }
        r.allocate();
        if (e > bound_[vi] && !exact_[vi])
            throw std::out_of_range("series: slice exponent beyond certified order");
        if (e <= bound_[vi])
            for_each_nonzero([&](const std::vector<int>& ex, const C& c) {
                if (ex[vi] != e) return;
                std::vector<int> d;
                for (int i = 0; i < nvars(); ++i)
                    if (i != vi) d.push_back(ex[i]);
                r.add_at(d, c);
            });
        return r;
    }

    // Adds a variable (at exponent 0) with the given bound.
    Series lift(const Var& v, int bound, bool exact = true) const {
        if (has_var(v)) throw std::invalid_argument("series: lift over existing variable " + v);
        std::vector<Var> nv = vars_;
        std::vector<int> nb = bound_;
        nv.push_back(v);
        nb.push_back(bound);
        Series r(nv, nb);
        int vi = r.var_index(v);
        for (int i = 0; i < nvars(); ++i) {
            int j = r.var_index(vars_[i]);
            r.exact_[j] = exact_[i];
            r.lval_[j] = lval_[i];
        }
        r.exact_[vi] = exact;
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d(r.nvars(), 0);
            for (int i = 0; i < nvars(); ++i) d[r.var_index(vars_[i])] = e[i];
            r.add_at(d, c);
        });
        return r;
    }

    // Renames a variable; canonical ordering is restored.
    Series rename(const Var& from, const Var& to) const {
        int vi = var_index(from);
        std::vector<Var> nv = vars_;
        nv[vi] = to;
        Series r(nv, bound_);
        int ti = r.var_index(to);
        for (int i = 0; i < nvars(); ++i) {
            int j = (i == vi) ? ti : r.var_index(vars_[i]);
            r.exact_[j] = exact_[i];
            r.lval_[j] = lval_[i];
        }
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d(r.nvars(), 0);
            for (int i = 0; i < nvars(); ++i) d[(i == vi) ? ti : r.var_index(vars_[i])] = e[i];
            r.add_at(d, c);
        });
        return r;
    }

    // Restriction (or zero-padded extension where the tail is exact).
    // Dropping a nonzero coefficient demotes the exactness claim in v:
    // the restricted object can no longer certify that orders beyond the
    // new bound vanish.
    Series truncated(const Var& v, int new_bound) const {
        int vi = var_index(v);
        if (new_bound > bound_[vi] && !exact_[vi])
            throw std::out_of_range("series: cannot extend uncertified order in " + v);
        Series r = *this;
        std::fill(r.c_.begin(), r.c_.end(), ops::zero());
        r.bound_[vi] = std::min(new_bound, kOrderCap);
        r.allocate();
        bool dropped = false;
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            if (e[vi] > r.bound_[vi]) dropped = true;
            else r.add_at(e, c);
        });
        if (dropped) r.exact_[vi] = false;
        return r;
    }

    // Substitutes series (zero constant term) for a subset of variables.
    // The host series must be exact in every substituted slot.
    Series compose(const std::map<Var, Series>& subst) const {
        for (auto& [v, s] : subst) {
            if (!has_var(v)) throw std::invalid_argument("series: compose slot " + v + " absent");
            if (!exact_[var_index(v)])
                throw std::invalid_argument("series: compose slot " + v + " not exact");
            std::vector<int> zero_exp(s.vars_.size(), 0);
            if (!ops::is_zero(s.at(zero_exp)))
                throw std::domain_error("series: substituted series has nonzero constant term");
        }
        // Result frame: union of remaining host variables and substituent
        // variables. An exact slot raised to host power p contributes degree
        // up to p * bound; an inexact slot certifies no further than its own
        // bound (its weakest power, p = 1, already reaches it).
        std::vector<Var> nv;
        for (int i = 0; i < nvars(); ++i)
            if (!subst.count(vars_[i])) nv.push_back(vars_[i]);
        for (auto& [v, s] : subst)
            for (auto& w : s.vars_)
                if (std::find(nv.begin(), nv.end(), w) == nv.end()) nv.push_back(w);
        std::sort(nv.begin(), nv.end(), var_less);

        std::vector<int> nb(nv.size());
        std::vector<bool> ne(nv.size());
        for (std::size_t wi = 0; wi < nv.size(); ++wi) {
            const Var& w = nv[wi];
            long long grown = 0;
            long long certified = std::numeric_limits<long long>::max();
            if (has_var(w) && !subst.count(w)) {
                int hi = var_index(w);
                if (exact_[hi]) grown += bound_[hi];
                else certified = std::min(certified, static_cast<long long>(bound_[hi]));
            }
            for (auto& [v, s] : subst) {
                if (!s.has_var(w)) continue;
                int si = s.var_index(w);
                long long maxp = bound_[var_index(v)];
                if (s.exact_[si]) grown += maxp * s.bound_[si];
                else certified = std::min(certified, static_cast<long long>(s.bound_[si]));
            }
            if (certified != std::numeric_limits<long long>::max()) {
                nb[wi] = static_cast<int>(std::min(certified, static_cast<long long>(kOrderCap)));
                ne[wi] = false;
            } else if (grown > kOrderCap) {
                nb[wi] = kOrderCap;
                ne[wi] = false;
            } else {
                nb[wi] = static_cast<int>(grown);
                ne[wi] = true;
            }
        }
        Series shell(nv, nb);
        for (std::size_t wi = 0; wi < nv.size(); ++wi)
            shell.exact_[shell.var_index(nv[wi])] = ne[wi];

        // Power tables for each substituted slot.
        std::map<Var, std::vector<Series>> powers;
        for (auto& [v, s] : subst) {
            std::vector<Series> table;
            Series one = shell;  // zero series in the result frame
            one.c_[0] = ops::one();
            table.push_back(one);
            Series sp = promote_into(s, shell);
            int maxp = bound_[var_index(v)];
            for (int p = 1; p <= maxp; ++p) table.push_back(table.back() * sp);
            powers[v] = std::move(table);
        }

        Series acc = shell;
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            Series term = shell;
            term.c_[0] = c;
            std::vector<int> carry(acc.nvars(), 0);
            for (int i = 0; i < nvars(); ++i) {
                const Var& v = vars_[i];
                if (subst.count(v)) {
                    if (e[i] > 0) term = term * powers[v][e[i]];
                } else if (e[i] > 0) {
                    carry[acc.var_index(v)] += e[i];
                }
            }
            term.for_each_nonzero([&](const std::vector<int>& te, const C& tc) {
                std::vector<int> d = te;
                for (std::size_t i = 0; i < d.size(); ++i) d[i] += carry[i];
                acc.add_at(d, tc);
            });
        });
        // Exactness of the result also needs exact slots everywhere: products
        // above already intersect boxes, so the shell flags stand.
        return acc;
    }

    // Horner evaluation; VT is the value type (CD for numerics, CQ for exact).
    template <class VT>
    VT eval(const std::map<Var, VT>& point) const {
        for (auto& v : vars_)
            if (!point.count(v)) throw std::invalid_argument("series: missing value for " + v);
        return eval_rec<VT>(point, 0, 0);
    }

    Series<CD> to_float() const {
        Series<CD> r(vars_, bound_);
        for (int i = 0; i < nvars(); ++i) {
            r = r.with_exact(vars_[i], exact_[i]).with_lval(vars_[i], lval_[i]);
        }
        for_each_nonzero([&](const std::vector<int>& e, const C& c) { r.set(e, to_cd(c)); });
        return r.with_flags(flags_);
    }

    std::string to_string() const {
        std::string out;
        for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            if (!out.empty()) out += " + ";
            out += "(" + ops::to_string(c) + ")";
            for (int i = 0; i < nvars(); ++i)
                if (e[i] > 0) {
                    out += "*" + vars_[i];
                    if (e[i] > 1) out += "^" + std::to_string(e[i]);
                }
        });
        return out.empty() ? "0" : out;
    }

    // Agreement of all coefficients on the intersection of certified boxes.
    static bool equal_on_common(const Series& a, const Series& b) {
        auto [pa, pb] = promote_pair(a, b);
        Series diff = pa - pb;
        return diff.known_zero();
    }

private:
    template <class>
    friend class Series;

    std::vector<Var> vars_;
    std::vector<int> bound_;
    std::vector<bool> exact_;
    std::vector<int> lval_;
    std::vector<std::size_t> stride_;
    std::vector<C> c_;
    unsigned flags_ = 0;

    void allocate() {
        stride_.assign(vars_.size(), 1);
        std::size_t total = 1;
        for (int i = nvars() - 1; i >= 0; --i) {
            stride_[i] = total;
            total *= static_cast<std::size_t>(bound_[i] + 1);
            if (total > (1u << 22))
                throw std::length_error("series: truncation box too large");
        }
        c_.assign(total, ops::zero());
    }

    std::vector<int> named_exponents(const std::vector<std::pair<Var, int>>& exps) const {
        std::vector<int> e(vars_.size(), 0);
        for (auto& [v, p] : exps) e[var_index(v)] = p;  // unknown names throw
        return e;
    }

    bool offset(const std::vector<int>& exps, std::size_t& idx) const {
        if (exps.size() != vars_.size())
            throw std::invalid_argument("series: exponent tuple arity mismatch");
        std::size_t o = 0;
        for (int i = 0; i < nvars(); ++i) {
            if (exps[i] < 0) throw std::invalid_argument("series: negative exponent");
            if (exps[i] > bound_[i]) return false;
            o += static_cast<std::size_t>(exps[i]) * stride_[i];
        }
        idx = o;
        return true;
    }

    void bump(std::vector<int>& e) const {
        for (int i = nvars() - 1; i >= 0; --i) {
            if (++e[i] <= bound_[i]) return;
            e[i] = 0;
        }
    }

    int known_valuation(int vi) const {
        int best = kValInfinity;
        for_each_nonzero([&](const std::vector<int>& e, const C&) {
            best = std::min(best, e[vi]);
        });
        return best;
    }

    // Rebuilds s inside the variable frame of shell (bounds intersected).
    static Series promote_into(const Series& s, const Series& shell) {
        Series r = shell;
        std::fill(r.c_.begin(), r.c_.end(), ops::zero());
        for (int i = 0; i < s.nvars(); ++i) {
            int j = r.var_index(s.vars_[i]);
            r.lval_[j] = std::max(r.lval_[j], s.lval_[i]);
        }
        s.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d(r.nvars(), 0);
            for (int i = 0; i < s.nvars(); ++i) d[r.var_index(s.vars_[i])] = e[i];
            r.add_at(d, c);
        });
        return r;
    }

    // Common frame for binary operations (union vars, met bounds).
    static std::pair<Series, Series> promote_pair(const Series& a, const Series& b) {
        std::vector<Var> uv;
        for (auto& v : a.vars_) uv.push_back(v);
        for (auto& v : b.vars_)
            if (std::find(uv.begin(), uv.end(), v) == uv.end()) uv.push_back(v);
        std::sort(uv.begin(), uv.end(), var_less);

        std::vector<int> nb(uv.size());
        std::vector<bool> ne(uv.size());
        std::vector<int> la(uv.size(), 0), lb(uv.size(), 0);
        std::vector<bool> ea(uv.size()), eb(uv.size());
        std::vector<int> ba(uv.size()), bb(uv.size());
        for (std::size_t i = 0; i < uv.size(); ++i) {
            bool ina = a.has_var(uv[i]), inb = b.has_var(uv[i]);
            ba[i] = ina ? a.bound_[a.var_index(uv[i])] : 0;
            bb[i] = inb ? b.bound_[b.var_index(uv[i])] : 0;
            ea[i] = ina ? static_cast<bool>(a.exact_[a.var_index(uv[i])]) : true;
            eb[i] = inb ? static_cast<bool>(b.exact_[b.var_index(uv[i])]) : true;
            la[i] = ina ? a.lval_[a.var_index(uv[i])] : 0;
            lb[i] = inb ? b.lval_[b.var_index(uv[i])] : 0;
            if (ea[i] && eb[i]) { nb[i] = std::max(ba[i], bb[i]); ne[i] = true; }
            else if (ea[i]) { nb[i] = bb[i]; ne[i] = false; }
            else if (eb[i]) { nb[i] = ba[i]; ne[i] = false; }
            else { nb[i] = std::min(ba[i], bb[i]); ne[i] = false; }
        }
        Series pa(uv, nb), pb(uv, nb);
        for (std::size_t i = 0; i < uv.size(); ++i) {
            pa.exact_[i] = ne[i] || ea[i];
            pb.exact_[i] = ne[i] || eb[i];
            pa.lval_[i] = la[i];
            pb.lval_[i] = lb[i];
        }
        a.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d(uv.size(), 0);
            for (int i = 0; i < a.nvars(); ++i) d[pa.var_index(a.vars_[i])] = e[i];
            pa.add_at(d, c);
        });
        b.for_each_nonzero([&](const std::vector<int>& e, const C& c) {
            std::vector<int> d(uv.size(), 0);
            for (int i = 0; i < b.nvars(); ++i) d[pb.var_index(b.vars_[i])] = e[i];
            pb.add_at(d, c);
        });
        return {pa, pb};
    }

    static Series combine(const Series& a, const Series& b, bool subtract) {
        auto [pa, pb] = promote_pair(a, b);
        Series r = pa;
        for (int i = 0; i < r.nvars(); ++i) {
            r.exact_[i] = pa.exact_[i] && pb.exact_[i];
            r.lval_[i] = std::min(pa.lval_[i], pb.lval_[i]);
        }
        for (std::size_t i = 0; i < r.c_.size(); ++i)
            r.c_[i] = subtract ? pa.c_[i] - pb.c_[i] : pa.c_[i] + pb.c_[i];
        r.flags_ = pa.flags_ | pb.flags_;
        return r;
    }

    // Result frame for a product of two series sharing a variable frame.
    static Series mul_shell(const Series& a, const Series& b) {
        std::vector<int> nb(a.nvars());
        std::vector<bool> ne(a.nvars());
        for (int i = 0; i < a.nvars(); ++i) {
            long long cand = static_cast<long long>(kOrderCap);
            if (!a.exact_[i])
                cand = std::min(cand, static_cast<long long>(a.bound_[i]) + b.effective_lval(i));
            if (!b.exact_[i])
                cand = std::min(cand, static_cast<long long>(b.bound_[i]) + a.effective_lval(i));
            if (a.exact_[i] && b.exact_[i])
                cand = std::min(cand, static_cast<long long>(a.bound_[i]) + b.bound_[i]);
            nb[i] = static_cast<int>(std::min(cand, static_cast<long long>(kOrderCap)));
            ne[i] = a.exact_[i] && b.exact_[i] &&
                    (static_cast<long long>(a.bound_[i]) + b.bound_[i] <= kOrderCap);
        }
        Series r(a.vars_, nb);
        for (int i = 0; i < r.nvars(); ++i) {
            r.exact_[i] = ne[i];
            r.lval_[i] = std::min(a.lval_[i] + b.lval_[i], kOrderCap);
        }
        r.flags_ = a.flags_ | b.flags_;
        return r;
    }

    template <class VT>
    VT eval_rec(const std::map<Var, VT>& point, int vi, std::size_t base) const {
        if (vi == nvars()) return value_as<VT>(c_[base]);
        const VT& z = point.at(vars_[vi]);
        VT acc{};
        for (int e = bound_[vi]; e >= 0; --e)
            acc = acc * z + eval_rec<VT>(point, vi + 1, base + e * stride_[vi]);
        return acc;
    }

    template <class VT>
    static VT value_as(const C& c) {
        if constexpr (std::is_same_v<VT, C>) return c;
        else return to_cd(c);
    }
};

using SeriesQ = Series<CQ>;
using SeriesD = Series<CD>;

namespace detail {

// base^p with memoisation; p >= 1.
template <class C>
const Series<C>& cached_power(const Series<C>& base, int p, std::map<int, Series<C>>& cache) {
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
    if (p == 1) return cache.emplace(1, base).first->second;
    Series<C> r = cached_power(base, p - 1, cache) * base;
    return cache.emplace(p, std::move(r)).first->second;
}

}  // namespace detail

}  // namespace summa
