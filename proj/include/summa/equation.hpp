#pragma once

// Problem instances: the singular first-order PDE
//
//   t du/dt = a(x) t + b(x) u + x^{k+1} c(x) du/dx
//             + sum_{i+j+alpha >= 2} a_{i,j,alpha}(x) t^i u^j (du/dx)^alpha,
//   u(0, x) = 0,
//
// together with validation, the solvability conditions on the nonlinear
// coefficients, and the error taxonomy shared by every engine layer.

#include "summa/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace summa {

// ---- error taxonomy -------------------------------------------------------
//
// Exit codes: 2 = malformed input (arguments, JSON, schema), 3 = violated
// mathematical precondition (resonance, degenerate leading coefficient,
// singular direction), 4 = numerical or truncation failure.

class EngineError : public std::runtime_error {
  public:
    EngineError(const std::string& msg, int code) : std::runtime_error(msg), code_(code) {}
    int exit_code() const { return code_; }

  private:
    int code_;
};

class ArgumentError : public EngineError {
  public:
    explicit ArgumentError(const std::string& msg) : EngineError(msg, 2) {}
};

class PreconditionError : public EngineError {
  public:
    explicit PreconditionError(const std::string& msg) : EngineError(msg, 3) {}
};

class TruncationError : public EngineError {
  public:
    explicit TruncationError(const std::string& msg) : EngineError(msg, 4) {}
};

// ---- equation model -------------------------------------------------------

template <class C>
struct NonlinearTerm {
    int i = 0;
    int j = 0;
    int alpha = 0;
    Series<C> coeff{std::vector<Var>{"x"}, std::vector<int>{0}};
};

template <class C>
struct EquationSpec {
    int k = 1;
    Series<C> a{std::vector<Var>{"x"}, std::vector<int>{0}};
    Series<C> b{std::vector<Var>{"x"}, std::vector<int>{0}};
    Series<C> c{std::vector<Var>{"x"}, std::vector<int>{0}};
    std::vector<NonlinearTerm<C>> nonlinear;
    int trunc_t = 8;
    int trunc_x = 8;
    // When set, every nonlinear derivative factor is (x du/dx) instead of
    // (du/dx); the preparation transform emits specs in this form.
    bool nonlinear_xdx = false;
    bool allow_resonance = false;

    C b0() const { return b.nvars() ? b.at(std::vector<int>(b.nvars(), 0)) : C{}; }
    C c0() const { return c.nvars() ? c.at(std::vector<int>(c.nvars(), 0)) : C{}; }
};

using EquationSpecQ = EquationSpec<CQ>;
using EquationSpecD = EquationSpec<CD>;

namespace detail {

inline bool is_positive_integer(const CQ& z) {
    return z.im == 0 && z.re > 0 && boost::multiprecision::denominator(z.re) == 1;
}

inline bool is_positive_integer(const CD& z) {
    if (z.imag() != 0.0 || z.real() <= 0.0) return false;
    return z.real() == std::floor(z.real());
}

template <class C>
void require_x_series(const Series<C>& s, const std::string& what) {
    for (auto& v : s.vars())
        if (v != Var("x"))
            throw ArgumentError(what + " must be a series in x alone, found variable " + v);
}

}  // namespace detail

// Structural and mathematical validation. Structural faults are argument
// errors; c(0) = 0 and resonance are mathematical preconditions.
template <class C>
void validate_spec(const EquationSpec<C>& eq) {
    if (eq.k < 1) throw ArgumentError("level k must be a positive integer");
    if (eq.trunc_t < 1 || eq.trunc_x < 1)
        throw ArgumentError("truncation orders must be positive");
    detail::require_x_series(eq.a, "coefficient a");
    detail::require_x_series(eq.b, "coefficient b");
    detail::require_x_series(eq.c, "coefficient c");
    for (auto& term : eq.nonlinear) {
        if (term.i < 0 || term.j < 0 || term.alpha < 0)
            throw ArgumentError("nonlinear indices must be nonnegative");
        if (term.i + term.j + term.alpha < 2)
            throw ArgumentError("nonlinear term (" + std::to_string(term.i) + "," +
                                std::to_string(term.j) + "," + std::to_string(term.alpha) +
                                ") has total order < 2");
        detail::require_x_series(term.coeff, "nonlinear coefficient");
    }
    if (coeff_ops<C>::is_zero(eq.c0()))
        throw PreconditionError("degenerate leading coefficient: c(0) = 0");
    if (!eq.allow_resonance && detail::is_positive_integer(eq.b0()))
        throw PreconditionError("resonance: b(0) in N*");
}

template <class C>
bool is_resonant(const EquationSpec<C>& eq) {
    return detail::is_positive_integer(eq.b0());
}

// ---- solvability conditions ----------------------------------------------
//
// condition_F:        b(0) not a positive integer and every nonlinear
//                     coefficient with a derivative factor vanishes at x = 0.
// condition_F_prime:  with q = min{ val a_{i,0,0} : i >= 2 } (infinite when
//                     no such term exists), every term with alpha > 0 has
//                     val(a_{i,j,alpha}) + j q > 0.

struct ConditionReport {
    bool condition_F = false;
    bool condition_F_prime = false;
    bool resonance = false;
    int q = kValInfinity;
    std::vector<std::tuple<int, int, int>> offending_terms;
};

template <class C>
ConditionReport check_conditions(const EquationSpec<C>& eq) {
    ConditionReport rep;
    rep.resonance = detail::is_positive_integer(eq.b0());

    for (auto& term : eq.nonlinear)
        if (term.i >= 2 && term.j == 0 && term.alpha == 0)
            rep.q = std::min(rep.q, term.coeff.valuation("x"));

    // Both conditions hinge on constant terms only: a term with
    // val(coeff) >= 1 passes val + j q > 0 for every admissible q >= 0, and
    // q = 0 happens exactly when some a_{i,0,0} has a nonzero constant term.
    bool f_ok = true;
    bool fp_ok = true;
    std::vector<std::tuple<int, int, int>> bad_f, bad_fp;
    for (auto& term : eq.nonlinear) {
        if (term.alpha == 0) continue;
        std::vector<int> origin(term.coeff.nvars(), 0);
        if (coeff_ops<C>::is_zero(term.coeff.at(origin))) continue;
        f_ok = false;
        bad_f.emplace_back(term.i, term.j, term.alpha);
        if (term.j == 0 || rep.q == 0) {
            fp_ok = false;
            bad_fp.emplace_back(term.i, term.j, term.alpha);
        }
    }
    rep.condition_F = !rep.resonance && f_ok;
    rep.condition_F_prime = !rep.resonance && fp_ok;
    rep.offending_terms = fp_ok ? bad_f : bad_fp;
    return rep;
}

// ---- mode conversion ------------------------------------------------------

inline EquationSpecD spec_to_float(const EquationSpecQ& eq) {
    EquationSpecD r;
    r.k = eq.k;
    r.a = eq.a.to_float();
    r.b = eq.b.to_float();
    r.c = eq.c.to_float();
    for (auto& term : eq.nonlinear)
        r.nonlinear.push_back({term.i, term.j, term.alpha, term.coeff.to_float()});
    r.trunc_t = eq.trunc_t;
    r.trunc_x = eq.trunc_x;
    r.nonlinear_xdx = eq.nonlinear_xdx;
    r.allow_resonance = eq.allow_resonance;
    return r;
}

}  // namespace summa
