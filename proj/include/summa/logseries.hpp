#pragma once

// Local expansions around a singular point xi_n carrying logarithms:
//   value(xi) = sum over terms of  w^{-p} * S(w) * Lambda^m,   w = xi - xi_n,
// where Lambda = log(1 - xi/xi_n) on the principal branch (the branch that
// vanishes at xi = 0 and is analytic off the ray through xi_n).  Pole orders
// are restricted to {0,1} and log powers kept distinct per object.

#include "summa/series.hpp"

#include <complex>
#include <stdexcept>
#include <vector>

namespace summa {

struct LogTerm {
    int log_power = 0;   // exponent m of Lambda
    int pole_order = 0;  // 0 or 1: divide by w^pole_order
    SeriesD part{std::vector<Var>{"w"}, std::vector<int>{0}};
};

class LogSeries {
public:
    explicit LogSeries(CD base_point) : base_(base_point) {}

    const CD& base_point() const { return base_; }
    const std::vector<LogTerm>& terms() const { return terms_; }

    void add_term(int log_power, int pole_order, SeriesD part) {
        if (log_power < 0) throw std::invalid_argument("log series: negative log power");
        if (pole_order < 0 || pole_order > 1)
            throw std::invalid_argument("log series: pole order must be 0 or 1");
        for (auto& t : terms_)
            if (t.log_power == log_power && t.pole_order == pole_order) {
                t.part = t.part + part;
                return;
            }
        terms_.push_back({log_power, pole_order, std::move(part)});
    }

    bool empty() const {
        for (auto& t : terms_)
            if (!t.part.known_zero()) return false;
        return true;
    }

    int max_log_power() const {
        int m = 0;
        for (auto& t : terms_)
            if (!t.part.known_zero()) m = std::max(m, t.log_power);
        return m;
    }

    // Pointwise value; xi must avoid the branch ray {s*xi_n : s >= 1}.
    CD eval(CD xi) const {
        CD w = xi - base_;
        if (std::abs(w) == 0.0)
            throw std::domain_error("log series: evaluation at the singular point");
        CD lambda = std::log(CD(1.0, 0.0) - xi / base_);
        CD total(0.0, 0.0);
        for (auto& t : terms_) {
            CD v = t.part.eval<CD>({{Var("w"), w}});
            for (int i = 0; i < t.log_power; ++i) v *= lambda;
            if (t.pole_order == 1) v /= w;
            total += v;
        }
        return total;
    }

private:
    CD base_;
    std::vector<LogTerm> terms_;
};

}  // namespace summa
