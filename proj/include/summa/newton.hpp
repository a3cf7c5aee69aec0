#pragma once

// Newton polygon of the linearized operator
//
//   L = sum_i d/dz_i F(x, Phi) * delta^i,   delta = x d/dx,
//   Phi = (phi, delta phi, ..., delta^m phi),
//
// built from the x-valuations v_i of the linearization coefficients. The
// polygon is the lower convex boundary of the vertical half-lines rising
// from the points (i, v_i); its positive slopes govern the Gevrey class of
// formal solutions, and the operator is Fuchsian when the top slot has
// minimal valuation.

#include "summa/equation.hpp"
#include "summa/series.hpp"

#include <map>
#include <string>
#include <utility>
#include <vector>

namespace summa {

struct NewtonPolygon {
    std::vector<std::pair<int, int>> points;  // (i, v_i), finite slots only
    std::vector<Rat> slopes;                  // positive lower-hull slopes, ascending
    bool fuchsian = false;
    // Set when some linearization coefficient is zero through its certified
    // order without being exactly zero: its true valuation may exceed the
    // truncation, so the polygon is a truncation-level reading.
    bool order_limited = false;

    bool gevrey_admissible(int k) const {
        for (auto& s : slopes)
            if (s > 0 && s < k) return false;
        return true;
    }
};

namespace detail {

inline Var slot_name(int i) { return "z" + std::to_string(i); }

// delta^i phi for i = 0..m, delta = x d/dx.
template <class C>
std::vector<Series<C>> delta_tower(const Series<C>& phi, int m) {
    std::vector<Series<C>> tower{phi};
    for (int i = 1; i <= m; ++i)
        tower.push_back(tower.back().derive("x").shift_up("x", 1));
    return tower;
}

}  // namespace detail

// F is a series in x and slot variables z0..zm (any subset); phi a series in
// x with phi(0) = 0. Valuations are read off d/dz_i F(x, Phi).
template <class C>
NewtonPolygon newton_polygon(const Series<C>& F, const Series<C>& phi) {
    int m = -1;
    for (auto& v : F.vars()) {
        if (v.size() >= 2 && v[0] == 'z') {
            bool digits = true;
            for (std::size_t p = 1; p < v.size(); ++p)
                digits = digits && v[p] >= '0' && v[p] <= '9';
            if (digits) m = std::max(m, std::stoi(v.substr(1)));
        }
    }
    if (m < 0) throw ArgumentError("operator has no slot variables z0..zm");

    auto tower = detail::delta_tower(phi, m);

    NewtonPolygon poly;
    for (int i = 0; i <= m; ++i) {
        if (!F.has_var(detail::slot_name(i))) continue;
        Series<C> gi = F.derive(detail::slot_name(i));
        std::map<Var, Series<C>> subst;
        for (int j = 0; j <= m; ++j)
            if (gi.has_var(detail::slot_name(j))) subst[detail::slot_name(j)] = tower[j];
        Series<C> coeff = subst.empty() ? gi : gi.compose(subst);
        if (coeff.known_zero()) {
            if (!coeff.fully_exact()) poly.order_limited = true;
            continue;  // slot absent (or undecidable) at this truncation
        }
        int v = coeff.has_var("x") ? coeff.valuation("x") : 0;
        poly.points.emplace_back(i, v);
    }
    if (poly.points.empty())
        throw TruncationError("newton polygon undecidable: all valuations infinite at this truncation");

    // Fuchsian test: the top finite slot index present in F is the operator
    // order; it must attain the minimal valuation.
    int top_i = poly.points.back().first;
    int top_v = poly.points.back().second;
    poly.fuchsian = top_i == m;
    for (auto& [i, v] : poly.points) poly.fuchsian = poly.fuchsian && top_v <= v;

    // Lower convex hull, left to right (monotone chain on the point list,
    // which is already sorted by slot index).
    std::vector<std::pair<int, int>> hull;
    for (auto& p : poly.points) {
        while (hull.size() >= 2) {
            auto& a = hull[hull.size() - 2];
            auto& b = hull[hull.size() - 1];
            long long cross = static_cast<long long>(b.first - a.first) * (p.second - a.second) -
                              static_cast<long long>(b.second - a.second) * (p.first - a.first);
            if (cross <= 0)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    for (std::size_t i = 1; i < hull.size(); ++i) {
        Rat s = Rat(Int(hull[i].second - hull[i - 1].second), Int(hull[i].first - hull[i - 1].first));
        if (s > 0) poly.slopes.push_back(s);
    }
    return poly;
}

}  // namespace summa
