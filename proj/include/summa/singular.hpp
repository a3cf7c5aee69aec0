#pragma once

// Singular geometry of the Borel plane. The level-k convolution equation
// pins, for each t order n, the point xi_n = (n - b)/c, and analytic
// continuation is obstructed along the rays through these points and
// through 1/c. Because the level-k Borel variable lives on a k-th root
// cover, every complex value z contributes the k directions
// (arg z + 2 nu pi)/k for nu = 0..k-1. The 1/c family is kept separately
// as well: it is the angular limit of (n - b)/c as n grows, so the ray
// directions accumulate there.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <summa/coeff.hpp>
#include <summa/equation.hpp>

namespace summa {

template <class C>
struct SingularData {
    int k = 1;
    std::vector<C> xi_points;          // (n - b)/c for n = 1..N
    std::vector<double> directions;    // sorted, deduplicated, in [0, 2 pi)
    std::vector<double> accumulation;  // the 1/c family alone, same reduction
};

namespace detail {

inline double wrap_angle(double a) {
    const double two_pi = 2.0 * std::numbers::pi_v<double>;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    if (r >= two_pi) r = 0.0;
    return r;
}

inline void push_ray_family(std::vector<double>& out, const CD& z, int k) {
    const double base = std::arg(z);
    for (int nu = 0; nu < k; ++nu)
        out.push_back(wrap_angle((base + 2.0 * std::numbers::pi_v<double> * nu) / k));
}

inline void sort_dedup_angles(std::vector<double>& a, double tol) {
    std::sort(a.begin(), a.end());
    std::vector<double> out;
    for (double v : a)
        if (out.empty() || v - out.back() > tol) out.push_back(v);
    // Angles within tolerance of a full turn coincide with the front.
    while (out.size() > 1 &&
           2.0 * std::numbers::pi_v<double> - out.back() + out.front() <= tol)
        out.pop_back();
    a = std::move(out);
}

}  // namespace detail

template <class C>
SingularData<C> singular_scan(const C& b0, const C& c0, int k, int N) {
    using ops = coeff_ops<C>;
    if (k < 1) throw ArgumentError("level k must be a positive integer");
    if (N < 1) throw ArgumentError("singular scan needs at least one point");
    if (ops::is_zero(c0)) throw ArgumentError("degenerate leading coefficient: c(0) = 0");

    const double tol = 1e-12;
    SingularData<C> out;
    out.k = k;

    detail::push_ray_family(out.accumulation, CD(1.0, 0.0) / to_cd(c0), k);
    detail::sort_dedup_angles(out.accumulation, tol);

    out.directions = out.accumulation;
    out.xi_points.reserve(static_cast<std::size_t>(N));
    for (int n = 1; n <= N; ++n) {
        C xi = (ops::from_int(n) - b0) / c0;
        detail::push_ray_family(out.directions, to_cd(xi), k);
        out.xi_points.push_back(std::move(xi));
    }
    detail::sort_dedup_angles(out.directions, tol);
    return out;
}

}  // namespace summa
