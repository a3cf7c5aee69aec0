#pragma once
// Sector geometry in the Borel plane: sector specifications, the boundary
// distance function delta, and a certified lower bound for the divisor ratio
// |n - b - c xi^k| / (n + |xi|^k) over a sector.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include "summa/coeff.hpp"
#include "summa/equation.hpp"
#include "summa/singular.hpp"

namespace summa {

// A sector S(d, theta) = {xi : |arg xi - d| < theta}, optionally joined with
// the punctured disc 0 < |xi| < R at the origin, or carried at level k where
// the point set is S(d/k, theta/k) while (d, theta) remain the stored base
// parameters.
enum class SectorKind { pure, disc_joined, ramified };

struct SectorSpec {
    SectorKind kind = SectorKind::pure;
    double d = 0.0;      // bisecting direction, radians
    double theta = 1.0;  // half-opening, in (0, pi)
    double R = 0.0;      // joined disc radius; positive only for disc_joined
    int k = 1;           // ramification level, meaningful for ramified kind

    double xi_direction() const {
        return kind == SectorKind::ramified ? d / k : d;
    }
    double xi_half_opening() const {
        return kind == SectorKind::ramified ? theta / k : theta;
    }
};

inline void validate_sector(const SectorSpec& S) {
    if (!(S.theta > 0.0) || !(S.theta < std::numbers::pi))
        throw ArgumentError("sector half-opening must lie in (0, pi)");
    if (S.k < 1) throw ArgumentError("sector level must be a positive integer");
    if (S.kind == SectorKind::disc_joined) {
        if (!(S.R > 0.0))
            throw ArgumentError("a disc-joined sector needs a positive disc radius");
    } else if (S.R != 0.0) {
        throw ArgumentError("only disc-joined sectors carry a disc radius");
    }
}

namespace detail {

inline double wrap_two_pi(double a) {
    const double two_pi = 2.0 * std::numbers::pi;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

// Circular distance between two directions, in [0, pi].
inline double circular_distance(double a, double b) {
    const double two_pi = 2.0 * std::numbers::pi;
    double diff = std::fabs(wrap_two_pi(a) - wrap_two_pi(b));
    return std::min(diff, two_pi - diff);
}

// Distance from the point (x0, y0) to the horizontal ray {(x, y) : x >= xs}.
inline double distance_to_horizontal_ray(double x0, double y0, double xs, double y) {
    double dx = std::max(0.0, xs - x0);
    return std::hypot(dx, y0 - y);
}

// Distance from the point (x0, y0) to the vertical ray {(x, y) : y >= ys}
// (or y <= ys when `upward` is false) at abscissa x.
inline double distance_to_vertical_ray(double x0, double y0, double x, double ys,
                                       bool upward) {
    double dy = upward ? std::max(0.0, ys - y0) : std::max(0.0, y0 - ys);
    return std::hypot(x - x0, dy);
}

}  // namespace detail

// The boundary-distance weight delta(xi; S) in (0, 1] used by the exponential
// norms.  Pure sectors use the angular gap min(theta - |arg xi - d|, 1); a
// sector joined by a disc measures the distance from log xi to the boundary
// of Omega = {|Im eta - d| < theta} union {Re eta < ln R}, capped at 1.  For
// disc points outside the angular sector this reduces to min(1, ln R - ln|xi|).
inline double delta(CD xi, const SectorSpec& S) {
    validate_sector(S);
    if (xi == CD(0.0, 0.0))
        throw PreconditionError("delta is undefined at the origin");
    const double d = S.xi_direction();
    const double th = S.xi_half_opening();
    // Angle representative closest to the bisecting direction.
    const double y0 = d + std::remainder(std::arg(xi) - d, 2.0 * std::numbers::pi);
    const double angular_gap = th - std::fabs(y0 - d);

    if (S.kind != SectorKind::disc_joined) {
        if (angular_gap <= 0.0)
            throw PreconditionError("the point lies outside the sector");
        return std::min(angular_gap, 1.0);
    }

    const double x0 = std::log(std::abs(xi));
    const double ln_r = std::log(S.R);
    const bool in_disc = x0 < ln_r;
    if (angular_gap <= 0.0 && !in_disc)
        throw PreconditionError("the point lies outside the sector and the disc");

    // Boundary of Omega: two horizontal rays Im = d +- theta starting at
    // Re = ln R, and two vertical rays Re = ln R above and below the strip.
    double dist = detail::distance_to_horizontal_ray(x0, y0, ln_r, d + th);
    dist = std::min(dist, detail::distance_to_horizontal_ray(x0, y0, ln_r, d - th));
    dist = std::min(dist, detail::distance_to_vertical_ray(x0, y0, ln_r, d + th, true));
    dist = std::min(dist, detail::distance_to_vertical_ray(x0, y0, ln_r, d - th, false));
    return std::min(dist, 1.0);
}

namespace detail {

// Minimum of m(R)^2 = (a0 - 2 a1 R + a2 R^2) / (n + R)^2 over R in [0, cap]
// (cap < 0 means an unbounded range).  The numerator is |A - gamma R|^2 with
// a0 = |A|^2, a1 = Re(conj(A) gamma), a2 = |gamma|^2, so the only interior
// critical point is R* = (a0 + a1 n) / (a1 + a2 n).
inline double ray_min_squared(double a0, double a1, double a2, double n, double cap) {
    auto value = [&](double r) {
        double num = std::max(0.0, a0 - 2.0 * a1 * r + a2 * r * r);
        double den = n + r;
        return num / (den * den);
    };
    double best = value(0.0);
    if (cap >= 0.0) {
        best = std::min(best, value(cap));
    } else {
        best = std::min(best, a2);  // limit as R -> infinity
    }
    double denom = a1 + a2 * n;
    if (denom > 0.0) {
        double rstar = (a0 + a1 * n) / denom;
        if (rstar > 0.0 && (cap < 0.0 || rstar < cap))
            best = std::min(best, value(rstar));
    }
    return best;
}

}  // namespace detail

// Certified lower bound sigma for the divisor estimate
//     |n - b0 - c0 xi^k| >= sigma (n + |xi^k|)   for all n >= 1, xi in S.
// The minimum over each ray arg(xi^k) = psi is evaluated in closed form; psi
// runs over a uniform grid whose spacing is compensated by a Lipschitz slack,
// and orders n > n_max are covered by the analytic tail bound
// inf_rho |1 - c0 e^{i psi} rho|/(1 + rho) - |b0|/(n_max + 1).
inline double sigma_bound(CD b0, CD c0, int k, const SectorSpec& S, int n_max = 50,
                          int grid = 20001) {
    validate_sector(S);
    if (k < 1) throw ArgumentError("the level k must be a positive integer");
    if (S.kind == SectorKind::ramified && S.k != k)
        throw ArgumentError("the sector level disagrees with the requested level");
    if (n_max < 1) throw ArgumentError("n_max must be at least 1");
    if (grid < 2) throw ArgumentError("the direction grid needs at least two points");
    if (c0 == CD(0.0, 0.0))
        throw PreconditionError("degenerate leading coefficient: c(0) = 0");

    const double d_xi = S.xi_direction();
    const double th_xi = S.xi_half_opening();
    const double abs_b = std::abs(b0);
    const double abs_c = std::abs(c0);
    const double rk = S.kind == SectorKind::disc_joined ? std::pow(S.R, k) : 0.0;

    // The closure of the sector must avoid every singular direction, and a
    // joined disc must not reach the smallest singular point.
    int scan_n = std::max(n_max, static_cast<int>(std::ceil(abs_b + abs_c * rk)) + 2);
    SingularData<CD> sing = singular_scan<CD>(b0, c0, k, scan_n);
    for (double dir : sing.directions)
        if (detail::circular_distance(dir, d_xi) <= th_xi)
            throw PreconditionError("the sector contains a singular direction");
    for (double dir : sing.accumulation)
        if (detail::circular_distance(dir, d_xi) <= th_xi)
            throw PreconditionError("the sector contains the accumulation direction");
    if (S.kind == SectorKind::disc_joined)
        for (int n = 1; n <= scan_n; ++n)
            if (std::abs((static_cast<double>(n) - b0) / c0) <= rk)
                throw PreconditionError("the joined disc contains a singular point");

    // One scan of the closed psi-interval [lo, hi]: minimum over n <= n_max of
    // the per-ray closed form plus the n > n_max tail, all Lipschitz in psi
    // with constant |c0|, so half a grid step of slack certifies the bound.
    auto scan_interval = [&](double lo, double hi, double cap) {
        double step = (hi - lo) / (grid - 1);
        double best = std::numeric_limits<double>::infinity();
        for (int g = 0; g < grid; ++g) {
            double psi = lo + step * g;
            CD gamma = c0 * std::polar(1.0, psi);
            double a2 = abs_c * abs_c;
            for (int n = 1; n <= n_max; ++n) {
                CD head = static_cast<double>(n) - b0;
                double a0 = std::norm(head);
                double a1 = (std::conj(head) * gamma).real();
                double m2 = detail::ray_min_squared(a0, a1, a2, n, cap);
                best = std::min(best, std::sqrt(m2));
            }
            double tail2 = detail::ray_min_squared(1.0, gamma.real(), a2, 1.0, cap);
            best = std::min(best, std::sqrt(tail2) - abs_b / (n_max + 1));
        }
        return best - abs_c * step / 2.0;
    };

    double sigma = scan_interval(k * (d_xi - th_xi), k * (d_xi + th_xi), -1.0);
    if (S.kind == SectorKind::disc_joined) {
        double disc_sigma = scan_interval(0.0, 2.0 * std::numbers::pi, rk);
        sigma = std::min(sigma, disc_sigma);
    }
    if (!(sigma > 0.0))
        throw PreconditionError("the divisor ratio infimum vanishes on this sector");
    return sigma;
}

inline double sigma_bound(const CQ& b0, const CQ& c0, int k, const SectorSpec& S,
                          int n_max = 50, int grid = 20001) {
    return sigma_bound(to_cd(b0), to_cd(c0), k, S, n_max, grid);
}

}  // namespace summa
