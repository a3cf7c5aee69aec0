#pragma once
// Numerical continuation of the order-n convolution equation along a ray.
// The model problem is
//     (xi - xi_n) psi(xi) = B*psi(xi) + C*(xi psi)(xi) + F(xi),
// with * the additive convolution int_0^xi f(xi - tau) g(tau) dtau.  The
// march discretizes the ray xi = s e^{id} with a uniform step and the
// product-trapezoid rule, solving one scalar implicit equation per node, and
// attaches a step-halving error estimate.  It serves as a continuation oracle
// independent of Taylor or Pade data.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "summa/coeff.hpp"
#include "summa/equation.hpp"

namespace summa {

struct RaySpec {
    double direction = 0.0;        // d: the ray is xi = s e^{id}, s in [0, L]
    double step = 1.0 / 1024.0;    // h: uniform arclength step
    double length = 1.0;           // L: total arclength
};

struct RaySamples {
    double direction = 0.0;
    std::vector<double> s;     // arclength nodes, s_q = q h
    std::vector<CD> psi;       // solution samples at s_q e^{id}
    std::vector<double> err;   // per-node step-halving error estimates
    double err_max = 0.0;
};

using RayFunction = std::function<CD(CD)>;

namespace detail {

inline double distance_to_ray_segment(CD p, double direction, double length) {
    CD eid = std::polar(1.0, direction);
    double t = std::clamp((p * std::conj(eid)).real(), 0.0, length);
    return std::abs(p - eid * t);
}

// One product-trapezoid march at fixed step: the half-weight at the current
// node is implicit, so each step solves one linear scalar equation.
inline std::vector<CD> volterra_march(const RayFunction& B, const RayFunction& C,
                                      const RayFunction& F, CD xi_n,
                                      double direction, double h, int nodes) {
    const CD eid = std::polar(1.0, direction);
    std::vector<CD> xi(nodes), bv(nodes), cv(nodes), fv(nodes), psi(nodes);
    for (int q = 0; q < nodes; ++q) {
        xi[q] = eid * (h * q);
        bv[q] = B(xi[q]);
        cv[q] = C(xi[q]);
        fv[q] = F(xi[q]);
    }
    psi[0] = -fv[0] / xi_n;
    for (int q = 1; q < nodes; ++q) {
        CD acc = 0.5 * bv[q] * psi[0];  // xi_0 = 0 kills the C-side half term
        for (int r = 1; r < q; ++r) acc += (bv[q - r] + cv[q - r] * xi[r]) * psi[r];
        CD denom = (xi[q] - xi_n) - eid * h * 0.5 * (bv[0] + cv[0] * xi[q]);
        if (denom == CD(0.0, 0.0))
            throw TruncationError("the implicit trapezoid step is singular");
        psi[q] = (fv[q] + eid * h * acc) / denom;
    }
    return psi;
}

}  // namespace detail

inline RaySamples volterra_solve(const RayFunction& B, const RayFunction& C,
                                 const RayFunction& F, CD xi_n, const RaySpec& ray) {
    if (!(ray.step > 0.0)) throw ArgumentError("the ray step must be positive");
    if (!(ray.length >= ray.step))
        throw ArgumentError("the ray must be at least one step long");
    if (xi_n == CD(0.0, 0.0))
        throw PreconditionError("the singular point sits at the ray origin");
    double dist = detail::distance_to_ray_segment(xi_n, ray.direction, ray.length);
    if (dist < 10.0 * ray.step)
        throw PreconditionError("the ray passes within ten steps of the singular point");

    int spans = static_cast<int>(std::floor(ray.length / ray.step + 1e-9));
    std::vector<CD> coarse =
        detail::volterra_march(B, C, F, xi_n, ray.direction, ray.step, spans + 1);
    std::vector<CD> fine = detail::volterra_march(B, C, F, xi_n, ray.direction,
                                                  ray.step / 2.0, 2 * spans + 1);

    RaySamples out;
    out.direction = ray.direction;
    out.s.resize(spans + 1);
    out.psi.resize(spans + 1);
    out.err.resize(spans + 1);
    for (int q = 0; q <= spans; ++q) {
        out.s[q] = ray.step * q;
        out.psi[q] = fine[2 * q];
        out.err[q] = std::abs(coarse[q] - fine[2 * q]) / 3.0;
        out.err_max = std::max(out.err_max, out.err[q]);
        if (!std::isfinite(out.psi[q].real()) || !std::isfinite(out.psi[q].imag()))
            throw TruncationError("the step refinement did not converge");
    }
    return out;
}

// The per-order recursion carries the divisor (n - b0 - c0 xi); dividing by
// -c0 turns it into the (xi - xi_n) model form solved above.  This wrapper
// performs that mapping, so callers can hand over the recursion data as is.
struct VolterraProblem {
    RayFunction B, C, F;
    CD xi_n{};
};

inline VolterraProblem lemma_form_from_family(RayFunction B, RayFunction C,
                                              RayFunction F, CD b0, CD c0, int n) {
    if (n < 1) throw ArgumentError("the family index n must be at least 1");
    if (c0 == CD(0.0, 0.0))
        throw PreconditionError("degenerate leading coefficient: c(0) = 0");
    CD scale = CD(-1.0, 0.0) / c0;
    VolterraProblem out;
    out.B = [scale, B = std::move(B)](CD xi) { return scale * B(xi); };
    out.C = [scale, C = std::move(C)](CD xi) { return scale * C(xi); };
    out.F = [scale, F = std::move(F)](CD xi) { return scale * F(xi); };
    out.xi_n = (CD(static_cast<double>(n), 0.0) - b0) / c0;
    return out;
}

inline std::string ray_samples_to_csv(const RaySamples& samples) {
    std::string out = "s,re_psi,im_psi,err_est\n";
    char line[160];
    for (std::size_t q = 0; q < samples.s.size(); ++q) {
        std::snprintf(line, sizeof line, "%.17g,%.17g,%.17g,%.9g\n", samples.s[q],
                      samples.psi[q].real(), samples.psi[q].imag(), samples.err[q]);
        out += line;
    }
    return out;
}

}  // namespace summa
