// Tests for the Borel-plane layer: singular point scans, ray direction
// reporting, the per-order convolution families, and their residuals.

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "summa/borel_family.hpp"
#include "summa/coeff.hpp"
#include "summa/json_io.hpp"
#include "summa/perturbation.hpp"
#include "summa/sector.hpp"
#include "summa/volterra.hpp"
#include "summa/singular.hpp"

using namespace summa;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::MessageMatches;

namespace {

constexpr double kPi = std::numbers::pi_v<double>;

EquationSpecQ euler_spec(int nt = 8, int nx = 8) {
    EquationSpecQ eq;
    eq.k = 1;
    eq.a = parse_polynomial("x");
    eq.b = parse_polynomial("0");
    eq.c = parse_polynomial("1");
    eq.trunc_t = nt;
    eq.trunc_x = nx;
    return eq;
}

// A fully loaded normal-form instance: varying b and c, a quadratic
// self-coupling with varying coefficient, a mixed derivative coupling with
// a constant slot, and a pure forcing coupling at t^3.
EquationSpecQ loaded_normal_form_spec(int nt = 7, int nx = 7) {
    EquationSpecQ eq;
    eq.k = 1;
    eq.a = parse_polynomial("x");
    eq.b = parse_polynomial("1/2 x");
    eq.c = parse_polynomial("1 + x");
    eq.nonlinear.push_back({0, 2, 0, parse_polynomial("1 + x")});
    eq.nonlinear.push_back({1, 1, 1, parse_polynomial("1")});
    eq.nonlinear.push_back({3, 0, 0, parse_polynomial("x^2")});
    eq.nonlinear_xdx = true;
    eq.trunc_t = nt;
    eq.trunc_x = nx;
    return eq;
}

// Level-2 instance living on the x^2 grid, so exact arithmetic applies.
EquationSpecQ level_two_spec(int nt = 6, int nx = 10) {
    EquationSpecQ eq;
    eq.k = 2;
    eq.a = parse_polynomial("x^2");
    eq.b = parse_polynomial("1/3 x^2");
    eq.c = parse_polynomial("1 + x^2");
    eq.nonlinear.push_back({0, 2, 0, parse_polynomial("x^2")});
    eq.nonlinear_xdx = true;
    eq.trunc_t = nt;
    eq.trunc_x = nx;
    return eq;
}

}  // namespace

TEST_CASE("integer singular points on the positive axis") {
    auto data = singular_scan<CQ>(CQ(0), CQ(1), 1, 12);
    REQUIRE(data.directions.size() == 1);
    CHECK(data.directions[0] == 0.0);
    REQUIRE(data.accumulation.size() == 1);
    CHECK(data.accumulation[0] == 0.0);
    REQUIRE(data.xi_points.size() == 12);
    for (int n = 1; n <= 12; ++n) CHECK(data.xi_points[n - 1] == CQ(n));
}

TEST_CASE("level two splits each ray into two opposite rays") {
    auto data = singular_scan<CQ>(CQ(0), CQ(1), 2, 8);
    REQUIRE(data.directions.size() == 2);
    CHECK(data.directions[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(data.directions[1] == Catch::Approx(kPi).margin(1e-12));
    REQUIRE(data.accumulation.size() == 2);
    CHECK(data.accumulation[0] == Catch::Approx(0.0).margin(1e-12));
    CHECK(data.accumulation[1] == Catch::Approx(kPi).margin(1e-12));
}

TEST_CASE("imaginary leading coefficient rotates the singular ray") {
    auto data = singular_scan<CQ>(CQ(rat(1, 2)), CQ(Rat(0), Rat(1)), 1, 5);
    REQUIRE(data.directions.size() == 1);
    CHECK(data.directions[0] == Catch::Approx(3 * kPi / 2).margin(1e-12));
    for (int n = 1; n <= 5; ++n) {
        // (n - 1/2)/i = -i (n - 1/2).
        CHECK(data.xi_points[n - 1] == CQ(Rat(0), -(Rat(n) - rat(1, 2))));
    }
}

TEST_CASE("directions are invariant under positive scaling of c") {
    auto base = singular_scan<CQ>(CQ(rat(1, 3)), CQ(Rat(2), Rat(5)), 2, 9);
    auto scaled = singular_scan<CQ>(CQ(rat(1, 3)), CQ(Rat(6), Rat(15)), 2, 9);
    REQUIRE(base.directions.size() == scaled.directions.size());
    for (std::size_t i = 0; i < base.directions.size(); ++i)
        CHECK(base.directions[i] == Catch::Approx(scaled.directions[i]).margin(1e-12));
    // The singular points themselves shrink by the scale factor.
    for (std::size_t i = 0; i < base.xi_points.size(); ++i)
        CHECK(scaled.xi_points[i] * CQ(3) == base.xi_points[i]);
}

TEST_CASE("direction lists are sorted, deduplicated, and reduced mod 2 pi") {
    auto data = singular_scan<CD>(CD(0.25, -0.75), CD(-1.1, 0.4), 3, 40);
    REQUIRE(!data.directions.empty());
    for (std::size_t i = 0; i < data.directions.size(); ++i) {
        CHECK(data.directions[i] >= 0.0);
        CHECK(data.directions[i] < 2 * kPi);
        if (i > 0) CHECK(data.directions[i] > data.directions[i - 1] + 1e-12);
    }
    // Every accumulation ray already appears in the full direction list.
    for (double acc : data.accumulation) {
        bool found = false;
        for (double d : data.directions)
            found = found || std::abs(d - acc) <= 1e-9 ||
                    std::abs(std::abs(d - acc) - 2 * kPi) <= 1e-9;
        CHECK(found);
    }
}

TEST_CASE("singular scan argument validation") {
    CHECK_THROWS_MATCHES(singular_scan<CQ>(CQ(0), CQ(1), 0, 5), ArgumentError,
                         MessageMatches(ContainsSubstring("level")));
    CHECK_THROWS_MATCHES(singular_scan<CQ>(CQ(0), CQ(1), 1, 0), ArgumentError,
                         MessageMatches(ContainsSubstring("at least one")));
    CHECK_THROWS_MATCHES(singular_scan<CQ>(CQ(0), CQ(0), 1, 5), ArgumentError,
                         MessageMatches(ContainsSubstring("c(0) = 0")));
}

TEST_CASE("multiplier convolution matches the closed-form weights") {
    // Level 1: the transform of x is 1, and 1 * 1 = xi.
    BorelMultiplier<CQ> f{parse_polynomial("x"), 1};
    SeriesQ one({"xi"}, {4});
    one.set({{"xi", 0}}, CQ(1));
    SeriesQ conv = convolve_multiplier(f, one);
    CHECK(conv.at({{"xi", 0}}) == CQ(0));
    CHECK(conv.at({{"xi", 1}}) == CQ(1));
    CHECK(conv.at({{"xi", 2}}) == CQ(0));

    // Level 2, float: x against the grid constant weighs 1/Gamma(3/2).
    BorelMultiplier<CD> g{parse_polynomial("x").to_float(), 2};
    SeriesD oned({"xi"}, {4});
    oned.set({{"xi", 0}}, CD(1.0, 0.0));
    SeriesD convd = convolve_multiplier(g, oned);
    CHECK(std::abs(convd.at({{"xi", 1}}) - CD(2.0 / std::sqrt(kPi), 0.0)) < 1e-14);

    // On-grid multipliers materialize: level 2, x^2 -> 1/Gamma(1) = 1.
    BorelMultiplier<CQ> h{parse_polynomial("x^2"), 2};
    CHECK(h.representable());
    CHECK(h.transformed().at({{"xi", 0}}) == CQ(1));
    BorelMultiplier<CQ> off{parse_polynomial("x"), 2};
    CHECK(!off.representable());
}

TEST_CASE("the linear family transform is the truncated geometric series") {
    EquationSpecQ eq = euler_spec();
    FormalSolution<CQ> sol = solve_formal(eq);
    BorelFamily<CQ> fam = borel_coefficients(sol, eq);

    REQUIRE(fam.members.size() == 8);
    CHECK(fam.b0 == CQ(0));
    CHECK(fam.c0 == CQ(1));
    CHECK(fam.b_mult.source.known_zero());
    CHECK(fam.c_mult.source.known_zero());
    CHECK(fam.forcing.at({{"xi", 0}}) == CQ(1));

    for (int p = 0; p <= fam.members[0].bound("xi"); ++p)
        CHECK(fam.members[0].at({{"xi", p}}) == CQ(1));

    for (int n = 1; n <= 8; ++n) {
        SeriesQ res = convolution_residual(fam, n);
        CHECK(res.known_zero());
        CHECK(res.bound("xi") >= 6);
    }
}

TEST_CASE("convolution residuals vanish for a loaded normal-form instance") {
    EquationSpecQ eq = loaded_normal_form_spec();
    FormalSolution<CQ> sol = solve_formal(eq);
    BorelFamily<CQ> fam = borel_coefficients(sol, eq);

    REQUIRE(fam.terms.size() == 3);
    CHECK(fam.terms[0].constant == CQ(1));  // (0,2,0) coefficient 1 + x
    CHECK(!fam.terms[0].mult.source.known_zero());
    CHECK(fam.terms[1].constant == CQ(1));  // (1,1,1) constant slot
    CHECK(fam.terms[1].mult.source.known_zero());
    CHECK(fam.terms[2].constant == CQ(0));  // (3,0,0) pure coupling

    for (int n = 1; n <= sol.order_t; ++n) {
        SeriesQ res = convolution_residual(fam, n);
        CHECK(res.known_zero());
        CHECK(res.bound("xi") >= 2);
    }
}

TEST_CASE("level-two families live on the ramified grid with exact residuals") {
    EquationSpecQ eq = level_two_spec();
    FormalSolution<CQ> sol = solve_formal(eq);
    BorelFamily<CQ> fam = borel_coefficients(sol, eq);

    // The transform shifts the x^2 forcing onto the grid constant.
    CHECK(fam.forcing.at({{"xi", 0}}) == CQ(1));
    for (int n = 1; n <= sol.order_t; ++n) {
        SeriesQ res = convolution_residual(fam, n);
        CHECK(res.known_zero());
        CHECK(res.bound("xi") >= 4);
    }

    // The same instance in float arithmetic agrees on the residual window.
    EquationSpecD eqd = spec_to_float(eq);
    FormalSolution<CD> sold = solve_formal(eqd);
    BorelFamily<CD> famd = borel_coefficients(sold, eqd);
    for (int n = 1; n <= sold.order_t; ++n) {
        SeriesD res = convolution_residual(famd, n);
        double worst = 0.0;
        res.for_each_nonzero([&](const std::vector<int>&, const CD& c) {
            worst = std::max(worst, std::abs(c));
        });
        CHECK(worst < 1e-12);
    }
}

TEST_CASE("family construction rejects off-grid and non-normal-form input") {
    // Plain-derivative couplings are not in the x d/dx normal form.
    EquationSpecQ plain = euler_spec(4, 6);
    plain.nonlinear.push_back({1, 0, 2, parse_polynomial("1")});
    FormalSolution<CQ> psol = solve_formal(plain);
    CHECK_THROWS_MATCHES(borel_coefficients(psol, plain), PreconditionError,
                         MessageMatches(ContainsSubstring("normal form")));

    // A pure coupling with a constant term drags the solution below x^1.
    EquationSpecQ bad = euler_spec(4, 6);
    bad.nonlinear.push_back({2, 0, 0, parse_polynomial("1 + x")});
    FormalSolution<CQ> bsol = solve_formal(bad);
    CHECK_THROWS_MATCHES(borel_coefficients(bsol, bad), PreconditionError,
                         MessageMatches(ContainsSubstring("below x^")));

    // Level 2 demands two vanishing orders of the forcing.
    EquationSpecQ low = level_two_spec(4, 8);
    low.nonlinear.clear();
    FormalSolution<CQ> lsol = solve_formal(low);
    low.a = parse_polynomial("x");
    CHECK_THROWS_MATCHES(borel_coefficients(lsol, low), PreconditionError,
                         MessageMatches(ContainsSubstring("below x^2")));

    // Residual orders beyond the member list are a truncation failure.
    FormalSolution<CQ> esol = solve_formal(euler_spec(3, 5));
    BorelFamily<CQ> fam = borel_coefficients(esol, euler_spec(3, 5));
    CHECK_THROWS_AS(convolution_residual(fam, 4), TruncationError);
    CHECK_THROWS_AS(convolution_residual(fam, 0), ArgumentError);
}

TEST_CASE("divisor ratio lower bound on the backward sector") {
    SectorSpec S{SectorKind::pure, kPi, kPi / 4.0, 0.0, 1};
    double sigma = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, S);
    CHECK(sigma >= 0.92);
    CHECK(sigma <= 0.9239);

    // The true infimum is cos(pi/8), attained on the sector edge at |xi| = n.
    const double exact = std::cos(kPi / 8.0);
    CHECK(sigma <= exact + 1e-15);
    CHECK(sigma >= exact - 1e-3);

    // Stable under a larger explicit order range; a coarser grid only weakens
    // the certificate, never strengthens it.
    double more_orders = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, S, 200);
    CHECK(std::abs(more_orders - sigma) < 1e-9);
    double coarse = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, S, 50, 2001);
    CHECK(coarse <= sigma + 1e-15);
    CHECK(coarse >= 0.92);

    CHECK(sigma_bound(CQ(0), CQ(1), 1, S) == Catch::Approx(sigma));
}

TEST_CASE("divisor ratio bound shrinks as the sector opens") {
    double prev = std::numeric_limits<double>::infinity();
    for (double theta : {kPi / 8.0, kPi / 4.0, 3.0 * kPi / 8.0, kPi / 2.0}) {
        SectorSpec S{SectorKind::pure, kPi, theta, 0.0, 1};
        double sigma = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, S);
        CHECK(sigma <= prev + 1e-15);
        CHECK(sigma > 0.0);
        prev = sigma;
    }
    // Half-opening pi/2 reaches the rays arg xi = pi/2 + pi Z: min sin(pi/4).
    CHECK(prev >= std::sqrt(0.5) - 1e-3);
    CHECK(prev <= std::sqrt(0.5) + 1e-15);
}

TEST_CASE("divisor ratio bound rejects sectors touching singular rays") {
    SectorSpec fwd{SectorKind::pure, 0.0, kPi / 4.0, 0.0, 1};
    CHECK_THROWS_MATCHES(sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, fwd),
                         PreconditionError,
                         MessageMatches(ContainsSubstring("singular direction")));
    // Touching the ray with the sector boundary is already inadmissible.
    SectorSpec touch{SectorKind::pure, kPi / 4.0, kPi / 4.0, 0.0, 1};
    CHECK_THROWS_AS(sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, touch),
                    PreconditionError);
    CHECK_THROWS_MATCHES(sigma_bound(CD(0.0, 0.0), CD(0.0, 0.0), 1, fwd),
                         PreconditionError,
                         MessageMatches(ContainsSubstring("c(0) = 0")));
}

TEST_CASE("ramified sectors scan the base angles of their level") {
    SectorSpec S2{SectorKind::ramified, kPi, kPi / 4.0, 0.0, 2};
    SectorSpec S1{SectorKind::pure, kPi, kPi / 4.0, 0.0, 1};
    double two = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 2, S2);
    double one = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, S1);
    CHECK(std::abs(two - one) < 1e-12);
    CHECK_THROWS_AS(sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 3, S2), ArgumentError);
}

TEST_CASE("joined discs cap the divisor ratio at the disc rim") {
    SectorSpec S{SectorKind::disc_joined, kPi, kPi / 4.0, 0.5, 1};
    double sigma = sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, S);
    // Worst case sits at n = 1, xi = 0.5 on the positive axis: 0.5/1.5.
    CHECK(sigma <= 1.0 / 3.0 + 1e-15);
    CHECK(sigma >= 1.0 / 3.0 - 1e-3);

    SectorSpec big{SectorKind::disc_joined, kPi, kPi / 4.0, 1.5, 1};
    CHECK_THROWS_MATCHES(sigma_bound(CD(0.0, 0.0), CD(1.0, 0.0), 1, big),
                         PreconditionError,
                         MessageMatches(ContainsSubstring("disc contains")));
}

TEST_CASE("divisor ratio bound is certified against direct sampling") {
    const CD b(0.3, -0.2), c(1.0, 0.5);
    SectorSpec S{SectorKind::pure, 0.9 * kPi, kPi / 5.0, 0.0, 1};
    double sigma = sigma_bound(b, c, 1, S);

    double brute = std::numeric_limits<double>::infinity();
    const int psi_pts = 501;
    const double lo = S.d - S.theta, hi = S.d + S.theta;
    for (int g = 0; g < psi_pts; ++g) {
        double psi = lo + (hi - lo) * g / (psi_pts - 1);
        CD gamma = c * std::polar(1.0, psi);
        for (int n = 1; n <= 60; ++n) {
            for (int r = 0; r <= 400; ++r) {
                double radius = r == 0 ? 0.0 : 1e-3 * std::pow(300.0 / 1e-3, (r - 1) / 399.0);
                double m = std::abs(static_cast<double>(n) - b - gamma * radius) /
                           (n + radius);
                brute = std::min(brute, m);
            }
        }
    }
    CHECK(sigma <= brute + 1e-12);  // certificate never exceeds a sampled value
    CHECK(brute - sigma <= 1e-2);   // and stays close to the sampled minimum
}

namespace {

CD zero_fn(CD) { return CD(0.0, 0.0); }
CD one_fn(CD) { return CD(1.0, 0.0); }

}  // namespace

TEST_CASE("ray continuation reproduces the first family member") {
    VolterraProblem prob = lemma_form_from_family(zero_fn, zero_fn, one_fn,
                                                  CD(0.0, 0.0), CD(1.0, 0.0), 1);
    CHECK(prob.xi_n == CD(1.0, 0.0));
    RaySpec ray{kPi, std::pow(2.0, -10.0), 4.0};
    RaySamples out = volterra_solve(prob.B, prob.C, prob.F, prob.xi_n, ray);
    REQUIRE(out.s.size() == 4097);
    double worst = 0.0;
    for (std::size_t q = 0; q < out.s.size(); ++q)
        worst = std::max(worst,
                         std::abs(out.psi[q] - CD(1.0 / (1.0 + out.s[q]), 0.0)));
    CHECK(worst <= 1e-6);
    CHECK(out.err_max <= 1e-5);
}

TEST_CASE("decoupled ray continuation is exact at the nodes") {
    auto F = [](CD xi) { return xi * xi + CD(2.0, 0.0); };
    const CD xin(0.5, 0.8);
    RaySpec ray{0.0, 1.0 / 256.0, 1.0};
    RaySamples out = volterra_solve(zero_fn, zero_fn, F, xin, ray);
    for (std::size_t q = 0; q < out.s.size(); ++q) {
        CD xi(out.s[q], 0.0);
        CHECK(std::abs(out.psi[q] - F(xi) / (xi - xin)) <= 1e-13);
    }
    CHECK(out.err_max <= 1e-13);
}

TEST_CASE("step halving converges at second order") {
    auto B = [](CD xi) { return xi; };
    auto err_at = [&](double h) {
        RaySpec ray{kPi, h, 1.0};
        return volterra_solve(B, zero_fn, one_fn, CD(1.0, 0.0), ray).err_max;
    };
    double coarse = err_at(1.0 / 64.0);
    double fine = err_at(1.0 / 128.0);
    REQUIRE(fine > 0.0);
    CHECK(std::log2(coarse / fine) >= 1.9);
}

TEST_CASE("ray continuation agrees with the Taylor expansion in the disc") {
    auto B = [](CD xi) { return xi; };
    RaySpec ray{kPi, std::pow(2.0, -10.0), 0.4};
    RaySamples out = volterra_solve(B, zero_fn, one_fn, CD(1.0, 0.0), ray);

    // Taylor recursion for (xi - 1) psi = xi * psi + 1 with the additive
    // convolution: p_0 = p_1 = -1, p_m = p_{m-1} - p_{m-2} / (m (m - 1)).
    std::vector<double> p(31);
    p[0] = -1.0;
    p[1] = -1.0;
    for (int m = 2; m <= 30; ++m) p[m] = p[m - 1] - p[m - 2] / (m * (m - 1.0));
    for (std::size_t q = 0; q < out.s.size(); ++q) {
        CD xi(-out.s[q], 0.0);
        CD taylor(0.0, 0.0);
        for (int m = 30; m >= 0; --m) taylor = taylor * xi + p[m];
        CHECK(std::abs(out.psi[q] - taylor) <= 1e-6);
    }
}

TEST_CASE("ray continuation rejects degenerate geometry") {
    RaySpec through{0.0, 1.0 / 256.0, 1.0};
    CHECK_THROWS_MATCHES(
        volterra_solve(zero_fn, zero_fn, one_fn, CD(0.5, 0.0), through),
        PreconditionError, MessageMatches(ContainsSubstring("ten steps")));
    CHECK_THROWS_MATCHES(
        volterra_solve(zero_fn, zero_fn, one_fn, CD(0.0, 0.0), through),
        PreconditionError, MessageMatches(ContainsSubstring("origin")));
    RaySpec bad_step{0.0, 0.0, 1.0};
    CHECK_THROWS_AS(volterra_solve(zero_fn, zero_fn, one_fn, CD(0.0, 2.0), bad_step),
                    ArgumentError);
    RaySpec short_ray{0.0, 0.5, 0.25};
    CHECK_THROWS_AS(volterra_solve(zero_fn, zero_fn, one_fn, CD(0.0, 30.0), short_ray),
                    ArgumentError);
    CHECK_THROWS_AS(lemma_form_from_family(zero_fn, zero_fn, one_fn, CD(0.0, 0.0),
                                           CD(0.0, 0.0), 1),
                    PreconditionError);
    CHECK_THROWS_AS(lemma_form_from_family(zero_fn, zero_fn, one_fn, CD(0.0, 0.0),
                                           CD(1.0, 0.0), 0),
                    ArgumentError);
}

TEST_CASE("ray samples serialize to CSV") {
    RaySpec ray{0.0, 0.25, 1.0};
    RaySamples out = volterra_solve(zero_fn, zero_fn, one_fn, CD(0.0, 30.0), ray);
    std::string csv = ray_samples_to_csv(out);
    CHECK(csv.rfind("s,re_psi,im_psi,err_est\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<long>(out.s.size()) + 1);
    double s0 = -1.0, re0 = 0.0, im0 = 0.0, e0 = -1.0;
    REQUIRE(std::sscanf(csv.c_str() + csv.find('\n') + 1, "%lf,%lf,%lf,%lf", &s0,
                        &re0, &im0, &e0) == 4);
    CHECK(s0 == 0.0);
    CHECK(re0 == Catch::Approx(out.psi[0].real()));
}

namespace {

SeriesD xi_poly(std::initializer_list<double> coeffs) {
    SeriesD out({"xi"}, {std::max<int>(0, static_cast<int>(coeffs.size()) - 1)});
    int m = 0;
    for (double c : coeffs) out.set({m++}, CD(c, 0.0));
    return out;
}

}  // namespace

TEST_CASE("perturbation orders reproduce the logarithmic closed form") {
    SeriesD one_p = xi_poly({1.0});
    SeriesD zero_p = xi_poly({0.0});
    auto parts = perturbation_log_expansion(one_p, zero_p, one_p, CD(1.0, 0.0), 1);
    REQUIRE(parts.size() == 2);
    CHECK(parts[0].max_log_power() == 0);
    CHECK(parts[1].max_log_power() == 1);

    for (double x = -2.0; x <= 0.5 + 1e-12; x += 0.05) {
        CD xi(x, 0.0);
        CHECK(std::abs(parts[0].eval(xi) - CD(1.0, 0.0) / (xi - 1.0)) <= 1e-12);
        CD expect = -std::log(CD(1.0, 0.0) - xi) / (CD(1.0, 0.0) - xi);
        CHECK(std::abs(parts[1].eval(xi) - expect) <= 1e-8);
    }

    auto trivial = perturbation_log_expansion(one_p, one_p, zero_p, CD(1.0, 0.0), 1);
    CHECK(trivial[0].empty());
    CHECK(trivial[1].empty());
    CHECK(perturbation_log_expansion(one_p, zero_p, one_p, CD(1.0, 0.0), 0).size() == 1);

    CHECK_THROWS_AS(perturbation_log_expansion(one_p, zero_p, one_p, CD(1.0, 0.0), 2),
                    ArgumentError);
    CHECK_THROWS_AS(perturbation_log_expansion(one_p, zero_p, one_p, CD(0.0, 0.0), 1),
                    PreconditionError);
}

TEST_CASE("perturbation kernels agree with direct quadrature") {
    SeriesD B = xi_poly({1.0, 0.5});
    SeriesD C = xi_poly({0.25, -0.2});
    SeriesD F = xi_poly({2.0, -1.0});
    const CD xin(1.0, 0.3);
    auto parts = perturbation_log_expansion(B, C, F, xin, 1);

    auto bf = [](CD u) { return CD(1.0, 0.0) + 0.5 * u; };
    auto cf = [](CD u) { return CD(0.25, 0.0) - 0.2 * u; };
    auto psi0 = [&](CD u) { return (CD(2.0, 0.0) - u) / (u - xin); };
    for (CD xi : {CD(-0.7, 0.0), CD(0.4, -0.5), CD(-1.2, 0.8)}) {
        // Composite Simpson along the segment tau = t xi, t in [0, 1].
        const int panels = 4000;
        CD integral(0.0, 0.0);
        for (int i = 0; i < panels; ++i) {
            auto integrand = [&](double t) {
                CD tau = t * xi;
                return bf(xi - tau) * psi0(tau) + cf(xi - tau) * tau * psi0(tau);
            };
            double t0 = static_cast<double>(i) / panels;
            double t1 = static_cast<double>(i + 1) / panels;
            integral += (t1 - t0) / 6.0 *
                        (integrand(t0) + 4.0 * integrand((t0 + t1) / 2) + integrand(t1));
        }
        CD expect = integral * xi / (xi - xin);
        CHECK(std::abs(parts[1].eval(xi) - expect) <= 1e-9);
    }
}

TEST_CASE("perturbation matches ray continuation to second order") {
    SeriesD B = xi_poly({1.0, 0.5});
    SeriesD C = xi_poly({0.25, -0.2});
    SeriesD F = xi_poly({2.0, -1.0});
    const CD xin(1.0, 0.0);
    auto parts = perturbation_log_expansion(B, C, F, xin, 1);

    auto bf = [](CD u) { return CD(1.0, 0.0) + 0.5 * u; };
    auto cf = [](CD u) { return CD(0.25, 0.0) - 0.2 * u; };
    auto ff = [](CD u) { return CD(2.0, 0.0) - u; };

    std::vector<double> eps{0.1, 0.05, 0.025};
    std::vector<double> diff;
    for (double e : eps) {
        RaySpec ray{kPi, std::pow(2.0, -9.0), 1.5};
        RaySamples out = volterra_solve(
            [&, e](CD u) { return e * bf(u); }, [&, e](CD u) { return e * cf(u); },
            ff, xin, ray);
        double worst = 0.0;
        for (std::size_t q = 0; q < out.s.size(); ++q) {
            CD xi(-out.s[q], 0.0);
            CD truncated = parts[0].eval(xi) + e * parts[1].eval(xi);
            worst = std::max(worst, std::abs(out.psi[q] - truncated));
        }
        diff.push_back(worst);
    }
    CHECK(diff[0] > diff[1]);
    CHECK(diff[1] > diff[2]);

    // Least-squares slope of log diff against log eps across the three runs.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < eps.size(); ++i) {
        double lx = std::log(eps[i]), ly = std::log(diff[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    double n = static_cast<double>(eps.size());
    double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope >= 1.9);
    CHECK(slope <= 2.6);
}

TEST_CASE("two-timescale slices satisfy their convolution equation") {
    EquationSpecQ eq = euler_spec(0, 0);
    eq.nonlinear.push_back({1, 0, 2, parse_polynomial("1")});
    eq.trunc_t = 5;
    eq.trunc_x = 9;
    AnticipativeSolution<CQ> as = solve_anticipative(eq, 5, 9);
    TwoScaleBorelFamily<CQ> fam = anticipative_borel_family(as, eq.a);

    REQUIRE(fam.members.size() == 5);
    CHECK(fam.slope[0] == CQ(1));
    // v~_0 is the geometric tail: coefficient 1 from xi^1 on.
    CHECK(fam.members[0].at({{"xi", 0}}) == CQ(0));
    for (int p = 1; p <= fam.members[0].bound("xi"); ++p)
        CHECK(fam.members[0].at({{"xi", p}}) == CQ(1));

    for (int m = 0; m < 5; ++m) {
        SeriesQ res = anticipative_convolution_residual(fam, m);
        CHECK(res.known_zero());
        CHECK(res.bound("xi") >= 4);
    }
    CHECK_THROWS_AS(anticipative_convolution_residual(fam, 5), TruncationError);
}
