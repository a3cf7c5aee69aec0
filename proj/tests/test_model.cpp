// Equation model layer: spec validation, solvability conditions, JSON and
// polynomial-string parsing, CSV emission, and Newton polygons.

#include <catch2/catch_amalgamated.hpp>

#include "summa/equation.hpp"
#include "summa/json_io.hpp"
#include "summa/newton.hpp"

using namespace summa;

namespace {

EquationSpecQ euler_spec() {
    EquationSpecQ eq;
    eq.k = 1;
    eq.a = parse_polynomial("x");
    eq.b = parse_polynomial("0");
    eq.c = parse_polynomial("1");
    return eq;
}

}  // namespace

TEST_CASE("spec validation accepts the model linear instance") {
    EquationSpecQ eq = euler_spec();
    CHECK_NOTHROW(validate_spec(eq));
    CHECK(eq.b0() == CQ(0));
    CHECK(eq.c0() == CQ(1));
}

TEST_CASE("resonant b(0) is rejected unless overridden") {
    EquationSpecQ eq = euler_spec();
    eq.b = parse_polynomial("1");
    CHECK_THROWS_MATCHES(validate_spec(eq), PreconditionError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("resonance")));
    try {
        validate_spec(eq);
    } catch (const EngineError& e) {
        CHECK(e.exit_code() == 3);
    }
    eq.allow_resonance = true;
    CHECK_NOTHROW(validate_spec(eq));
    CHECK(is_resonant(eq));

    eq.b = parse_polynomial("1/2");
    CHECK_FALSE(is_resonant(eq));
    eq.b = parse_polynomial("-3");
    CHECK_FALSE(is_resonant(eq));
}

TEST_CASE("degenerate leading coefficient is rejected") {
    EquationSpecQ eq = euler_spec();
    eq.c = parse_polynomial("x");  // c(0) = 0
    CHECK_THROWS_MATCHES(validate_spec(eq), PreconditionError,
                         Catch::Matchers::MessageMatches(
                             Catch::Matchers::ContainsSubstring("degenerate leading coefficient")));
}

TEST_CASE("structural spec faults are argument errors") {
    EquationSpecQ eq = euler_spec();
    eq.k = 0;
    CHECK_THROWS_AS(validate_spec(eq), ArgumentError);
    eq = euler_spec();
    eq.nonlinear.push_back({1, 0, 0, parse_polynomial("1")});
    CHECK_THROWS_AS(validate_spec(eq), ArgumentError);
    eq = euler_spec();
    eq.trunc_t = 0;
    CHECK_THROWS_AS(validate_spec(eq), ArgumentError);
    try {
        validate_spec(eq);
    } catch (const EngineError& e) {
        CHECK(e.exit_code() == 2);
    }
}

TEST_CASE("conditions for a purely linear instance hold vacuously") {
    ConditionReport rep = check_conditions(euler_spec());
    CHECK(rep.condition_F);
    CHECK(rep.condition_F_prime);
    CHECK_FALSE(rep.resonance);
    CHECK(rep.q == kValInfinity);
    CHECK(rep.offending_terms.empty());
}

TEST_CASE("a derivative-square term with constant coefficient violates both conditions") {
    EquationSpecQ eq = euler_spec();
    eq.nonlinear.push_back({1, 0, 2, parse_polynomial("1")});
    ConditionReport rep = check_conditions(eq);
    CHECK_FALSE(rep.condition_F);
    CHECK_FALSE(rep.condition_F_prime);
    REQUIRE(rep.offending_terms.size() == 1);
    CHECK(rep.offending_terms[0] == std::make_tuple(1, 0, 2));
}

TEST_CASE("vanishing-at-zero derivative coefficients satisfy condition F") {
    EquationSpecQ eq = euler_spec();
    eq.nonlinear.push_back({1, 0, 1, parse_polynomial("x")});
    ConditionReport rep = check_conditions(eq);
    CHECK(rep.condition_F);
    CHECK(rep.condition_F_prime);
}

TEST_CASE("condition F prime can hold where condition F fails") {
    EquationSpecQ eq = euler_spec();
    eq.nonlinear.push_back({2, 0, 0, parse_polynomial("x")});   // q = 1
    eq.nonlinear.push_back({1, 1, 1, parse_polynomial("1")});   // val 0, but 0 + 1*1 > 0
    ConditionReport rep = check_conditions(eq);
    CHECK(rep.q == 1);
    CHECK_FALSE(rep.condition_F);
    CHECK(rep.condition_F_prime);
    CHECK(rep.offending_terms == std::vector<std::tuple<int, int, int>>{{1, 1, 1}});

    // q = 0 breaks it
    eq.nonlinear[0].coeff = parse_polynomial("1+x");
    rep = check_conditions(eq);
    CHECK(rep.q == 0);
    CHECK_FALSE(rep.condition_F_prime);
}

TEST_CASE("condition F implies condition F prime across instances") {
    std::vector<EquationSpecQ> specs;
    for (const char* coeff : {"x", "x^2", "x+x^3"}) {
        EquationSpecQ eq = euler_spec();
        eq.nonlinear.push_back({0, 1, 1, parse_polynomial(coeff)});
        eq.nonlinear.push_back({3, 0, 0, parse_polynomial("1")});
        specs.push_back(eq);
    }
    for (auto& eq : specs) {
        ConditionReport rep = check_conditions(eq);
        if (rep.condition_F) CHECK(rep.condition_F_prime);
    }
}

TEST_CASE("polynomial string parsing") {
    SeriesQ p = parse_polynomial("x^2+3x");
    CHECK(p.at({{Var("x"), 2}}) == CQ(1));
    CHECK(p.at({{Var("x"), 1}}) == CQ(3));

    SeriesQ q = parse_polynomial("1/2x^2-1");
    CHECK(q.at({{Var("x"), 2}}) == CQ(rat(1, 2)));
    CHECK(q.at({{Var("x"), 0}}) == CQ(-1));

    CHECK(parse_polynomial("3i").at({{Var("x"), 0}}) == CQ(Rat(0), Rat(3)));
    CHECK(parse_polynomial("-x").at({{Var("x"), 1}}) == CQ(-1));
    CHECK(parse_polynomial("2-x+x").at({{Var("x"), 0}}) == CQ(2));
    CHECK(parse_polynomial("2-x+x").valuation("x") == 0);
    CHECK(parse_polynomial("0").known_zero());
    CHECK(parse_polynomial("0.5x^3").at({{Var("x"), 3}}) == CQ(rat(1, 2)));
    CHECK(parse_polynomial("2*x").at({{Var("x"), 1}}) == CQ(2));
    CHECK(parse_polynomial("xi^2+3xi", "xi").at({{Var("xi"), 2}}) == CQ(1));
    CHECK_THROWS_AS(parse_polynomial("x^", "x"), ArgumentError);
    CHECK_THROWS_AS(parse_polynomial("x^-2", "x"), ArgumentError);
}

TEST_CASE("spec JSON parsing") {
    json j = json::parse(R"({"k":1,"a":"x","b":"0","c":"1","nonlinear":{}})");
    ParsedSpec ps = parse_spec(j);
    CHECK(ps.mode == "exact");
    CHECK(ps.spec.k == 1);
    CHECK(ps.spec.trunc_t == 8);
    CHECK(ps.spec.nonlinear.empty());
    CHECK(ps.spec.a.at({{Var("x"), 1}}) == CQ(1));

    json res = json::parse(R"({"k":1,"a":"x","b":"1","c":"1"})");
    CHECK_THROWS_AS(parse_spec(res), PreconditionError);
    CHECK_NOTHROW(parse_spec(res, true));

    json deg = json::parse(R"({"k":1,"a":"x","b":"0","c":"0"})");
    CHECK_THROWS_AS(parse_spec(deg), PreconditionError);

    json unknown = json::parse(R"({"k":1,"a":"x","b":"0","c":"1","zz":0})");
    CHECK_THROWS_AS(parse_spec(unknown), ArgumentError);

    json nl = json::parse(
        R"({"k":2,"a":[0,0,"1/2"],"b":"0","c":"1+x",
            "nonlinear":[{"i":0,"j":2,"alpha":0,"coeff":"x"}],
            "trunc":[6,10],"mode":"float"})");
    ParsedSpec pf = parse_spec(nl);
    CHECK(pf.mode == "float");
    CHECK(pf.spec.k == 2);
    CHECK(pf.spec.trunc_t == 6);
    CHECK(pf.spec.trunc_x == 10);
    REQUIRE(pf.spec.nonlinear.size() == 1);
    CHECK(pf.spec.nonlinear[0].j == 2);
    CHECK(pf.spec.a.at({{Var("x"), 2}}) == CQ(rat(1, 2)));
    EquationSpecD fd = pf.to_float();
    CHECK(fd.a.at({{Var("x"), 2}}) == CD(0.5, 0.0));

    json keyed = json::parse(R"({"k":1,"a":"x","b":"0","c":"1","nonlinear":{"0,2,0":"1"}})");
    ParsedSpec pk = parse_spec(keyed);
    REQUIRE(pk.spec.nonlinear.size() == 1);
    CHECK(pk.spec.nonlinear[0].j == 2);
}

TEST_CASE("series JSON round trip") {
    SeriesQ s({"t", "x"}, {2, 3});
    s.set({1, 2}, CQ(rat(2, 3)));
    s.set({2, 0}, CQ(Rat(0), Rat(-1)));
    json j = series_to_json(s);
    CHECK(j["mode"] == "exact");
    SeriesQ back = series_q_from_json(j);
    CHECK(SeriesQ::equal_on_common(back, s));
    CHECK(back.bound("x") == 3);

    SeriesD sd = s.to_float();
    SeriesD backd = series_d_from_json(series_to_json(sd));
    CHECK(std::abs(backd.at({{Var("t"), 1}, {Var("x"), 2}}) - CD(2.0 / 3.0, 0)) < 1e-16);
}

TEST_CASE("scalar JSON readers") {
    CHECK(json_to_rat(json(7)) == rat(7));
    CHECK(json_to_rat(json(0.5)) == rat(1, 2));
    CHECK(json_to_rat(json(1e-05)) == rat(1, 100000));
    CHECK(json_to_rat(json("22/7")) == rat(22, 7));
    CHECK(parse_rational("2.5e-3") == rat(1, 400));
    CHECK(parse_rational("1E2") == rat(100));
    CHECK(json_to_cq(json("1-i")) == CQ(Rat(1), Rat(-1)));
    CHECK(json_to_cd(json(0.25)) == CD(0.25, 0.0));
}

TEST_CASE("CSV emission is fixed-format") {
    std::vector<GridRow> rows{{CD(0.1, 0), CD(1, 0), CD(0.5, -0.25), 1e-9}};
    std::string csv = csv_from_rows(rows);
    CHECK(csv.rfind("t_re,t_im,x_re,x_im,u_re,u_im,residual\n", 0) == 0);
    CHECK(csv.find("0.10000000000000001") != std::string::npos);
    CHECK(csv.find("-0.25") != std::string::npos);
    CHECK(csv_from_rows(rows) == csv);
}

TEST_CASE("newton polygon of a flat linear operator") {
    SeriesQ F({"z0", "z1"}, {1, 1});
    F.set({0, 1}, CQ(1));
    F.set({1, 0}, CQ(-1));  // F = z1 - z0
    SeriesQ phi = parse_polynomial("x");
    NewtonPolygon poly = newton_polygon(F, phi);
    CHECK(poly.points == std::vector<std::pair<int, int>>{{0, 0}, {1, 0}});
    CHECK(poly.slopes.empty());
    CHECK(poly.fuchsian);
    CHECK_FALSE(poly.order_limited);
    CHECK(poly.gevrey_admissible(1));
}

TEST_CASE("newton polygon reads valuations through the x factor") {
    SeriesQ F({"x", "z0", "z1"}, {1, 1, 1});
    F.set({0, 0, 1}, CQ(1));
    F.set({1, 1, 0}, CQ(-1));  // F = z1 - x z0
    NewtonPolygon poly = newton_polygon(F, parse_polynomial("x"));
    CHECK(poly.points == std::vector<std::pair<int, int>>{{0, 1}, {1, 0}});
    CHECK(poly.fuchsian);
    CHECK(poly.slopes.empty());
}

TEST_CASE("newton polygon of the quadratic majorant operator") {
    // F = z0 - A(x) - z1^2 - 2 B(x) z1 with A = B = x
    SeriesQ F({"x", "z0", "z1"}, {1, 1, 2});
    F.set({0, 1, 0}, CQ(1));
    F.set({1, 0, 0}, CQ(-1));
    F.set({0, 0, 2}, CQ(-1));
    F.set({1, 0, 1}, CQ(-2));
    SeriesQ phi = parse_polynomial("x+x^2");
    NewtonPolygon poly = newton_polygon(F, phi);
    REQUIRE(poly.points.size() == 2);
    CHECK(poly.points[0] == std::make_pair(0, 0));
    CHECK(poly.points[1].first == 1);
    CHECK(poly.points[1].second >= 1);
    REQUIRE(poly.slopes.size() == 1);
    CHECK(poly.slopes[0] == Rat(1));
    CHECK_FALSE(poly.fuchsian);
    CHECK(poly.gevrey_admissible(1));
    CHECK_FALSE(poly.gevrey_admissible(2));

    NewtonPolygon scaled = newton_polygon(F.scale(CQ(3)), phi);
    CHECK(scaled.points == poly.points);
    CHECK(scaled.slopes == poly.slopes);
}

TEST_CASE("newton polygon failure modes") {
    SeriesQ Z({"z0"}, {1});  // identically zero operator data
    CHECK_THROWS_AS(newton_polygon(Z, parse_polynomial("x")), TruncationError);

    SeriesQ plain = parse_polynomial("x");
    CHECK_THROWS_AS(newton_polygon(plain, plain), ArgumentError);

    // an uncertified zero slot flags the polygon instead of erroring
    SeriesQ zx = SeriesQ({"x"}, {3}).with_exact("x", false);
    SeriesQ F({"x", "z0", "z1"}, {3, 1, 1});
    F.set({0, 0, 1}, CQ(1));  // z1 term
    SeriesQ z0m({"x", "z0", "z1"}, {3, 1, 1});
    z0m.set({0, 1, 0}, CQ(1));
    F = F + zx * z0m;  // + (unknown-tail zero) * z0
    NewtonPolygon poly = newton_polygon(F, parse_polynomial("x"));
    CHECK(poly.order_limited);
    CHECK(poly.points == std::vector<std::pair<int, int>>{{1, 0}});
}
