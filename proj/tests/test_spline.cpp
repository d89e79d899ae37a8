#include <doctest.h>

#include <cmath>

#include "latentgeo/rng.hpp"
#include "latentgeo/spline.hpp"
#include "oracles.hpp"

using namespace latentgeo;

TEST_CASE("order-1 basis follows the half-open span definition") {
    std::vector<double> knots{0, 0, 0, 0, 0.4, 1, 1, 1, 1};
    CHECK(basis(3, 1, 0.2, knots) == 1.0);
    CHECK(basis(3, 1, 0.4, knots) == 0.0);
    CHECK(basis(4, 1, 0.4, knots) == 1.0);
    CHECK(basis(2, 1, 0.2, knots) == 0.0);
    // left-limit convention at t = 1
    CHECK(basis(4, 1, 1.0, knots) == 1.0);
    CHECK(basis(5, 1, 1.0, knots) == 0.0);
}

TEST_CASE("partition of unity and non-negativity over a dense grid") {
    BSplineCurve c = oracle::random_curve(2, 7, 3);
    for (int g = 0; g <= 1000; ++g) {
        double t = double(g) / 1000;
        Vec row = basis_row(c, t);
        double sum = 0.0;
        for (double v : row) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
    }
}

TEST_CASE("clamped n=3 basis equals Bernstein polynomials") {
    Vec z0{0.0, 0.0}, z1{1.0, 1.0};
    BSplineCurve c = straight_line_curve(z0, z1, 2); // pure Bezier knots
    for (int g = 0; g < 20; ++g) {
        double t = double(g) / 19;
        for (int i = 0; i <= 3; ++i)
            CHECK(std::abs(basis(i, 4, t, c.knots) - oracle::bernstein(i, 3, t)) < 1e-12);
    }
}

TEST_CASE("eval interpolates the endpoints") {
    BSplineCurve c = oracle::random_curve(3, 8, 5);
    Vec a = eval(c, 0.0), b = eval(c, 1.0);
    for (int k = 0; k < 3; ++k) {
        CHECK(a[k] == doctest::Approx(c.control_points.front()[k]).epsilon(1e-14));
        CHECK(b[k] == doctest::Approx(c.control_points.back()[k]).epsilon(1e-14));
    }
}

TEST_CASE("collinear control points stay on the segment") {
    Vec z0{-1.0, 2.0}, z1{3.0, -2.0};
    BSplineCurve c = straight_line_curve(z0, z1, 4);
    Vec dir{z1[0] - z0[0], z1[1] - z0[1]};
    double len2 = dir[0] * dir[0] + dir[1] * dir[1];
    for (int g = 0; g <= 50; ++g) {
        double t = double(g) / 50;
        Vec p = eval(c, t);
        // distance from the line through z0,z1
        double px = p[0] - z0[0], py = p[1] - z0[1];
        double cross = px * dir[1] - py * dir[0];
        CHECK(std::abs(cross) / std::sqrt(len2) < 1e-12);
    }
}

TEST_CASE("eval matches the de Boor triangular oracle") {
    Rng rng(21);
    BSplineCurve c = oracle::random_curve(2, 9, 6);
    for (int trial = 0; trial < 100; ++trial) {
        double t = rng.uniform();
        Vec got = eval(c, t);
        Vec want = oracle::de_boor_eval(c, t);
        for (int k = 0; k < 2; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-12);
    }
    // and the closed endpoint
    Vec got1 = eval(c, 1.0);
    Vec want1 = oracle::de_boor_eval(c, 1.0);
    for (int k = 0; k < 2; ++k) CHECK(std::abs(got1[k] - want1[k]) < 1e-12);
}

TEST_CASE("eval rejects t outside the domain") {
    BSplineCurve c = oracle::random_curve(2, 5, 7);
    CHECK_THROWS_AS(eval(c, -0.01), DomainError);
    CHECK_THROWS_AS(eval(c, 1.01), DomainError);
    CHECK_THROWS_AS(derivative(c, 1.5), DomainError);
}

TEST_CASE("derivative of a straight-line curve is parallel to the chord") {
    Vec z0{0.0, 1.0}, z1{2.0, 5.0};
    BSplineCurve c = straight_line_curve(z0, z1, 3);
    Vec chord{z1[0] - z0[0], z1[1] - z0[1]};
    for (int g = 0; g <= 20; ++g) {
        double t = double(g) / 20;
        Vec d = derivative(c, t);
        CHECK(std::abs(d[0] * chord[1] - d[1] * chord[0]) < 1e-10);
    }
}

TEST_CASE("pure Bezier derivative matches the Bernstein oracle") {
    Rng rng(31);
    std::vector<Vec> pts;
    for (int i = 0; i < 4; ++i) pts.push_back({rng.normal(), rng.normal()});
    BSplineCurve c;
    c.control_points = pts;
    c.knots = {0, 0, 0, 0, 1, 1, 1, 1};
    for (int g = 0; g <= 20; ++g) {
        double t = double(g) / 20;
        Vec d = derivative(c, t);
        for (int k = 0; k < 2; ++k) {
            double want = 0.0;
            for (int i = 0; i < 3; ++i)
                want += 3.0 * oracle::bernstein(i, 2, t) *
                        (pts[i + 1][k] - pts[i][k]);
            CHECK(std::abs(d[k] - want) < 1e-12);
        }
    }
}

TEST_CASE("derivative matches central differences of eval") {
    BSplineCurve c = oracle::random_curve(2, 8, 8);
    const double h = 1e-6;
    for (int g = 1; g < 20; ++g) {
        double t = double(g) / 20;
        Vec d = derivative(c, t);
        Vec p = eval(c, t + h), m = eval(c, t - h);
        for (int k = 0; k < 2; ++k)
            CHECK(std::abs(d[k] - (p[k] - m[k]) / (2 * h)) < 1e-5);
    }
}

TEST_CASE("insert_control_point preserves geometry") {
    BSplineCurve c = oracle::random_curve(2, 6, 9);
    BSplineCurve c2 = insert_control_point(c);
    CHECK(c2.control_points.size() == c.control_points.size() + 1);
    CHECK(c2.knots.size() == c.knots.size() + 1);
    double worst = 0.0;
    for (int g = 0; g <= 1000; ++g) {
        double t = double(g) / 1000;
        Vec a = eval(c, t), b = eval(c2, t);
        for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("insertion on the single-interval curve lands at 0.5") {
    BSplineCurve c = straight_line_curve(Vec{0, 0}, Vec{1, 1}, 2);
    BSplineCurve c2 = insert_control_point(c);
    REQUIRE(c2.knots.size() == 9);
    CHECK(c2.knots[4] == doctest::Approx(0.5));
}

TEST_CASE("tie among equal largest intervals picks the lowest index") {
    // knots (0,0,0,0,.5,1,1,1,1): two intervals of length .5; expect the
    // first to split, giving (0,0,0,0,.25,.5,1,1,1,1)
    Rng rng(41);
    BSplineCurve c;
    for (int i = 0; i < 5; ++i) c.control_points.push_back({rng.normal(), rng.normal()});
    c.knots = {0, 0, 0, 0, 0.5, 1, 1, 1, 1};
    c.validate();
    BSplineCurve c2 = insert_control_point(c);
    std::vector<double> want{0, 0, 0, 0, 0.25, 0.5, 1, 1, 1, 1};
    REQUIRE(c2.knots.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i)
        CHECK(c2.knots[i] == doctest::Approx(want[i]).epsilon(1e-15));

    // hand-computed Boehm update for the affected points (span j = 3,
    // t_new = 0.25): a_1 = 0.5, a_2 = 0.25, a_3 = 0.25
    Vec p1{0.5 * (c.control_points[0][0] + c.control_points[1][0]),
           0.5 * (c.control_points[0][1] + c.control_points[1][1])};
    Vec p3{0.75 * c.control_points[2][0] + 0.25 * c.control_points[3][0],
           0.75 * c.control_points[2][1] + 0.25 * c.control_points[3][1]};
    CHECK(c2.control_points[1][0] == doctest::Approx(p1[0]));
    CHECK(c2.control_points[1][1] == doctest::Approx(p1[1]));
    CHECK(c2.control_points[3][0] == doctest::Approx(p3[0]));
    CHECK(c2.control_points[3][1] == doctest::Approx(p3[1]));

    double worst = 0.0;
    for (int g = 0; g <= 1000; ++g) {
        double t = double(g) / 1000;
        Vec a = eval(c, t), b = eval(c2, t);
        for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("ten successive insertions stay within 1e-8 of the original") {
    BSplineCurve original = oracle::random_curve(2, 5, 10);
    BSplineCurve c = original;
    for (int i = 0; i < 10; ++i) c = insert_control_point(c);
    CHECK(c.control_points.size() == original.control_points.size() + 10);
    double worst = 0.0;
    for (int g = 0; g <= 1000; ++g) {
        double t = double(g) / 1000;
        Vec a = eval(original, t), b = eval(c, t);
        for (int k = 0; k < 2; ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("local support: a control point only moves its own spans") {
    BSplineCurve c = oracle::random_curve(2, 9, 11);
    const int m = 4;
    BSplineCurve moved = c;
    moved.control_points[m][0] += 1.0;
    moved.control_points[m][1] -= 2.0;
    // support of N_{m,4} is [T_m, T_{m+4})
    double lo = c.knots[m], hi = c.knots[m + 4];
    for (int g = 0; g <= 500; ++g) {
        double t = double(g) / 500;
        Vec a = eval(c, t), b = eval(moved, t);
        double diff = std::max(std::abs(a[0] - b[0]), std::abs(a[1] - b[1]));
        if (t < lo || t >= hi)
            CHECK(diff < 1e-14);
    }
}

TEST_CASE("straight_line_curve layout") {
    Vec z0{1.0, 0.0}, z1{4.0, 3.0};
    BSplineCurve c = straight_line_curve(z0, z1, 2);
    REQUIRE(c.control_points.size() == 4);
    for (int i = 0; i <= 3; ++i) {
        double f = i / 3.0;
        CHECK(c.control_points[i][0] == doctest::Approx(z0[0] + f * 3.0).epsilon(1e-15));
        CHECK(c.control_points[i][1] == doctest::Approx(z0[1] + f * 3.0).epsilon(1e-15));
    }
    CHECK_THROWS_AS(straight_line_curve(z0, z0, 2), DegenerateEndpoints);
    CHECK_THROWS_AS(straight_line_curve(z0, z1, 1), InvalidInput);
}

TEST_CASE("curve serialization round trip") {
    BSplineCurve c = oracle::random_curve(2, 7, 12);
    save_curve(c, "test_curve_rt.json");
    BSplineCurve back = load_curve("test_curve_rt.json");
    CHECK(back.control_points == c.control_points);
    CHECK(back.knots == c.knots);
    std::remove("test_curve_rt.json");
}
