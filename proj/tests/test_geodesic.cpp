#include <doctest.h>

#include <cmath>

#include "latentgeo/geodesic.hpp"
#include "latentgeo/rng.hpp"
#include "oracles.hpp"

using namespace latentgeo;

namespace {

Mlp linear_net(const Matrix& a) {
    Mlp net;
    net.layers.push_back(Layer{a, Vec(a.rows, 0.0), Activation::identity});
    return net;
}

MetricProvider identity_metric(int d) {
    return MetricProvider::deterministic(linear_net(Matrix::identity(d)));
}

double two_bump_factor(double x, double y) {
    auto bump = [](double x, double y, double cx, double cy) {
        double dx = x - cx, dy = y - cy;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * 0.45));
    };
    return 1.0 + 4.0 * bump(x, y, -0.9, 0.0) + 4.0 * bump(x, y, 0.9, 0.0);
}

MetricProvider two_bump_metric() {
    return MetricProvider::custom(2, [](const Vec& z) {
        double m = two_bump_factor(z[0], z[1]);
        SymMatrix s(2);
        s.set(0, 0, m * m);
        s.set(1, 1, m * m);
        return s;
    });
}

Vec vdiff(const Vec& a, const Vec& b) {
    Vec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

} // namespace

TEST_CASE("curve_length under the identity metric recovers Euclidean length") {
    Vec z0{0.0, 1.0}, z1{3.0, 5.0};
    BSplineCurve c = straight_line_curve(z0, z1, 2);
    CHECK(curve_length(c, identity_metric(2), 256) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("curve_length under a linear generator") {
    Matrix a = oracle::random_matrix(5, 2, 91);
    MetricProvider p = MetricProvider::deterministic(linear_net(a));
    Vec z0{-1.0, 0.5}, z1{2.0, -0.5};
    BSplineCurve c = straight_line_curve(z0, z1, 2);
    CHECK(curve_length(c, p, 256) ==
          doctest::Approx(norm(matvec(a, vdiff(z1, z0)))).epsilon(1e-6));
}

TEST_CASE("curve_length at N=256 agrees with a dense quadrature oracle") {
    Mlp g = oracle::random_mlp({2, 6, 4}, {Activation::tanh_fn, Activation::tanh_fn}, 92);
    MetricProvider p = MetricProvider::deterministic(g);
    BSplineCurve c = oracle::random_curve(2, 6, 93);
    double dense = oracle::dense_curve_length(
        [&](double t) { return p.speed(eval(c, t), derivative(c, t)); }, 100000);
    CHECK(std::abs(curve_length(c, p, 256) - dense) / dense < 1e-3);
}

TEST_CASE("path_energy analytic cases") {
    Vec z0{0.0, 0.0}, z1{3.0, 4.0};
    BSplineCurve c = straight_line_curve(z0, z1, 2);
    CHECK(path_energy(c, identity_metric(2), 64) == doctest::Approx(25.0).epsilon(1e-6));

    Matrix a = oracle::random_matrix(4, 2, 94);
    MetricProvider p = MetricProvider::deterministic(linear_net(a));
    double out = norm(matvec(a, vdiff(z1, z0)));
    CHECK(path_energy(c, p, 64) == doctest::Approx(out * out).epsilon(1e-6));
}

TEST_CASE("path energy dominates squared length (Cauchy-Schwarz)") {
    Mlp g = oracle::random_mlp({2, 5, 4}, {Activation::tanh_fn, Activation::sigmoid}, 95);
    MetricProvider p = MetricProvider::deterministic(g);
    BSplineCurve c = oracle::random_curve(2, 6, 96);
    double len = curve_length(c, p, 256);
    double e = path_energy(c, p, 256);
    CHECK(e >= len * len * (1.0 - 1e-3));
}

TEST_CASE("energy gradient vanishes at the linear-generator minimizer") {
    Matrix a = oracle::random_matrix(4, 2, 97);
    MetricProvider p = MetricProvider::deterministic(linear_net(a));
    BSplineCurve c = straight_line_curve(Vec{0.0, 0.0}, Vec{1.0, 2.0}, 2);
    std::vector<Vec> g = energy_gradient(c, p, 64, GradientMode::exact_vjp);
    REQUIRE(g.size() == 2); // interior control points only
    double n2 = 0.0;
    for (const Vec& gi : g) n2 += dot(gi, gi);
    CHECK(std::sqrt(n2) < 1e-6);
}

TEST_CASE("exact_vjp and finite differences agree on random cases") {
    Mlp g = oracle::random_mlp({2, 6, 5}, {Activation::tanh_fn, Activation::sigmoid}, 98);
    MetricProvider p = MetricProvider::deterministic(g);
    BSplineCurve c = oracle::random_curve(2, 6, 99);
    std::vector<Vec> ge = energy_gradient(c, p, 32, GradientMode::exact_vjp);
    std::vector<Vec> gf = energy_gradient(c, p, 32, GradientMode::finite_difference);
    double scale = 0.0;
    for (const Vec& gi : ge)
        for (double v : gi) scale = std::max(scale, std::abs(v));
    for (std::size_t m = 0; m < ge.size(); ++m)
        for (std::size_t k = 0; k < ge[m].size(); ++k)
            CHECK(std::abs(ge[m][k] - gf[m][k]) < 1e-3 * scale);

    StochasticGenerator gen = oracle::random_generator(2, 5, 100);
    MetricProvider ps = MetricProvider::stochastic(gen);
    std::vector<Vec> se = energy_gradient(c, ps, 32, GradientMode::exact_vjp);
    std::vector<Vec> sf = energy_gradient(c, ps, 32, GradientMode::finite_difference);
    scale = 0.0;
    for (const Vec& gi : se)
        for (double v : gi) scale = std::max(scale, std::abs(v));
    for (std::size_t m = 0; m < se.size(); ++m)
        for (std::size_t k = 0; k < se[m].size(); ++k)
            CHECK(std::abs(se[m][k] - sf[m][k]) < 1e-3 * scale);
}

TEST_CASE("exact_vjp is refused for feature metrics") {
    StochasticGenerator gen = oracle::random_generator(2, 5, 101);
    FeatureMap f = FeatureMap::logistic(oracle::random_matrix(3, 5, 102), Vec(3, 0.0));
    MetricProvider p = MetricProvider::feature_stochastic(gen, f);
    BSplineCurve c = oracle::random_curve(2, 4, 103);
    CHECK_THROWS_AS(energy_gradient(c, p, 16, GradientMode::exact_vjp), UnsupportedMode);
}

TEST_CASE("shorten on a linear generator keeps the straight line") {
    Matrix a = oracle::random_matrix(5, 2, 104);
    MetricProvider p = MetricProvider::deterministic(linear_net(a));
    CurveOptConfig cfg;
    cfg.max_iters = 300;
    Vec z0{-1.0, -1.0}, z1{2.0, 1.0};
    ShortenResult r = shorten(z0, z1, p, cfg);
    CHECK(r.d_short <= r.d_straight);
    CHECK(r.d_short / r.d_straight >= 1.0 - 1e-3);
    CHECK(r.curve.control_points.front() == z0);
    CHECK(r.curve.control_points.back() == z1);
    for (std::size_t i = 1; i < r.energy_history.size(); ++i)
        CHECK(r.energy_history[i] <=
              r.energy_history[i - 1] * (1.0 + 1e-9) + 1e-12);
}

TEST_CASE("constant metric: relative improvement below 1e-3 over 20 pairs") {
    Matrix a = oracle::random_matrix(4, 2, 105);
    MetricProvider p = MetricProvider::deterministic(linear_net(a));
    CurveOptConfig cfg;
    cfg.max_iters = 200;
    Rng rng(106);
    for (int trial = 0; trial < 20; ++trial) {
        Vec z0{rng.normal(), rng.normal()}, z1{rng.normal(), rng.normal()};
        ShortenResult r = shorten(z0, z1, p, cfg);
        CHECK((r.d_straight - r.d_short) / r.d_straight < 1e-3);
        CHECK(r.d_short <= r.d_straight);
    }
}

TEST_CASE("shorten finds genuinely shorter curves under a stochastic metric") {
    StochasticGenerator gen = oracle::random_generator(2, 8, 107);
    MetricProvider p = MetricProvider::stochastic(gen);
    CurveOptConfig cfg;
    cfg.max_iters = 400;
    Rng rng(108);
    for (int trial = 0; trial < 3; ++trial) {
        Vec z0{rng.normal() * 1.5, rng.normal() * 1.5};
        Vec z1{rng.normal() * 1.5, rng.normal() * 1.5};
        ShortenResult r = shorten(z0, z1, p, cfg);
        CHECK(r.d_short <= r.d_straight);
        CHECK(r.curve.control_points.front() == z0);
        CHECK(r.curve.control_points.back() == z1);
    }
}

TEST_CASE("two-bump metric: shorten is close to the grid Dijkstra oracle") {
    MetricProvider p = two_bump_metric();
    const int n = 201;
    const double lo = -3.0, hi = 3.0;
    const double h = (hi - lo) / (n - 1);

    // endpoints on grid nodes (slightly off-axis: the exact bump axis is a
    // symmetry saddle where the gradient cannot break the tie)
    int ax = 33, ay = 96, bx = 167, by = 106;
    Vec z0{lo + ax * h, lo + ay * h};
    Vec z1{lo + bx * h, lo + by * h};

    double want = oracle::dijkstra_grid_length(
        [](double x, double y) { return two_bump_factor(x, y); }, lo, hi, lo, hi, n, ax, ay,
        bx, by);

    CurveOptConfig cfg;
    cfg.gradient_mode = GradientMode::finite_difference;
    cfg.energy_segments = 32;
    cfg.max_iters = 800;
    cfg.step_size = 0.05;
    cfg.plateau_window = 15;
    cfg.plateau_rel_tol = 1e-4;
    cfg.max_control_points = 10;
    ShortenResult r = shorten(z0, z1, p, cfg);

    CHECK(r.d_short < r.d_straight); // the straight line crosses both bumps
    CHECK(std::abs(r.d_short - want) / want < 0.05);
}
