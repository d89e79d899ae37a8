#include <doctest.h>

#include <cmath>

#include "latentgeo/fields.hpp"
#include "latentgeo/rng.hpp"
#include "oracles.hpp"

using namespace latentgeo;

namespace {

Mlp linear_net(const Matrix& a) {
    Mlp net;
    net.layers.push_back(Layer{a, Vec(a.rows, 0.0), Activation::identity});
    return net;
}

Matrix diag2(double a, double b) {
    Matrix m(2, 2);
    m(0, 0) = a;
    m(1, 1) = b;
    return m;
}

} // namespace

TEST_CASE("identity generator: both scalar fields vanish everywhere") {
    MetricProvider p = MetricProvider::deterministic(linear_net(Matrix::identity(2)));
    Bounds b{-2, 2, -2, 2};
    GridField cond = scalar_grid(p, FieldKind::log_condition, b, 9, 9);
    GridField det = scalar_grid(p, FieldKind::log_sqrt_det, b, 9, 9);
    for (double v : cond.values) CHECK(std::abs(v) < 1e-12);
    for (double v : det.values) CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("diag(3,1) generator: log condition number is ln 9 everywhere") {
    MetricProvider p = MetricProvider::deterministic(linear_net(diag2(3, 1)));
    GridField g = scalar_grid(p, FieldKind::log_condition, Bounds{-1, 1, -1, 1}, 7, 7);
    for (double v : g.values) CHECK(v == doctest::Approx(std::log(9.0)).epsilon(1e-9));
}

TEST_CASE("grid values match standalone recomputation at random nodes") {
    StochasticGenerator gen = oracle::random_generator(2, 6, 301);
    MetricProvider p = MetricProvider::stochastic(gen);
    Bounds b{-2, 2, -2, 2};
    const int nx = 21, ny = 17;
    GridField g = scalar_grid(p, FieldKind::log_sqrt_det, b, nx, ny);

    Rng rng(302);
    for (int trial = 0; trial < 5; ++trial) {
        int ix = int(rng.uniform_int(nx)), iy = int(rng.uniform_int(ny));
        Vec z{b.xmin + (b.xmax - b.xmin) * ix / (nx - 1),
              b.ymin + (b.ymax - b.ymin) * iy / (ny - 1)};
        CHECK(g.at(ix, iy) == doctest::Approx(log_sqrt_det(p.metric_at(z))).epsilon(1e-12));
    }
}

TEST_CASE("parallel grid equals the serial reference bitwise") {
    StochasticGenerator gen = oracle::random_generator(2, 5, 303);
    MetricProvider p = MetricProvider::stochastic(gen);
    Bounds b{-3, 3, -3, 3};
    GridField par = scalar_grid(p, FieldKind::log_condition, b, 33, 29, 2);
    GridField ser = scalar_grid_serial(p, FieldKind::log_condition, b, 33, 29);
    CHECK(par.values == ser.values);
}

TEST_CASE("singular nodes become NaN markers and the scan continues") {
    MetricProvider p = MetricProvider::custom(2, [](const Vec& z) {
        SymMatrix m(2);
        m.set(0, 0, z[0] > 0 ? 1.0 : 0.0); // singular half plane
        m.set(1, 1, 1.0);
        return m;
    });
    GridField g = scalar_grid(p, FieldKind::log_condition, Bounds{-1, 1, -1, 1}, 5, 5);
    int nans = 0, finite = 0;
    for (double v : g.values) (std::isnan(v) ? nans : finite)++;
    CHECK(nans > 0);
    CHECK(finite > 0);
}

TEST_CASE("constant diag(3,1) streamlines run along the axes") {
    MetricProvider p = MetricProvider::deterministic(linear_net(diag2(3, 1)));
    Bounds b{-4, 4, -4, 4};
    std::vector<Vec> seeds{{-1.0, 0.5}, {0.3, -0.2}};
    const double step = 0.05;
    const int n_steps = 40;

    // metric diag(9,1): max eigenvector is x, min eigenvector is y
    StreamlineSet smax = streamlines(p, EigKind::max_eig, seeds, step, n_steps, b);
    for (std::size_t li = 0; li < smax.lines.size(); ++li) {
        const auto& line = smax.lines[li];
        CHECK(int(line.size()) <= n_steps + 1);
        for (std::size_t i = 1; i < line.size(); ++i) {
            CHECK(std::abs(line[i][1] - seeds[li][1]) < 1e-9);
            double seg = std::hypot(line[i][0] - line[i - 1][0], line[i][1] - line[i - 1][1]);
            CHECK(std::abs(seg - step) < 1e-9);
        }
    }

    StreamlineSet smin = streamlines(p, EigKind::min_eig, seeds, step, n_steps, b);
    for (std::size_t li = 0; li < smin.lines.size(); ++li) {
        const auto& line = smin.lines[li];
        for (std::size_t i = 1; i < line.size(); ++i)
            CHECK(std::abs(line[i][0] - seeds[li][0]) < 1e-9);
    }
}

TEST_CASE("consecutive streamline directions keep a positive inner product") {
    StochasticGenerator gen = oracle::random_generator(2, 6, 304);
    MetricProvider p = MetricProvider::stochastic(gen);
    Bounds b{-3, 3, -3, 3};
    StreamlineSet s =
        streamlines(p, EigKind::max_eig, {{0.2, 0.1}, {-0.5, 0.8}}, 0.04, 60, b);
    for (const auto& line : s.lines) {
        for (std::size_t i = 2; i < line.size(); ++i) {
            double ax = line[i - 1][0] - line[i - 2][0];
            double ay = line[i - 1][1] - line[i - 2][1];
            double bx2 = line[i][0] - line[i - 1][0];
            double by2 = line[i][1] - line[i - 1][1];
            CHECK(ax * bx2 + ay * by2 > 0.0);
        }
    }
}

TEST_CASE("reversed seeding retraces a constant-field streamline") {
    MetricProvider p = MetricProvider::deterministic(linear_net(diag2(3, 1)));
    Bounds b{-4, 4, -4, 4};
    const double step = 0.05;
    StreamlineSet fwd = streamlines(p, EigKind::max_eig, {{-1.0, 0.0}}, step, 30, b);
    const auto& line = fwd.lines[0];
    // seed at the far end with the initial direction flipped
    Vec flipped{-(line.back()[0] - line[line.size() - 2][0]),
                -(line.back()[1] - line[line.size() - 2][1])};
    StreamlineSet back =
        streamlines(p, EigKind::max_eig, {line.back()}, step, 30, b, flipped);
    double hausdorff = 0.0;
    for (const Vec& q : back.lines[0]) {
        double best = 1e300;
        for (const Vec& r : line)
            best = std::min(best, std::hypot(q[0] - r[0], q[1] - r[1]));
        hausdorff = std::max(hausdorff, best);
    }
    CHECK(hausdorff <= 2.0 * step);
}
