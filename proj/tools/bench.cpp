// Times the OpenMP kernels against their serial reference implementations
// and checks the outputs agree bit-for-bit.

#include <chrono>
#include <cmath>
#include <cstdio>

#include "latentgeo/fields.hpp"
#include "latentgeo/parallel.hpp"
#include "latentgeo/rng.hpp"
#include "latentgeo/sampling.hpp"
#include "latentgeo/training.hpp"

using namespace latentgeo;

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
    auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

Matrix random_matrix(int r, int c, Rng& rng) {
    Matrix m(r, c);
    for (double& v : m.a) v = rng.normal();
    return m;
}

Mlp random_mlp(const std::vector<int>& dims, Rng& rng) {
    Mlp net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.weight = random_matrix(dims[i + 1], dims[i], rng);
        for (double& v : l.weight.a) v *= 1.0 / std::sqrt(double(dims[i]));
        l.bias.assign(dims[i + 1], 0.0);
        l.act = (i + 2 == dims.size()) ? Activation::identity : Activation::tanh_fn;
        net.layers.push_back(std::move(l));
    }
    return net;
}

StochasticGenerator random_generator(Rng& rng) {
    StochasticGenerator g;
    g.mu_net = random_mlp({2, 24, 16}, rng);
    g.sigma_net = random_mlp({2, 24, 16}, rng);
    g.sigma_net.layers.back().act = Activation::softplus;
    g.sigma_floor = 1e-3;
    return g;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-14s serial %9.1f ms   parallel %9.1f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "bit-identical" : "MISMATCH");
}

} // namespace

int main() {
    Rng rng(42);
    std::printf("workers available: %d\n\n", resolve_workers(0));

    {
        Matrix a = random_matrix(512, 784, rng);
        Matrix b = random_matrix(256, 784, rng);
        auto t0 = std::chrono::steady_clock::now();
        Matrix cs = gemm_nt_serial(a, b);
        double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        Matrix cp = gemm_nt(a, b, 0);
        double tp = ms_since(t0);
        report("gemm_nt", ts, tp, cs.a == cp.a);
    }

    StochasticGenerator gen = random_generator(rng);
    MetricProvider provider = MetricProvider::stochastic(gen);

    {
        Bounds b{-3, 3, -3, 3};
        auto t0 = std::chrono::steady_clock::now();
        GridField gs = scalar_grid_serial(provider, FieldKind::log_condition, b, 81, 81);
        double ts = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        GridField gp = scalar_grid(provider, FieldKind::log_condition, b, 81, 81, 0);
        double tp = ms_since(t0);
        report("scalar_grid", ts, tp, gs.values == gp.values);
    }

    {
        McConfig cfg;
        cfg.n_samples = 24;
        cfg.alpha = 1.0;
        cfg.seed = 7;
        cfg.shorten.max_iters = 200;
        cfg.shorten.quad_points = 128;
        cfg.shorten.energy_segments = 32;
        auto t0 = std::chrono::steady_clock::now();
        McSummary ss = run_monte_carlo_serial(provider, cfg);
        double ts = ms_since(t0);
        cfg.workers = 0;
        t0 = std::chrono::steady_clock::now();
        McSummary sp = run_monte_carlo(provider, cfg);
        double tp = ms_since(t0);
        bool same = ss.mean == sp.mean && ss.stddev == sp.stddev &&
                    ss.records.size() == sp.records.size();
        for (std::size_t i = 0; same && i < ss.records.size(); ++i)
            same = ss.records[i].rel_improvement == sp.records[i].rel_improvement;
        report("monte_carlo", ts, tp, same);
    }

    return 0;
}
