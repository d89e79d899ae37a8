#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latentgeo/geodesic.hpp"
#include "latentgeo/rng.hpp"

namespace latentgeo {

struct McConfig {
    int n_samples = 100;
    double alpha = 1.0; // step size along the maximal eigenvector
    std::uint64_t seed = 0;
    CurveOptConfig shorten;
    int histogram_bins = 50;
    int workers = 0;

    void validate() const;
};

struct ImprovementRecord {
    int index = 0;
    Vec x_a, x_b;
    double d_straight = 0.0;
    double d_short = 0.0;
    double rel_improvement = 0.0; // (d_straight - d_short) / d_straight
    bool fallback = false;
    bool failed = false; // excluded from the statistics
};

struct McSummary {
    double mean = 0.0;
    double stddev = 0.0; // sample standard deviation (n-1)
    std::vector<double> bin_edges;
    std::vector<int> bin_counts;
    int n_samples = 0;
    int n_failed = 0;
    int n_fallback = 0;
    std::vector<ImprovementRecord> records;
};

/// One Algorithm-1 draw: x_a ~ N(0, I_d); v = unit eigenvector of the
/// largest metric eigenvalue at x_a, sign-flipped so it points towards the
/// origin (v . -x_a >= 0; an exact zero keeps the computed sign);
/// x_b = x_a + alpha * v.
std::pair<Vec, Vec> sample_pair(const MetricProvider& p, double alpha, Rng& rng);

/// Expected worst-case relative improvement. The RNG of sample i is derived
/// from (seed, i), so records are identical for any worker count or
/// execution order. Per-sample failures are recorded and skipped; more than
/// 10% failures aborts with RunError.
McSummary run_monte_carlo(const MetricProvider& p, const McConfig& cfg);

/// Plain-loop reference used to pin down the parallel version in tests.
McSummary run_monte_carlo_serial(const MetricProvider& p, const McConfig& cfg);

void write_records_csv(const McSummary& s, const std::string& path);
void write_summary_json(const McSummary& s, const std::string& path);

} // namespace latentgeo
