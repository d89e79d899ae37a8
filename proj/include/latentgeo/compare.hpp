#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentgeo/data.hpp"
#include "latentgeo/geodesic.hpp"
#include "latentgeo/training.hpp"

namespace latentgeo {

struct PairSample {
    int idx_start = 0, idx_end = 0;
    Vec start_image, end_image;
};

/// n disjoint pairs drawn uniformly without replacement; all 2n indices are
/// distinct and the draw is a pure function of the seed.
std::vector<PairSample> sample_test_pairs(const Dataset& ds, int n, std::uint64_t seed);

struct ModelHandles {
    Encoder encoder;
    StochasticGenerator decoder;
};

struct ComparisonRow {
    int pair_index = 0;
    Vec z0_a, z1_a, z0_b, z1_b;
    double d_straight_a = 0, d_short_a = 0, ri_a = 0;
    double d_straight_b = 0, d_short_b = 0, ri_b = 0;
    double gap = 0; // |ri_a - ri_b|
    bool selected = false;
};

/// Encodes every pair into both latent spaces (posterior means), shortens
/// between the endpoints under each model's stochastic pull-back metric, and
/// marks rows whose improvement gap is within the threshold. Rows come back
/// in pair order; the CSV writer re-orders them gap-ascending so the most
/// similar pair prints first.
std::vector<ComparisonRow> compare_models(const ModelHandles& model_a,
                                          const ModelHandles& model_b,
                                          const std::vector<PairSample>& pairs,
                                          double threshold, const CurveOptConfig& cfg,
                                          int workers = 0);

struct ImageStrip {
    int tile_rows = 0, tile_cols = 0;
    int frames = 0;
    std::vector<double> pixels; // tile_rows x (tile_cols * frames), row-major, [0,1]
};

/// Decodes mu(gamma(t_i)) at n_frames uniform t into a horizontal strip.
ImageStrip interpolation_sequence(const StochasticGenerator& gen, const BSplineCurve& curve,
                                  int n_frames, int tile_rows, int tile_cols);

/// Number of argmax class switches of f(mu(gamma(t_i))) along a uniform grid
/// of n_eval parameters. Requires a logistic-regression feature map.
int class_transition_count(const FeatureMap& f, const StochasticGenerator& gen,
                           const BSplineCurve& curve, int n_eval);

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path);

/// P5 PGM, 8-bit, frames concatenated horizontally.
void write_pgm(const ImageStrip& strip, const std::string& path);

} // namespace latentgeo
