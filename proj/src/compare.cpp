#include "latentgeo/compare.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "latentgeo/parallel.hpp"
#include "latentgeo/rng.hpp"

namespace latentgeo {

std::vector<PairSample> sample_test_pairs(const Dataset& ds, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidInput("sample_test_pairs: n must be >= 1");
    if (ds.size() < 2 * n)
        throw InvalidInput("sample_test_pairs: dataset holds " + std::to_string(ds.size()) +
                           " images, need " + std::to_string(2 * n));

    // partial Fisher-Yates: first 2n entries are a uniform draw w/o replacement
    std::vector<int> idx(ds.size());
    for (int i = 0; i < ds.size(); ++i) idx[i] = i;
    Rng rng(substream(seed, 0x9a17));
    for (int i = 0; i < 2 * n; ++i) {
        int j = i + int(rng.uniform_int(std::uint64_t(ds.size() - i)));
        std::swap(idx[i], idx[j]);
    }

    std::vector<PairSample> pairs(n);
    for (int k = 0; k < n; ++k) {
        pairs[k].idx_start = idx[2 * k];
        pairs[k].idx_end = idx[2 * k + 1];
        pairs[k].start_image = ds.images[idx[2 * k]];
        pairs[k].end_image = ds.images[idx[2 * k + 1]];
    }
    return pairs;
}

std::vector<ComparisonRow> compare_models(const ModelHandles& model_a,
                                          const ModelHandles& model_b,
                                          const std::vector<PairSample>& pairs,
                                          double threshold, const CurveOptConfig& cfg,
                                          int workers) {
    if (threshold < 0) throw InvalidInput("compare_models: threshold must be >= 0");
    MetricProvider pa = MetricProvider::stochastic(model_a.decoder);
    MetricProvider pb = MetricProvider::stochastic(model_b.decoder);

    std::vector<ComparisonRow> rows(pairs.size());
    parallel_for(int(pairs.size()), workers, [&](int i) {
        ComparisonRow& r = rows[i];
        r.pair_index = i;
        r.z0_a = encode(model_a.encoder, pairs[i].start_image);
        r.z1_a = encode(model_a.encoder, pairs[i].end_image);
        r.z0_b = encode(model_b.encoder, pairs[i].start_image);
        r.z1_b = encode(model_b.encoder, pairs[i].end_image);

        ShortenResult sa = shorten(r.z0_a, r.z1_a, pa, cfg);
        ShortenResult sb = shorten(r.z0_b, r.z1_b, pb, cfg);
        r.d_straight_a = sa.d_straight;
        r.d_short_a = sa.d_short;
        r.ri_a = (sa.d_straight - sa.d_short) / sa.d_straight;
        r.d_straight_b = sb.d_straight;
        r.d_short_b = sb.d_short;
        r.ri_b = (sb.d_straight - sb.d_short) / sb.d_straight;
        r.gap = std::abs(r.ri_a - r.ri_b);
        r.selected = r.gap <= threshold;
    });
    return rows;
}

ImageStrip interpolation_sequence(const StochasticGenerator& gen, const BSplineCurve& curve,
                                  int n_frames, int tile_rows, int tile_cols) {
    if (n_frames < 2) throw InvalidInput("interpolation_sequence: n_frames must be >= 2");
    if (tile_rows * tile_cols != gen.output_dim())
        throw InvalidInput("interpolation_sequence: tile shape != decoder output dim");

    ImageStrip strip;
    strip.tile_rows = tile_rows;
    strip.tile_cols = tile_cols;
    strip.frames = n_frames;
    strip.pixels.assign(std::size_t(tile_rows) * tile_cols * n_frames, 0.0);
    const int width = tile_cols * n_frames;

    for (int f = 0; f < n_frames; ++f) {
        double t = double(f) / (n_frames - 1);
        Vec img = gen.mean(eval(curve, t));
        for (int r = 0; r < tile_rows; ++r)
            for (int c = 0; c < tile_cols; ++c)
                strip.pixels[std::size_t(r) * width + f * tile_cols + c] =
                    img[std::size_t(r) * tile_cols + c];
    }
    return strip;
}

int class_transition_count(const FeatureMap& f, const StochasticGenerator& gen,
                           const BSplineCurve& curve, int n_eval) {
    if (f.kind != FeatureMap::Kind::logistic_regression)
        throw UnsupportedMode("class_transition_count needs a logistic-regression feature");
    if (n_eval < 2) throw InvalidInput("class_transition_count: n_eval must be >= 2");

    int count = 0;
    int prev = -1;
    for (int i = 0; i < n_eval; ++i) {
        double t = double(i) / (n_eval - 1);
        Vec p = feature_forward(f, gen.mean(eval(curve, t)));
        int arg = int(std::max_element(p.begin(), p.end()) - p.begin());
        if (i > 0 && arg != prev) ++count;
        prev = arg;
    }
    return count;
}

void write_comparison_csv(const std::vector<ComparisonRow>& rows, const std::string& path) {
    std::vector<ComparisonRow> sorted = rows;
    std::sort(sorted.begin(), sorted.end(), [](const ComparisonRow& a, const ComparisonRow& b) {
        if (a.gap != b.gap) return a.gap < b.gap;
        return a.pair_index < b.pair_index;
    });

    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "pair_index,ri_a,ri_b,gap,selected,d_straight_a,d_short_a,d_straight_b,d_short_b\n";
    char buf[64];
    auto put = [&](double v, char sep) {
        std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
        out << buf;
    };
    for (const ComparisonRow& r : sorted) {
        out << r.pair_index << ',';
        put(r.ri_a, ',');
        put(r.ri_b, ',');
        put(r.gap, ',');
        out << (r.selected ? 1 : 0) << ',';
        put(r.d_straight_a, ',');
        put(r.d_short_a, ',');
        put(r.d_straight_b, ',');
        put(r.d_short_b, '\n');
    }
}

void write_pgm(const ImageStrip& strip, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    const int width = strip.tile_cols * strip.frames;
    out << "P5\n" << width << " " << strip.tile_rows << "\n255\n";
    for (double v : strip.pixels) {
        double c = std::min(1.0, std::max(0.0, v));
        unsigned char b = static_cast<unsigned char>(std::lround(c * 255.0));
        out.write(reinterpret_cast<char*>(&b), 1);
    }
}

} // namespace latentgeo
