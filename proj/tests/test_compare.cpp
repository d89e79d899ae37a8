#include <doctest.h>

#include <cmath>
#include <set>

#include "latentgeo/compare.hpp"
#include "latentgeo/rng.hpp"
#include "latentgeo/synth.hpp"
#include "oracles.hpp"

using namespace latentgeo;

namespace {

// small-image world (4x4 pixels) so compare_models runs in milliseconds
Dataset tiny_dataset(int n, std::uint64_t seed) {
    Dataset ds;
    ds.image_size = 16;
    ds.image_rows = ds.image_cols = 4;
    Rng rng(substream(seed, 0x7a));
    for (int i = 0; i < n; ++i) {
        Vec img(16);
        for (double& v : img) v = rng.uniform();
        ds.images.push_back(img);
        ds.labels.push_back(i % 3);
    }
    return ds;
}

ModelHandles tiny_model(std::uint64_t seed) {
    ModelHandles h;
    h.decoder = oracle::random_generator(2, 16, seed);
    h.encoder.net = oracle::random_mlp(
        {16, 8, 4}, {Activation::tanh_fn, Activation::identity}, seed + 5);
    h.encoder.latent_dim = 2;
    return h;
}

CurveOptConfig quick_opt() {
    CurveOptConfig cfg;
    cfg.max_iters = 80;
    cfg.quad_points = 96;
    cfg.energy_segments = 24;
    return cfg;
}

} // namespace

TEST_CASE("sample_test_pairs draws disjoint deterministic pairs") {
    Dataset ds = tiny_dataset(100, 1);
    std::vector<PairSample> a = sample_test_pairs(ds, 20, 9);
    std::vector<PairSample> b = sample_test_pairs(ds, 20, 9);
    REQUIRE(a.size() == 20);

    std::set<int> seen;
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].idx_start == b[i].idx_start);
        CHECK(a[i].idx_end == b[i].idx_end);
        seen.insert(a[i].idx_start);
        seen.insert(a[i].idx_end);
        CHECK(a[i].start_image == ds.images[a[i].idx_start]);
    }
    CHECK(seen.size() == 40); // all 2n indices distinct

    std::vector<PairSample> c = sample_test_pairs(ds, 20, 10);
    bool any_differ = false;
    for (std::size_t i = 0; i < a.size(); ++i)
        any_differ |= (a[i].idx_start != c[i].idx_start || a[i].idx_end != c[i].idx_end);
    CHECK(any_differ);

    CHECK_THROWS_AS(sample_test_pairs(ds, 51, 1), InvalidInput);
}

TEST_CASE("self-comparison has zero gaps and selects everything") {
    Dataset ds = tiny_dataset(30, 2);
    ModelHandles m = tiny_model(600);
    std::vector<PairSample> pairs = sample_test_pairs(ds, 5, 3);
    std::vector<ComparisonRow> rows = compare_models(m, m, pairs, 0.0, quick_opt(), 2);
    for (const ComparisonRow& r : rows) {
        CHECK(r.gap == 0.0);
        CHECK(r.ri_a == r.ri_b);
        CHECK(r.selected);
    }
}

TEST_CASE("swapping the models swaps columns and preserves gaps/selection") {
    Dataset ds = tiny_dataset(30, 4);
    ModelHandles ma = tiny_model(610), mb = tiny_model(620);
    std::vector<PairSample> pairs = sample_test_pairs(ds, 4, 5);
    std::vector<ComparisonRow> ab = compare_models(ma, mb, pairs, 0.05, quick_opt());
    std::vector<ComparisonRow> ba = compare_models(mb, ma, pairs, 0.05, quick_opt());
    for (std::size_t i = 0; i < ab.size(); ++i) {
        CHECK(ab[i].ri_a == ba[i].ri_b);
        CHECK(ab[i].ri_b == ba[i].ri_a);
        CHECK(ab[i].gap == ba[i].gap);
        CHECK(ab[i].selected == ba[i].selected);
    }
}

TEST_CASE("selection is monotone in the threshold") {
    Dataset ds = tiny_dataset(30, 6);
    ModelHandles ma = tiny_model(630), mb = tiny_model(640);
    std::vector<PairSample> pairs = sample_test_pairs(ds, 6, 7);
    std::vector<ComparisonRow> t1 = compare_models(ma, mb, pairs, 0.01, quick_opt());
    std::vector<ComparisonRow> t2 = compare_models(ma, mb, pairs, 0.10, quick_opt());
    for (std::size_t i = 0; i < t1.size(); ++i) {
        if (t1[i].selected) CHECK(t2[i].selected);
        CHECK(t1[i].selected == (t1[i].gap <= 0.01));
        CHECK(t2[i].selected == (t2[i].gap <= 0.10));
    }
}

TEST_CASE("interpolation_sequence decodes the curve endpoints exactly") {
    StochasticGenerator gen = oracle::random_generator(2, 16, 650);
    BSplineCurve c = straight_line_curve(Vec{-1.0, 0.5}, Vec{1.0, -0.5}, 2);

    ImageStrip two = interpolation_sequence(gen, c, 2, 4, 4);
    Vec first = gen.mean(eval(c, 0.0));
    Vec last = gen.mean(eval(c, 1.0));
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 4; ++col) {
            CHECK(two.pixels[r * 8 + col] == first[r * 4 + col]);
            CHECK(two.pixels[r * 8 + 4 + col] == last[r * 4 + col]);
        }

    ImageStrip strip = interpolation_sequence(gen, c, 7, 4, 4);
    CHECK(strip.frames == 7);
    for (int r = 0; r < 4; ++r)
        for (int col = 0; col < 4; ++col) {
            CHECK(strip.pixels[r * 28 + col] == first[r * 4 + col]);
            CHECK(strip.pixels[r * 28 + 24 + col] == last[r * 4 + col]);
        }

    CHECK_THROWS_AS(interpolation_sequence(gen, c, 1, 4, 4), InvalidInput);
    CHECK_THROWS_AS(interpolation_sequence(gen, c, 4, 5, 5), InvalidInput);
}

TEST_CASE("class_transition_count") {
    StochasticGenerator gen = oracle::random_generator(2, 16, 660);
    FeatureMap f = FeatureMap::logistic(oracle::random_matrix(4, 16, 661), Vec(4, 0.0));

    SUBCASE("constant curve never transitions") {
        BSplineCurve c;
        for (int i = 0; i < 4; ++i) c.control_points.push_back(Vec{0.3, -0.2});
        c.knots = {0, 0, 0, 0, 1, 1, 1, 1};
        CHECK(class_transition_count(f, gen, c, 50) == 0);
    }

    SUBCASE("count matches a direct argmax-sequence oracle") {
        BSplineCurve c = oracle::random_curve(2, 6, 662);
        const int n_eval = 64;
        std::vector<int> seq;
        for (int i = 0; i < n_eval; ++i) {
            Vec p = feature_forward(f, gen.mean(eval(c, double(i) / (n_eval - 1))));
            seq.push_back(int(std::max_element(p.begin(), p.end()) - p.begin()));
        }
        int want = 0;
        for (int i = 1; i < n_eval; ++i) want += seq[i] != seq[i - 1];
        CHECK(class_transition_count(f, gen, c, n_eval) == want);
    }

    SUBCASE("identity feature is refused") {
        BSplineCurve c = oracle::random_curve(2, 4, 663);
        CHECK_THROWS_AS(class_transition_count(FeatureMap::identity_map(), gen, c, 10),
                        UnsupportedMode);
    }
}
