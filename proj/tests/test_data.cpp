#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

#include "latentgeo/data.hpp"
#include "latentgeo/synth.hpp"

using namespace latentgeo;

namespace {

void write_bytes(const std::string& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary);
    out.write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
}

std::vector<unsigned char> be32(unsigned v) {
    return {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
            static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
}

void append(std::vector<unsigned char>& dst, const std::vector<unsigned char>& src) {
    dst.insert(dst.end(), src.begin(), src.end());
}

struct IdxFixture {
    std::string images = "fixture-images-idx3";
    std::string labels = "fixture-labels-idx1";

    IdxFixture(unsigned image_magic = 2051, unsigned label_magic = 2049,
               unsigned n_images = 2, unsigned n_labels = 2) {
        std::vector<unsigned char> im = be32(image_magic);
        append(im, be32(n_images));
        append(im, be32(2));
        append(im, be32(2));
        for (unsigned i = 0; i < n_images; ++i)
            for (unsigned p = 0; p < 4; ++p) im.push_back(static_cast<unsigned char>(i * 100 + p * 10));
        write_bytes(images, im);

        std::vector<unsigned char> lb = be32(label_magic);
        append(lb, be32(n_labels));
        for (unsigned i = 0; i < n_labels; ++i) lb.push_back(static_cast<unsigned char>(2 + i * 2));
        write_bytes(labels, lb);
    }

    ~IdxFixture() {
        std::remove(images.c_str());
        std::remove(labels.c_str());
    }
};

} // namespace

TEST_CASE("load_idx parses a hand-built pair exactly") {
    IdxFixture fx;
    Dataset ds = load_idx(fx.images, fx.labels);
    CHECK(ds.size() == 2);
    CHECK(ds.image_rows == 2);
    CHECK(ds.image_cols == 2);
    CHECK(ds.labels[0] == 2);
    CHECK(ds.labels[1] == 4);
    CHECK(ds.images[0][0] == doctest::Approx(0.0));
    CHECK(ds.images[0][1] == doctest::Approx(10.0 / 255.0));
    CHECK(ds.images[1][0] == doctest::Approx(100.0 / 255.0));
    CHECK(ds.images[1][3] == doctest::Approx(130.0 / 255.0));
}

TEST_CASE("load_idx rejects wrong magic numbers") {
    SUBCASE("label magic gets 2051") {
        IdxFixture fx(2051, 2051);
        CHECK_THROWS_AS(load_idx(fx.images, fx.labels), FormatError);
    }
    SUBCASE("image magic wrong") {
        IdxFixture fx(2049, 2049);
        CHECK_THROWS_AS(load_idx(fx.images, fx.labels), FormatError);
    }
}

TEST_CASE("load_idx rejects count mismatch") {
    IdxFixture fx(2051, 2049, 2, 3);
    CHECK_THROWS_AS(load_idx(fx.images, fx.labels), ConsistencyError);
}

TEST_CASE("idx round trip is exact after normalization") {
    std::set<int> digits{2, 4, 5, 7};
    Dataset ds = synth_digits(3, digits, 11, 0);
    save_idx(ds, "rt-images-idx3", "rt-labels-idx1");
    Dataset back = load_idx("rt-images-idx3", "rt-labels-idx1");
    REQUIRE(back.size() == ds.size());
    CHECK(back.labels == ds.labels);
    for (int i = 0; i < ds.size(); ++i)
        for (int p = 0; p < ds.image_size; ++p)
            CHECK(back.images[i][p] == ds.images[i][p]); // synth quantizes to bytes already
    std::remove("rt-images-idx3");
    std::remove("rt-labels-idx1");
}

TEST_CASE("filter_digits") {
    std::set<int> all{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    Dataset ds = synth_digits(2, {2, 4}, 5, 0);

    SUBCASE("full digit set is the identity") {
        Dataset same = filter_digits(ds, all);
        CHECK(same.size() == ds.size());
        CHECK(same.labels == ds.labels);
    }

    SUBCASE("subset keeps only requested labels, order preserved") {
        Dataset ds35;
        ds35.image_size = 4;
        ds35.image_rows = ds35.image_cols = 2;
        for (int i = 0; i < 3; ++i) {
            ds35.images.push_back(Vec{0.1, 0.2, 0.3, 0.4});
            ds35.labels.push_back(2);
        }
        for (int i = 0; i < 5; ++i) {
            ds35.images.push_back(Vec{0.5, 0.6, 0.7, 0.8});
            ds35.labels.push_back(4);
        }
        Dataset only2 = filter_digits(ds35, {2});
        CHECK(only2.size() == 3);
        for (int lb : only2.labels) CHECK(lb == 2);
    }

    SUBCASE("empty result raises") {
        CHECK_THROWS_AS(filter_digits(ds, {9}), EmptyDataset);
    }
    SUBCASE("invalid digit raises") {
        CHECK_THROWS_AS(filter_digits(ds, {11}), InvalidInput);
        CHECK_THROWS_AS(filter_digits(ds, std::set<int>{}), InvalidInput);
    }
}

TEST_CASE("official MNIST test split count for digits 2,4,5,7" *
          doctest::skip(std::getenv("LATENTGEO_MNIST_DIR") == nullptr)) {
    std::string dir = std::getenv("LATENTGEO_MNIST_DIR");
    Dataset test = load_idx(dir + "/t10k-images-idx3-ubyte", dir + "/t10k-labels-idx1-ubyte");
    REQUIRE(test.size() == 10000);
    Dataset filtered = filter_digits(test, {2, 4, 5, 7});
    // canonical label histogram: 1032 + 982 + 892 + 1028
    CHECK(filtered.size() == 3934);
}
