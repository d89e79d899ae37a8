#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "latentgeo/cli.hpp"
#include "latentgeo/network.hpp"
#include "latentgeo/manifest.hpp"
#include "oracles.hpp"

using namespace latentgeo;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::path("cli_test_tmp") / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all("cli_test_tmp"); }
    std::string str(const std::string& sub = "") const {
        return (sub.empty() ? path : path / sub).string();
    }
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

std::string linear_model_file(const TempDir& dir) {
    Mlp net;
    net.layers.push_back(
        Layer{oracle::random_matrix(5, 2, 701), Vec(5, 0.0), Activation::identity});
    std::string path = dir.str("linear.json");
    save_model(net, path);
    return path;
}

std::string stochastic_model_file(const TempDir& dir) {
    StochasticGenerator gen = oracle::random_generator(2, 6, 702);
    std::string path = dir.str("stoch.json");
    save_model(gen, path);
    return path;
}

} // namespace

TEST_CASE("usage errors exit with code 2") {
    CHECK(cli_dispatch({"no-such-command"}) == 2);
    CHECK(cli_dispatch({"shorten", "--no-such-flag", "1"}) == 2);
    CHECK(cli_dispatch({}) == 2);
    CHECK(cli_dispatch({"--help"}) == 0);
}

TEST_CASE("domain errors exit with code 1") {
    TempDir dir("domain");
    CHECK(cli_dispatch({"shorten", "--model", dir.str("missing.json"), "--from", "0,0",
                        "--to", "1,1", "--out-dir", dir.str("out")}) == 1);
}

TEST_CASE("shorten on a linear generator reports a negligible improvement") {
    TempDir dir("shorten");
    std::string model = linear_model_file(dir);
    int rc = cli_dispatch({"shorten", "--model", model, "--from", "-1,0.5", "--to", "1,-0.5",
                           "--max-iters", "150", "--out-dir", dir.str("out")});
    CHECK(rc == 0);
    auto result = nlohmann::json::parse(slurp(dir.str("out/result.json")));
    CHECK(result.at("rel_improvement").get<double>() < 0.001);
    CHECK(fs::exists(dir.str("out/curve.json")));
    CHECK(fs::exists(dir.str("out/manifest.json")));
}

TEST_CASE("mc-improve is byte-deterministic across reruns and worker counts") {
    TempDir dir("mc");
    std::string model = stochastic_model_file(dir);
    std::vector<std::string> base{"mc-improve", "--model", model,   "--alpha", "1.0",
                                  "--samples",  "6",       "--seed", "11",
                                  "--max-iters", "60"};

    auto run = [&](const std::string& out, const std::string& workers) {
        std::vector<std::string> args = base;
        args.insert(args.end(), {"--workers", workers, "--out-dir", dir.str(out)});
        REQUIRE(cli_dispatch(args) == 0);
    };
    run("a", "1");
    run("b", "1");
    run("c", "2");

    CHECK(slurp(dir.str("a/records.csv")) == slurp(dir.str("b/records.csv")));
    CHECK(slurp(dir.str("a/records.csv")) == slurp(dir.str("c/records.csv")));
    CHECK(slurp(dir.str("a/summary.json")) == slurp(dir.str("b/summary.json")));
    CHECK(slurp(dir.str("a/summary.json")) == slurp(dir.str("c/summary.json")));
}

TEST_CASE("replaying a manifest reproduces outputs byte-identically") {
    TempDir dir("replay");
    std::string model = stochastic_model_file(dir);
    REQUIRE(cli_dispatch({"mc-improve", "--model", model, "--alpha", "0.8", "--samples",
                          "5", "--seed", "3", "--max-iters", "50", "--workers", "1",
                          "--out-dir", dir.str("first")}) == 0);
    REQUIRE(cli_dispatch({"replay", dir.str("first/manifest.json"), "--out-dir",
                          dir.str("second"), "--workers", "2"}) == 0);
    CHECK(slurp(dir.str("first/records.csv")) == slurp(dir.str("second/records.csv")));
    CHECK(slurp(dir.str("first/summary.json")) == slurp(dir.str("second/summary.json")));

    auto manifest = load_manifest(dir.str("first/manifest.json"));
    CHECK(manifest.at("command") == "mc-improve");
    CHECK(manifest.at("config").at("samples") == 5);
}

TEST_CASE("grid and streamlines run and replay deterministically") {
    TempDir dir("grid");
    std::string model = stochastic_model_file(dir);
    REQUIRE(cli_dispatch({"grid", "--model", model, "--kind", "log-sqrt-det", "--bounds",
                          "-2,2,-2,2", "--nx", "11", "--ny", "9", "--workers", "2",
                          "--out-dir", dir.str("g1")}) == 0);
    REQUIRE(cli_dispatch({"replay", dir.str("g1/manifest.json"), "--out-dir", dir.str("g2"),
                          "--workers", "1"}) == 0);
    CHECK(slurp(dir.str("g1/grid.csv")) == slurp(dir.str("g2/grid.csv")));

    REQUIRE(cli_dispatch({"streamlines", "--model", model, "--kind", "max", "--seed-point",
                          "0.1,0.2", "--seed-point", "-0.4,0.3", "--steps", "40",
                          "--step-length", "0.05", "--out-dir", dir.str("s1")}) == 0);
    REQUIRE(cli_dispatch({"replay", dir.str("s1/manifest.json"), "--out-dir",
                          dir.str("s2")}) == 0);
    CHECK(slurp(dir.str("s1/streamlines.csv")) == slurp(dir.str("s2/streamlines.csv")));
}

TEST_CASE("check-jacobian passes on a smooth model") {
    TempDir dir("jac");
    std::string model = stochastic_model_file(dir);
    CHECK(cli_dispatch({"check-jacobian", "--model", model, "--points", "10", "--out-dir",
                        dir.str("out")}) == 0);
    auto report = nlohmann::json::parse(slurp(dir.str("out/report.json")));
    CHECK(report.at("pass").get<bool>());
    CHECK(report.at("max_rel_error").get<double>() < 1e-4);
}

TEST_CASE("make-dataset write/read round trip through the data module") {
    TempDir dir("mkds");
    REQUIRE(cli_dispatch({"make-dataset", "--out-dir", dir.str("ds"), "--train-per-class",
                          "3", "--test-per-class", "2", "--digits", "2,7", "--seed",
                          "9"}) == 0);
    REQUIRE(cli_dispatch({"replay", dir.str("ds/manifest.json"), "--out-dir",
                          dir.str("ds2")}) == 0);
    CHECK(slurp(dir.str("ds/train-images-idx3-ubyte")) ==
          slurp(dir.str("ds2/train-images-idx3-ubyte")));
    CHECK(slurp(dir.str("ds/t10k-labels-idx1-ubyte")) ==
          slurp(dir.str("ds2/t10k-labels-idx1-ubyte")));
}
