#include "latentgeo/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "latentgeo/compare.hpp"
#include "latentgeo/data.hpp"
#include "latentgeo/fields.hpp"
#include "latentgeo/geodesic.hpp"
#include "latentgeo/manifest.hpp"
#include "latentgeo/metric.hpp"
#include "latentgeo/network.hpp"
#include "latentgeo/rng.hpp"
#include "latentgeo/sampling.hpp"
#include "latentgeo/synth.hpp"
#include "latentgeo/training.hpp"
#include "latentgeo/version.hpp"

namespace latentgeo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("LATENTGEO_OUT");
    return env && *env ? env : ".";
}

std::string out_path(const json& cfg, const std::string& name) {
    std::string dir = cfg.at("out_dir").get<std::string>();
    fs::create_directories(dir);
    return dir + "/" + name;
}

Vec parse_vec(const std::string& csv) {
    Vec v;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(std::stod(tok));
    if (v.empty()) throw InvalidInput("expected comma-separated numbers, got '" + csv + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& csv) {
    std::vector<int> v;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) v.push_back(std::stoi(tok));
    return v;
}

Bounds parse_bounds(const std::string& csv) {
    Vec v = parse_vec(csv);
    if (v.size() != 4) throw InvalidInput("--bounds needs xmin,xmax,ymin,ymax");
    return Bounds{v[0], v[1], v[2], v[3]};
}

Dataset load_dataset(const json& cfg) {
    Dataset ds = load_idx(cfg.at("images").get<std::string>(),
                          cfg.at("labels").get<std::string>());
    std::string digits = cfg.value("digits", "");
    if (!digits.empty()) ds = filter_digits(ds, parse_digit_set(digits));
    return ds;
}

/// Logistic features travel through the model schema as a single
/// identity-activation layer holding the logits map.
FeatureMap load_feature(const std::string& path) {
    Mlp net = load_mlp(path);
    if (net.layers.size() != 1 || net.layers[0].act != Activation::identity)
        throw ValidationError("'" + path + "': feature file must hold one linear layer");
    return FeatureMap::logistic(net.layers[0].weight, net.layers[0].bias);
}

void save_feature(const FeatureMap& f, const std::string& path) {
    Mlp net;
    net.layers.push_back(Layer{f.weight, f.bias, Activation::identity});
    save_model(net, path);
}

struct ProviderInfo {
    MetricProvider provider;
    bool stochastic = false;
    bool feature = false;
};

ProviderInfo make_provider(const json& cfg) {
    Model m = load_model(cfg.at("model").get<std::string>());
    std::string feature_path = cfg.value("feature", "");
    bool has_feature = !feature_path.empty();

    if (auto* net = std::get_if<Mlp>(&m)) {
        if (has_feature)
            return {MetricProvider::feature_deterministic(std::move(*net),
                                                          load_feature(feature_path)),
                    false, true};
        return {MetricProvider::deterministic(std::move(*net)), false, false};
    }
    auto gen = std::get<StochasticGenerator>(std::move(m));
    if (has_feature)
        return {MetricProvider::feature_stochastic(std::move(gen), load_feature(feature_path)),
                true, true};
    return {MetricProvider::stochastic(std::move(gen)), true, false};
}

CurveOptConfig opt_from_cfg(const json& cfg, bool telescoping_available) {
    CurveOptConfig c;
    c.quad_points = cfg.value("quad_points", 256);
    c.energy_segments = cfg.value("segments", 64);
    c.step_size = cfg.value("step_size", 1e-2);
    c.max_iters = cfg.value("max_iters", 2000);
    c.plateau_window = cfg.value("plateau_window", 20);
    c.plateau_rel_tol = cfg.value("plateau_tol", 1e-3);
    c.max_control_points = cfg.value("max_control_points", 12);
    std::string gm = cfg.value("grad_mode", "auto");
    if (gm == "exact")
        c.gradient_mode = GradientMode::exact_vjp;
    else if (gm == "fd")
        c.gradient_mode = GradientMode::finite_difference;
    else
        c.gradient_mode = telescoping_available ? GradientMode::exact_vjp
                                                : GradientMode::finite_difference;
    return c;
}

TrainConfig train_from_cfg(const json& cfg) {
    TrainConfig t;
    t.epochs = cfg.value("epochs", 20);
    t.batch_size = cfg.value("batch_size", 64);
    t.learning_rate = cfg.value("lr", 3e-3);
    t.seed = cfg.value("seed", std::uint64_t(1));
    t.latent_dim = cfg.value("latent_dim", 2);
    if (cfg.contains("hidden")) t.hidden = parse_int_list(cfg.at("hidden").get<std::string>());
    t.sigma_floor = cfg.value("sigma_floor", 1e-4);
    t.holdout_fraction = cfg.value("holdout", 0.1);
    t.kl_warmup_epochs = cfg.value("kl_warmup", 5);
    t.kl_weight = cfg.value("kl_weight", 1.0);
    t.fixed_sigma_epochs = cfg.value("fixed_sigma_epochs", -1);
    t.workers = cfg.value("workers", 1);
    return t;
}

void finish(const std::string& command, const json& cfg,
            const std::vector<std::string>& outputs) {
    write_manifest(cfg.at("out_dir").get<std::string>(), make_manifest(command, cfg, outputs));
}

// ---------------------------------------------------------------------------
// subcommand runners

int run_make_dataset(const json& cfg) {
    std::set<int> digits = parse_digit_set(cfg.at("digits").get<std::string>());
    std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    Dataset train = synth_digits(cfg.at("train_per_class").get<int>(), digits, seed, 0);
    Dataset test = synth_digits(cfg.at("test_per_class").get<int>(), digits, seed, 1);

    std::vector<std::string> outputs{"train-images-idx3-ubyte", "train-labels-idx1-ubyte",
                                     "t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"};
    save_idx(train, out_path(cfg, outputs[0]), out_path(cfg, outputs[1]));
    save_idx(test, out_path(cfg, outputs[2]), out_path(cfg, outputs[3]));
    finish("make-dataset", cfg, outputs);
    std::cout << "wrote " << train.size() << " train / " << test.size() << " test images\n";
    return 0;
}

int run_train_vae(const json& cfg) {
    Dataset ds = load_dataset(cfg);
    TrainConfig tc = train_from_cfg(cfg);
    VaeTrainResult r = train_vae(ds, tc);

    save_model(r.decoder, out_path(cfg, "decoder.json"));
    save_model(r.encoder.net, out_path(cfg, "encoder.json"));
    {
        std::ofstream log(out_path(cfg, "training_log.csv"), std::ios::binary);
        log << "epoch,holdout_elbo\n";
        char buf[48];
        std::snprintf(buf, sizeof buf, "0,%.17g\n", r.initial_elbo);
        log << buf;
        for (std::size_t e = 0; e < r.holdout_elbo.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e + 1, r.holdout_elbo[e]);
            log << buf;
        }
    }
    finish("train-vae", cfg, {"decoder.json", "encoder.json", "training_log.csv"});
    std::cout << "train-vae: " << ds.size() << " images, holdout ELBO " << r.initial_elbo
              << " -> " << r.holdout_elbo.back() << "\n";
    return 0;
}

int run_train_logreg(const json& cfg) {
    Dataset ds = load_dataset(cfg);
    TrainConfig tc = train_from_cfg(cfg);
    LogregTrainResult r = train_logreg(ds, tc);

    save_feature(r.feature, out_path(cfg, "logreg.json"));
    {
        std::ofstream log(out_path(cfg, "training_log.csv"), std::ios::binary);
        log << "epoch,mean_cross_entropy\n";
        char buf[48];
        for (std::size_t e = 0; e < r.loss_history.size(); ++e) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g\n", e + 1, r.loss_history[e]);
            log << buf;
        }
    }
    {
        json metrics{{"train_accuracy", r.train_accuracy}, {"classes", r.class_labels}};
        std::ofstream mf(out_path(cfg, "metrics.json"), std::ios::binary);
        mf << metrics.dump(1) << "\n";
    }
    finish("train-logreg", cfg, {"logreg.json", "training_log.csv", "metrics.json"});
    std::cout << "train-logreg: accuracy " << r.train_accuracy << " on " << ds.size()
              << " images\n";
    return 0;
}

int run_shorten(const json& cfg) {
    ProviderInfo pi = make_provider(cfg);
    Vec z0 = parse_vec(cfg.at("from").get<std::string>());
    Vec z1 = parse_vec(cfg.at("to").get<std::string>());
    CurveOptConfig oc = opt_from_cfg(cfg, pi.provider.has_output_energy());

    ShortenResult r = shorten(z0, z1, pi.provider, oc);
    double ri = (r.d_straight - r.d_short) / r.d_straight;

    save_curve(r.curve, out_path(cfg, "curve.json"));
    {
        json res{{"d_straight", r.d_straight},   {"d_short", r.d_short},
                 {"rel_improvement", ri},        {"iterations", r.iterations},
                 {"control_points", r.control_points}, {"fallback_used", r.fallback_used}};
        std::ofstream rf(out_path(cfg, "result.json"), std::ios::binary);
        rf << res.dump(1) << "\n";
    }
    finish("shorten", cfg, {"curve.json", "result.json"});
    std::cout << "shorten: d_straight " << r.d_straight << ", d_short " << r.d_short
              << ", improvement " << ri << (r.fallback_used ? " (fallback)" : "") << "\n";
    return 0;
}

int run_mc_improve(const json& cfg) {
    ProviderInfo pi = make_provider(cfg);
    McConfig mc;
    mc.n_samples = cfg.at("samples").get<int>();
    mc.alpha = cfg.at("alpha").get<double>();
    mc.seed = cfg.at("seed").get<std::uint64_t>();
    mc.histogram_bins = cfg.value("bins", 50);
    mc.workers = cfg.value("workers", 0);
    mc.shorten = opt_from_cfg(cfg, pi.provider.has_output_energy());

    McSummary s = run_monte_carlo(pi.provider, mc);
    write_records_csv(s, out_path(cfg, "records.csv"));
    write_summary_json(s, out_path(cfg, "summary.json"));
    finish("mc-improve", cfg, {"records.csv", "summary.json"});
    std::cout << "mc-improve: mean " << s.mean << ", std " << s.stddev << ", fallback "
              << s.n_fallback << "/" << s.n_samples << ", failed " << s.n_failed << "\n";
    return 0;
}

int run_grid(const json& cfg) {
    ProviderInfo pi = make_provider(cfg);
    std::string kind_name = cfg.at("kind").get<std::string>();
    FieldKind kind = kind_name == "log-cond" ? FieldKind::log_condition
                                             : FieldKind::log_sqrt_det;
    Bounds b = parse_bounds(cfg.at("bounds").get<std::string>());
    GridField g = scalar_grid(pi.provider, kind, b, cfg.at("nx").get<int>(),
                              cfg.at("ny").get<int>(), cfg.value("workers", 0));
    write_grid_csv(g, out_path(cfg, "grid.csv"));
    finish("grid", cfg, {"grid.csv"});
    int missing = 0;
    for (double v : g.values) missing += std::isnan(v) ? 1 : 0;
    std::cout << "grid: " << g.nx << "x" << g.ny << " nodes, " << missing << " singular\n";
    return 0;
}

int run_streamlines(const json& cfg) {
    ProviderInfo pi = make_provider(cfg);
    EigKind kind = cfg.at("kind").get<std::string>() == "min" ? EigKind::min_eig
                                                              : EigKind::max_eig;
    Bounds b = parse_bounds(cfg.at("bounds").get<std::string>());
    std::vector<Vec> seeds;
    for (const auto& sp : cfg.at("seed_points")) seeds.push_back(parse_vec(sp.get<std::string>()));
    StreamlineSet s = streamlines(pi.provider, kind, seeds,
                                  cfg.at("step_length").get<double>(),
                                  cfg.at("steps").get<int>(), b);
    write_streamlines_csv(s, out_path(cfg, "streamlines.csv"));
    finish("streamlines", cfg, {"streamlines.csv"});
    std::cout << "streamlines: " << s.lines.size() << " lines\n";
    return 0;
}

ModelHandles load_handles(const std::string& dir) {
    ModelHandles h;
    h.decoder = load_stochastic(dir + "/decoder.json");
    h.encoder.net = load_mlp(dir + "/encoder.json");
    h.encoder.latent_dim = h.decoder.latent_dim();
    if (h.encoder.net.output_dim() != 2 * h.encoder.latent_dim)
        throw ValidationError("'" + dir + "': encoder output dim != 2 * latent dim");
    return h;
}

int run_compare(const json& cfg) {
    Dataset ds = load_dataset(cfg);
    ModelHandles a = load_handles(cfg.at("model_a").get<std::string>());
    ModelHandles b = load_handles(cfg.at("model_b").get<std::string>());
    std::vector<PairSample> pairs =
        sample_test_pairs(ds, cfg.at("pairs").get<int>(), cfg.at("seed").get<std::uint64_t>());
    CurveOptConfig oc = opt_from_cfg(cfg, true);
    std::vector<ComparisonRow> rows = compare_models(
        a, b, pairs, cfg.at("threshold").get<double>(), oc, cfg.value("workers", 0));
    write_comparison_csv(rows, out_path(cfg, "comparison.csv"));
    finish("compare", cfg, {"comparison.csv"});
    int selected = 0;
    for (const auto& r : rows) selected += r.selected;
    std::cout << "compare: " << selected << "/" << rows.size() << " pairs selected\n";
    return 0;
}

int run_interp(const json& cfg) {
    Dataset ds = load_dataset(cfg);
    StochasticGenerator dec = load_stochastic(cfg.at("model").get<std::string>());
    Encoder enc;
    enc.net = load_mlp(cfg.at("encoder").get<std::string>());
    enc.latent_dim = dec.latent_dim();
    FeatureMap feat = load_feature(cfg.at("feature").get<std::string>());

    int from = cfg.at("from_idx").get<int>();
    int to = cfg.at("to_idx").get<int>();
    if (from < 0 || from >= ds.size() || to < 0 || to >= ds.size())
        throw InvalidInput("interp: image index out of range");
    int frames = cfg.at("frames").get<int>();

    Vec z0 = encode(enc, ds.images[from]);
    Vec z1 = encode(enc, ds.images[to]);

    BSplineCurve straight = straight_line_curve(z0, z1, 2);
    MetricProvider plain = MetricProvider::stochastic(dec);
    MetricProvider featured = MetricProvider::feature_stochastic(dec, feat);
    CurveOptConfig oc_plain = opt_from_cfg(cfg, true);
    CurveOptConfig oc_feat = opt_from_cfg(cfg, false);

    ShortenResult sp = shorten(z0, z1, plain, oc_plain);
    ShortenResult sf = shorten(z0, z1, featured, oc_feat);

    auto strip = [&](const BSplineCurve& c) {
        return interpolation_sequence(dec, c, frames, ds.image_rows, ds.image_cols);
    };
    write_pgm(strip(straight), out_path(cfg, "strip_straight.pgm"));
    write_pgm(strip(sp.curve), out_path(cfg, "strip_shortened.pgm"));
    write_pgm(strip(sf.curve), out_path(cfg, "strip_feature.pgm"));

    const int n_eval = 100;
    json res{{"transitions_straight", class_transition_count(feat, dec, straight, n_eval)},
             {"transitions_shortened", class_transition_count(feat, dec, sp.curve, n_eval)},
             {"transitions_feature", class_transition_count(feat, dec, sf.curve, n_eval)},
             {"rel_improvement_plain", (sp.d_straight - sp.d_short) / sp.d_straight},
             {"rel_improvement_feature", (sf.d_straight - sf.d_short) / sf.d_straight}};
    {
        std::ofstream rf(out_path(cfg, "result.json"), std::ios::binary);
        rf << res.dump(1) << "\n";
    }
    finish("interp", cfg,
           {"strip_straight.pgm", "strip_shortened.pgm", "strip_feature.pgm", "result.json"});
    std::cout << "interp: transitions straight/shortened/feature "
              << res["transitions_straight"] << "/" << res["transitions_shortened"] << "/"
              << res["transitions_feature"] << "\n";
    return 0;
}

double fd_jacobian_error(const Mlp& net, const Vec& z) {
    Matrix j = jacobian(net, z);
    const double h = 1e-5;
    double scale = 1e-12;
    for (double v : j.a) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    Vec zp = z;
    for (int c = 0; c < net.input_dim(); ++c) {
        zp[c] = z[c] + h;
        Vec fp = forward(net, zp);
        zp[c] = z[c] - h;
        Vec fm = forward(net, zp);
        zp[c] = z[c];
        for (int r = 0; r < net.output_dim(); ++r) {
            double fd = (fp[r] - fm[r]) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - j(r, c)) / scale);
        }
    }
    return worst;
}

int run_check_jacobian(const json& cfg) {
    Model m = load_model(cfg.at("model").get<std::string>());
    int points = cfg.at("points").get<int>();
    std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    double tol = cfg.at("tol").get<double>();

    double worst = 0.0;
    for (int i = 0; i < points; ++i) {
        Rng rng(substream(seed, std::uint64_t(i)));
        if (auto* net = std::get_if<Mlp>(&m)) {
            Vec z(net->input_dim());
            for (double& v : z) v = rng.normal();
            worst = std::max(worst, fd_jacobian_error(*net, z));
        } else {
            auto& gen = std::get<StochasticGenerator>(m);
            Vec z(gen.latent_dim());
            for (double& v : z) v = rng.normal();
            worst = std::max(worst, fd_jacobian_error(gen.mu_net, z));
            worst = std::max(worst, fd_jacobian_error(gen.sigma_net, z));
        }
    }
    bool pass = worst < tol;
    json res{{"points", points}, {"max_rel_error", worst}, {"tol", tol}, {"pass", pass}};
    {
        std::ofstream rf(out_path(cfg, "report.json"), std::ios::binary);
        rf << res.dump(1) << "\n";
    }
    finish("check-jacobian", cfg, {"report.json"});
    std::cout << "check-jacobian: max relative error " << worst << (pass ? " (pass)" : " (FAIL)")
              << "\n";
    return pass ? 0 : 1;
}

} // namespace

int dispatch_config(const std::string& command, json cfg) {
    if (command == "make-dataset") return run_make_dataset(cfg);
    if (command == "train-vae") return run_train_vae(cfg);
    if (command == "train-logreg") return run_train_logreg(cfg);
    if (command == "shorten") return run_shorten(cfg);
    if (command == "mc-improve") return run_mc_improve(cfg);
    if (command == "grid") return run_grid(cfg);
    if (command == "streamlines") return run_streamlines(cfg);
    if (command == "compare") return run_compare(cfg);
    if (command == "interp") return run_interp(cfg);
    if (command == "check-jacobian") return run_check_jacobian(cfg);
    throw InvalidInput("unknown command '" + command + "'");
}

namespace {

struct ShortenFlags {
    int quad_points = 256, segments = 64, max_iters = 2000, plateau_window = 20,
        max_control_points = 12;
    double step_size = 1e-2, plateau_tol = 1e-3;
    std::string grad_mode = "auto";

    void attach(CLI::App* cmd) {
        cmd->add_option("--quad-points", quad_points, "length quadrature nodes");
        cmd->add_option("--segments", segments, "energy discretization segments");
        cmd->add_option("--step-size", step_size, "initial gradient step");
        cmd->add_option("--max-iters", max_iters, "optimization step budget");
        cmd->add_option("--plateau-window", plateau_window, "iterations per plateau check");
        cmd->add_option("--plateau-tol", plateau_tol, "relative drop counted as plateau");
        cmd->add_option("--max-control-points", max_control_points, "control point budget");
        cmd->add_option("--grad-mode", grad_mode, "auto|exact|fd")
            ->check(CLI::IsMember({"auto", "exact", "fd"}));
    }

    void to_json(json& cfg) const {
        cfg["quad_points"] = quad_points;
        cfg["segments"] = segments;
        cfg["step_size"] = step_size;
        cfg["max_iters"] = max_iters;
        cfg["plateau_window"] = plateau_window;
        cfg["plateau_tol"] = plateau_tol;
        cfg["max_control_points"] = max_control_points;
        cfg["grad_mode"] = grad_mode;
    }
};

} // namespace

int cli_dispatch(const std::vector<std::string>& args) {
    CLI::App app{"pull-back metric geometry of small generative models"};
    app.set_version_flag("--version", LATENTGEO_VERSION);
    app.require_subcommand(1);

    int rc = 0;
    auto run = [&rc](const std::string& command, json cfg) {
        rc = dispatch_config(command, std::move(cfg));
    };

    // make-dataset ----------------------------------------------------------
    {
        auto* c = app.add_subcommand("make-dataset",
                                     "write a synthetic digit corpus as IDX files");
        auto vars = std::make_shared<std::tuple<std::string, std::uint64_t, int, int,
                                                std::string>>(
            default_out_dir(), std::uint64_t(7), 800, 200, std::string("0,1,2,3,4,5,6,7,8,9"));
        c->add_option("--out-dir", std::get<0>(*vars), "output directory");
        c->add_option("--seed", std::get<1>(*vars), "corpus seed");
        c->add_option("--train-per-class", std::get<2>(*vars), "train images per digit");
        c->add_option("--test-per-class", std::get<3>(*vars), "test images per digit");
        c->add_option("--digits", std::get<4>(*vars), "digits to render");
        c->callback([vars, &run] {
            json cfg{{"out_dir", std::get<0>(*vars)},
                     {"seed", std::get<1>(*vars)},
                     {"train_per_class", std::get<2>(*vars)},
                     {"test_per_class", std::get<3>(*vars)},
                     {"digits", std::get<4>(*vars)}};
            run("make-dataset", std::move(cfg));
        });
    }

    // train-vae --------------------------------------------------------------
    {
        auto* c = app.add_subcommand("train-vae", "train encoder + stochastic decoder");
        struct V {
            std::string images, labels, digits, hidden = "128,64", out_dir;
            int epochs = 20, batch_size = 64, latent_dim = 2, workers = 1;
            int kl_warmup = 5, fixed_sigma_epochs = -1;
            double lr = 3e-3, sigma_floor = 1e-4, holdout = 0.1, kl_weight = 1.0;
            std::uint64_t seed = 1;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--images", v->images, "IDX image file")->required();
        c->add_option("--labels", v->labels, "IDX label file")->required();
        c->add_option("--digits", v->digits, "keep only these digits (e.g. 2,4,5,7)");
        c->add_option("--epochs", v->epochs);
        c->add_option("--batch-size", v->batch_size);
        c->add_option("--lr", v->lr);
        c->add_option("--seed", v->seed);
        c->add_option("--latent-dim", v->latent_dim);
        c->add_option("--hidden", v->hidden, "hidden widths, e.g. 128,64");
        c->add_option("--sigma-floor", v->sigma_floor);
        c->add_option("--holdout", v->holdout, "ELBO monitoring fraction");
        c->add_option("--kl-warmup", v->kl_warmup, "KL weight ramp epochs");
        c->add_option("--kl-weight", v->kl_weight, "final KL weight (beta)");
        c->add_option("--fixed-sigma-epochs", v->fixed_sigma_epochs,
                      "unit-variance epochs before the sigma head trains (-1 = half)");
        c->add_option("--workers", v->workers, "kernel threads (results identical)");
        c->add_option("--out-dir", v->out_dir);
        c->callback([v, &run] {
            json cfg{{"images", v->images},       {"labels", v->labels},
                     {"digits", v->digits},       {"epochs", v->epochs},
                     {"batch_size", v->batch_size}, {"lr", v->lr},
                     {"seed", v->seed},           {"latent_dim", v->latent_dim},
                     {"hidden", v->hidden},       {"sigma_floor", v->sigma_floor},
                     {"holdout", v->holdout},     {"workers", v->workers},
                     {"kl_warmup", v->kl_warmup},
                     {"kl_weight", v->kl_weight},
                     {"fixed_sigma_epochs", v->fixed_sigma_epochs},
                     {"out_dir", v->out_dir}};
            run("train-vae", std::move(cfg));
        });
    }

    // train-logreg ------------------------------------------------------------
    {
        auto* c = app.add_subcommand("train-logreg", "train the logistic-regression feature");
        struct V {
            std::string images, labels, digits, out_dir;
            int epochs = 10, batch_size = 64, workers = 1;
            double lr = 3e-3;
            std::uint64_t seed = 1;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--images", v->images)->required();
        c->add_option("--labels", v->labels)->required();
        c->add_option("--digits", v->digits);
        c->add_option("--epochs", v->epochs);
        c->add_option("--batch-size", v->batch_size);
        c->add_option("--lr", v->lr);
        c->add_option("--seed", v->seed);
        c->add_option("--workers", v->workers);
        c->add_option("--out-dir", v->out_dir);
        c->callback([v, &run] {
            json cfg{{"images", v->images}, {"labels", v->labels}, {"digits", v->digits},
                     {"epochs", v->epochs}, {"batch_size", v->batch_size}, {"lr", v->lr},
                     {"seed", v->seed},     {"workers", v->workers}, {"out_dir", v->out_dir}};
            run("train-logreg", std::move(cfg));
        });
    }

    // shorten -----------------------------------------------------------------
    {
        auto* c = app.add_subcommand("shorten", "find a shorter-than-straight curve");
        struct V {
            std::string model, feature, from, to, out_dir;
            ShortenFlags sf;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model", v->model, "model file")->required();
        c->add_option("--from", v->from, "start latent point, comma separated")->required();
        c->add_option("--to", v->to, "end latent point")->required();
        c->add_option("--feature", v->feature, "logistic feature file");
        c->add_option("--out-dir", v->out_dir);
        v->sf.attach(c);
        c->callback([v, &run] {
            json cfg{{"model", v->model}, {"feature", v->feature}, {"from", v->from},
                     {"to", v->to},       {"out_dir", v->out_dir}};
            v->sf.to_json(cfg);
            run("shorten", std::move(cfg));
        });
    }

    // mc-improve ----------------------------------------------------------------
    {
        auto* c = app.add_subcommand("mc-improve",
                                     "expected worst-case relative improvement");
        struct V {
            std::string model, feature, out_dir;
            double alpha = 0.0;
            int samples = 100, bins = 50, workers = 0;
            std::uint64_t seed = 0;
            ShortenFlags sf;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model", v->model)->required();
        c->add_option("--alpha", v->alpha, "eigenvector step size")->required();
        c->add_option("--samples", v->samples);
        c->add_option("--seed", v->seed);
        c->add_option("--feature", v->feature);
        c->add_option("--bins", v->bins, "histogram bins");
        c->add_option("--workers", v->workers, "0 = all cores");
        c->add_option("--out-dir", v->out_dir);
        v->sf.attach(c);
        c->callback([v, &run] {
            json cfg{{"model", v->model},   {"feature", v->feature}, {"alpha", v->alpha},
                     {"samples", v->samples}, {"seed", v->seed},     {"bins", v->bins},
                     {"workers", v->workers}, {"out_dir", v->out_dir}};
            v->sf.to_json(cfg);
            run("mc-improve", std::move(cfg));
        });
    }

    // grid ----------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("grid", "scalar metric field over a 2D window");
        struct V {
            std::string model, feature, kind = "log-cond", bounds = "-4,4,-4,4", out_dir;
            int nx = 101, ny = 101, workers = 0;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model", v->model)->required();
        c->add_option("--kind", v->kind, "log-cond|log-sqrt-det")
            ->check(CLI::IsMember({"log-cond", "log-sqrt-det"}));
        c->add_option("--feature", v->feature);
        c->add_option("--bounds", v->bounds, "xmin,xmax,ymin,ymax");
        c->add_option("--nx", v->nx);
        c->add_option("--ny", v->ny);
        c->add_option("--workers", v->workers);
        c->add_option("--out-dir", v->out_dir);
        c->callback([v, &run] {
            json cfg{{"model", v->model}, {"feature", v->feature}, {"kind", v->kind},
                     {"bounds", v->bounds}, {"nx", v->nx},         {"ny", v->ny},
                     {"workers", v->workers}, {"out_dir", v->out_dir}};
            run("grid", std::move(cfg));
        });
    }

    // streamlines -----------------------------------------------------------------
    {
        auto* c = app.add_subcommand("streamlines", "eigenvector integral curves");
        struct V {
            std::string model, feature, kind = "min", bounds = "-4,4,-4,4", out_dir;
            std::vector<std::string> seed_points;
            double step_length = 0.05;
            int steps = 200;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model", v->model)->required();
        c->add_option("--kind", v->kind, "min|max")->check(CLI::IsMember({"min", "max"}));
        c->add_option("--feature", v->feature);
        c->add_option("--seed-point", v->seed_points, "seed \"x,y\" (repeatable)")
            ->required();
        c->add_option("--step-length", v->step_length);
        c->add_option("--steps", v->steps);
        c->add_option("--bounds", v->bounds);
        c->add_option("--out-dir", v->out_dir);
        c->callback([v, &run] {
            json cfg{{"model", v->model},   {"feature", v->feature},
                     {"kind", v->kind},     {"seed_points", v->seed_points},
                     {"step_length", v->step_length}, {"steps", v->steps},
                     {"bounds", v->bounds}, {"out_dir", v->out_dir}};
            run("streamlines", std::move(cfg));
        });
    }

    // compare ----------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("compare", "cross-model interpolation comparison");
        struct V {
            std::string model_a, model_b, images, labels, digits, out_dir;
            int pairs = 20, workers = 0;
            double threshold = 0.05;
            std::uint64_t seed = 0;
            ShortenFlags sf;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model-a", v->model_a, "directory with decoder.json/encoder.json")
            ->required();
        c->add_option("--model-b", v->model_b)->required();
        c->add_option("--images", v->images)->required();
        c->add_option("--labels", v->labels)->required();
        c->add_option("--digits", v->digits);
        c->add_option("--pairs", v->pairs);
        c->add_option("--threshold", v->threshold, "max improvement gap to select");
        c->add_option("--seed", v->seed);
        c->add_option("--workers", v->workers);
        c->add_option("--out-dir", v->out_dir);
        v->sf.attach(c);
        c->callback([v, &run] {
            json cfg{{"model_a", v->model_a}, {"model_b", v->model_b}, {"images", v->images},
                     {"labels", v->labels},   {"digits", v->digits},   {"pairs", v->pairs},
                     {"threshold", v->threshold}, {"seed", v->seed},
                     {"workers", v->workers}, {"out_dir", v->out_dir}};
            v->sf.to_json(cfg);
            run("compare", std::move(cfg));
        });
    }

    // interp --------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("interp", "straight/shortened/feature image strips");
        struct V {
            std::string model, encoder, feature, images, labels, digits, out_dir;
            int from_idx = 0, to_idx = 1, frames = 8;
            ShortenFlags sf;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model", v->model, "decoder file")->required();
        c->add_option("--encoder", v->encoder, "encoder file")->required();
        c->add_option("--feature", v->feature, "logistic feature file")->required();
        c->add_option("--images", v->images)->required();
        c->add_option("--labels", v->labels)->required();
        c->add_option("--digits", v->digits);
        c->add_option("--from-idx", v->from_idx)->required();
        c->add_option("--to-idx", v->to_idx)->required();
        c->add_option("--frames", v->frames);
        c->add_option("--out-dir", v->out_dir);
        v->sf.attach(c);
        c->callback([v, &run] {
            json cfg{{"model", v->model},     {"encoder", v->encoder}, {"feature", v->feature},
                     {"images", v->images},   {"labels", v->labels},   {"digits", v->digits},
                     {"from_idx", v->from_idx}, {"to_idx", v->to_idx}, {"frames", v->frames},
                     {"out_dir", v->out_dir}};
            v->sf.to_json(cfg);
            run("interp", std::move(cfg));
        });
    }

    // check-jacobian ---------------------------------------------------------------
    {
        auto* c = app.add_subcommand("check-jacobian", "finite-difference Jacobian audit");
        struct V {
            std::string model, out_dir;
            int points = 20;
            double tol = 1e-4;
            std::uint64_t seed = 0;
        };
        auto v = std::make_shared<V>();
        v->out_dir = default_out_dir();
        c->add_option("--model", v->model)->required();
        c->add_option("--points", v->points, "audit points");
        c->add_option("--tol", v->tol);
        c->add_option("--seed", v->seed);
        c->add_option("--out-dir", v->out_dir);
        c->callback([v, &run] {
            json cfg{{"model", v->model}, {"points", v->points}, {"tol", v->tol},
                     {"seed", v->seed},   {"out_dir", v->out_dir}};
            run("check-jacobian", std::move(cfg));
        });
    }

    // replay ------------------------------------------------------------------------
    {
        auto* c = app.add_subcommand("replay", "re-run a command from its manifest");
        struct V {
            std::string manifest, out_dir;
            int workers = -1;
        };
        auto v = std::make_shared<V>();
        c->add_option("manifest", v->manifest, "manifest.json path")->required();
        c->add_option("--out-dir", v->out_dir, "override output directory");
        c->add_option("--workers", v->workers, "override worker count");
        c->callback([v, &run] {
            json m = load_manifest(v->manifest);
            json cfg = m.at("config");
            std::string command = m.at("command").get<std::string>();
            if (!v->out_dir.empty()) cfg["out_dir"] = v->out_dir;
            if (v->workers >= 0 && cfg.contains("workers")) cfg["workers"] = v->workers;
            run(command, std::move(cfg));
        });
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

} // namespace latentgeo
