#include "latentgeo/training.hpp"

#include <algorithm>
#include <cmath>

#include "latentgeo/parallel.hpp"
#include "latentgeo/rng.hpp"

namespace latentgeo {

namespace {

constexpr double kHalfLog2Pi = 0.91893853320467274178; // 0.5 * ln(2*pi)

// ---------------------------------------------------------------------------
// batch forward/backward over an Mlp

struct BatchCache {
    std::vector<Matrix> pre; // per layer, batch x out (bias included)
    std::vector<Matrix> act; // act[0] = input, act[l+1] = layer output
};

Matrix batch_forward(const Mlp& net, const Matrix& x, BatchCache* cache, int workers) {
    Matrix a = x;
    if (cache) {
        cache->pre.clear();
        cache->act.clear();
        cache->act.push_back(a);
    }
    for (const Layer& l : net.layers) {
        Matrix pre = gemm_nt(a, l.weight, workers);
        for (int i = 0; i < pre.rows; ++i)
            for (int j = 0; j < pre.cols; ++j) pre(i, j) += l.bias[j];
        Matrix out(pre.rows, pre.cols);
        for (std::size_t i = 0; i < pre.a.size(); ++i)
            out.a[i] = apply_activation(l.act, pre.a[i]);
        if (cache) {
            cache->pre.push_back(pre);
            cache->act.push_back(out);
        }
        a = std::move(out);
    }
    return a;
}

struct MlpGrads {
    std::vector<Matrix> d_weight;
    std::vector<Vec> d_bias;

    explicit MlpGrads(const Mlp& net) {
        for (const Layer& l : net.layers) {
            d_weight.emplace_back(l.weight.rows, l.weight.cols);
            d_bias.emplace_back(l.bias.size(), 0.0);
        }
    }
};

// d_out is batch x out_dim; returns batch x in_dim; grads are overwritten.
Matrix batch_backward(const Mlp& net, const BatchCache& cache, Matrix d_out,
                      MlpGrads& grads, int workers) {
    for (int li = int(net.layers.size()) - 1; li >= 0; --li) {
        const Layer& l = net.layers[li];
        const Matrix& pre = cache.pre[li];
        Matrix d_pre(d_out.rows, d_out.cols);
        for (std::size_t i = 0; i < d_pre.a.size(); ++i)
            d_pre.a[i] = d_out.a[i] * activation_derivative(l.act, pre.a[i]);
        grads.d_weight[li] = gemm_tn(d_pre, cache.act[li], workers);
        Vec& db = grads.d_bias[li];
        std::fill(db.begin(), db.end(), 0.0);
        for (int i = 0; i < d_pre.rows; ++i)
            for (int j = 0; j < d_pre.cols; ++j) db[j] += d_pre(i, j);
        d_out = gemm_nn(d_pre, l.weight, workers);
    }
    return d_out;
}

// ---------------------------------------------------------------------------
// Adam

struct AdamSlot {
    std::vector<double> m, v;
    explicit AdamSlot(std::size_t n) : m(n, 0.0), v(n, 0.0) {}
};

struct Adam {
    double lr;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    long t = 0;

    void step_begin() { ++t; }

    void update(std::vector<double>& p, const std::vector<double>& g, AdamSlot& s) const {
        double c1 = 1.0 - std::pow(beta1, double(t));
        double c2 = 1.0 - std::pow(beta2, double(t));
        for (std::size_t i = 0; i < p.size(); ++i) {
            s.m[i] = beta1 * s.m[i] + (1.0 - beta1) * g[i];
            s.v[i] = beta2 * s.v[i] + (1.0 - beta2) * g[i] * g[i];
            double mhat = s.m[i] / c1;
            double vhat = s.v[i] / c2;
            p[i] -= lr * mhat / (std::sqrt(vhat) + eps);
        }
    }
};

struct MlpAdam {
    std::vector<AdamSlot> w_slots, b_slots;

    explicit MlpAdam(const Mlp& net) {
        for (const Layer& l : net.layers) {
            w_slots.emplace_back(l.weight.a.size());
            b_slots.emplace_back(l.bias.size());
        }
    }

    void apply(Mlp& net, const MlpGrads& g, const Adam& opt) {
        for (std::size_t li = 0; li < net.layers.size(); ++li) {
            opt.update(net.layers[li].weight.a, g.d_weight[li].a, w_slots[li]);
            opt.update(net.layers[li].bias, g.d_bias[li], b_slots[li]);
        }
    }
};

// ---------------------------------------------------------------------------
// init and small helpers

void xavier_init(Mlp& net, Rng& rng) {
    for (Layer& l : net.layers) {
        double s = std::sqrt(6.0 / (l.weight.rows + l.weight.cols));
        for (double& w : l.weight.a) w = rng.uniform(-s, s);
        std::fill(l.bias.begin(), l.bias.end(), 0.0);
    }
}

Mlp make_mlp(const std::vector<int>& dims, const std::vector<Activation>& acts) {
    Mlp net;
    for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
        Layer l;
        l.weight = Matrix(dims[i + 1], dims[i]);
        l.bias.assign(dims[i + 1], 0.0);
        l.act = acts[i];
        net.layers.push_back(std::move(l));
    }
    return net;
}

Matrix gather_batch(const Dataset& ds, const std::vector<int>& idx, int begin, int end) {
    Matrix x(end - begin, ds.image_size);
    for (int r = begin; r < end; ++r) {
        const Vec& img = ds.images[idx[r]];
        std::copy(img.begin(), img.end(), x.a.begin() + std::size_t(r - begin) * ds.image_size);
    }
    return x;
}

void shuffle_indices(std::vector<int>& idx, Rng& rng) {
    for (int i = int(idx.size()) - 1; i > 0; --i) {
        int j = int(rng.uniform_int(std::uint64_t(i) + 1));
        std::swap(idx[i], idx[j]);
    }
}

} // namespace

void TrainConfig::validate() const {
    if (epochs < 1 || batch_size < 1 || latent_dim < 1) throw InvalidInput("train config: non-positive field");
    if (!(learning_rate > 0)) throw InvalidInput("train config: learning_rate must be > 0");
    if (!(sigma_floor > 0)) throw InvalidInput("train config: sigma_floor must be > 0");
    for (int h : hidden)
        if (h < 1) throw InvalidInput("train config: hidden width must be >= 1");
}

// ---------------------------------------------------------------------------
// VAE

namespace {

struct VaeNets {
    Mlp encoder, mu, sigma;
};

VaeNets build_vae_nets(int image_size, const TrainConfig& cfg, Rng& rng) {
    std::vector<int> enc_dims{image_size};
    std::vector<Activation> enc_acts;
    for (int h : cfg.hidden) {
        enc_dims.push_back(h);
        enc_acts.push_back(Activation::tanh_fn);
    }
    enc_dims.push_back(2 * cfg.latent_dim);
    enc_acts.push_back(Activation::identity);

    std::vector<int> dec_dims{cfg.latent_dim};
    std::vector<Activation> dec_acts;
    for (auto it = cfg.hidden.rbegin(); it != cfg.hidden.rend(); ++it) {
        dec_dims.push_back(*it);
        dec_acts.push_back(Activation::tanh_fn);
    }
    dec_dims.push_back(image_size);

    VaeNets nets;
    nets.encoder = make_mlp(enc_dims, enc_acts);
    dec_acts.push_back(Activation::sigmoid);
    nets.mu = make_mlp(dec_dims, dec_acts);
    // relu hidden units let sigma keep growing away from the data support,
    // where a saturating head would go flat
    for (auto& a : dec_acts) a = Activation::relu;
    dec_acts.back() = Activation::softplus;
    nets.sigma = make_mlp(dec_dims, dec_acts);

    xavier_init(nets.encoder, rng);
    xavier_init(nets.mu, rng);
    xavier_init(nets.sigma, rng);
    // start sigma near 0.1 so early reconstruction gradients stay moderate
    std::fill(nets.sigma.layers.back().bias.begin(), nets.sigma.layers.back().bias.end(), -2.25);
    return nets;
}

// mean ELBO per image over [begin,end) of ds, eps drawn from rng
double vae_elbo(const VaeNets& nets, const Dataset& ds, int begin, int end,
                double sigma_floor, int d, Rng& rng, int workers) {
    if (begin >= end) return 0.0;
    std::vector<int> idx(end - begin);
    for (int i = begin; i < end; ++i) idx[i - begin] = i;
    Matrix x = gather_batch(ds, idx, 0, int(idx.size()));
    const int b = x.rows;
    Matrix enc_out = batch_forward(nets.encoder, x, nullptr, workers);
    Matrix z(b, d);
    double kl = 0.0;
    for (int i = 0; i < b; ++i) {
        for (int j = 0; j < d; ++j) {
            double m = enc_out(i, j);
            double lv = enc_out(i, d + j);
            double e = rng.normal();
            z(i, j) = m + std::exp(0.5 * lv) * e;
            kl += 0.5 * (std::exp(lv) + m * m - 1.0 - lv);
        }
    }
    Matrix mu = batch_forward(nets.mu, z, nullptr, workers);
    Matrix sp = batch_forward(nets.sigma, z, nullptr, workers);
    double loglik = 0.0;
    for (std::size_t i = 0; i < mu.a.size(); ++i) {
        double s = sp.a[i] + sigma_floor;
        double r = x.a[i] - mu.a[i];
        loglik += -kHalfLog2Pi - std::log(s) - r * r / (2.0 * s * s);
    }
    return (loglik - kl) / b;
}

} // namespace

VaeTrainResult train_vae(const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    if (ds.size() == 0) throw InvalidInput("train_vae: empty dataset");

    Rng init_rng(substream(cfg.seed, 0x1417));
    VaeNets nets = build_vae_nets(ds.image_size, cfg, init_rng);
    const int d = cfg.latent_dim;
    const int w = cfg.workers;

    const int n = ds.size();
    int hold = std::clamp(int(std::lround(n * cfg.holdout_fraction)), n > 1 ? 1 : 0, n - 1);
    const int n_train = n - hold;
    const int hold_begin = n_train;

    Adam opt{cfg.learning_rate};
    Adam sigma_opt{cfg.learning_rate}; // separate step count: the head joins late
    MlpAdam enc_adam(nets.encoder), mu_adam(nets.mu), sigma_adam(nets.sigma);
    MlpGrads enc_g(nets.encoder), mu_g(nets.mu), sigma_g(nets.sigma);
    const int fixed_sigma =
        cfg.fixed_sigma_epochs < 0 ? cfg.epochs / 2
                                   : std::min(cfg.fixed_sigma_epochs, cfg.epochs);

    VaeTrainResult res;
    {
        Rng eval_rng(substream(cfg.seed, 0xE7A1));
        res.initial_elbo = vae_elbo(nets, ds, hold_begin, n, cfg.sigma_floor, d, eval_rng, w);
    }

    std::vector<int> idx(n_train);
    for (int i = 0; i < n_train; ++i) idx[i] = i;
    Rng shuffle_rng(substream(cfg.seed, 0x5bff));
    Rng eps_rng(substream(cfg.seed, 0xe55));

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_indices(idx, shuffle_rng);
        const double kl_beta =
            cfg.kl_weight * std::min(1.0, double(epoch) / std::max(1, cfg.kl_warmup_epochs));
        const bool train_sigma = epoch > fixed_sigma;
        for (int start = 0; start < n_train; start += cfg.batch_size) {
            int stop = std::min(start + cfg.batch_size, n_train);
            const int b = stop - start;
            Matrix x = gather_batch(ds, idx, start, stop);

            BatchCache enc_cache;
            Matrix enc_out = batch_forward(nets.encoder, x, &enc_cache, w);

            Matrix z(b, d), eps(b, d);
            for (int i = 0; i < b; ++i)
                for (int j = 0; j < d; ++j) {
                    eps(i, j) = eps_rng.normal();
                    z(i, j) = enc_out(i, j) + std::exp(0.5 * enc_out(i, d + j)) * eps(i, j);
                }

            BatchCache mu_cache, sigma_cache;
            Matrix mu = batch_forward(nets.mu, z, &mu_cache, w);

            double loss = 0.0; // (negative log-likelihood + weighted KL) / batch
            Matrix d_mu(b, ds.image_size);
            Matrix dz_sigma;
            if (train_sigma) {
                Matrix sp = batch_forward(nets.sigma, z, &sigma_cache, w);
                Matrix d_sp(b, ds.image_size);
                for (std::size_t i = 0; i < mu.a.size(); ++i) {
                    double s = sp.a[i] + cfg.sigma_floor;
                    double r = x.a[i] - mu.a[i];
                    loss += std::log(s) + r * r / (2.0 * s * s) + kHalfLog2Pi;
                    d_mu.a[i] = -r / (s * s) / b;
                    d_sp.a[i] = (1.0 / s - r * r / (s * s * s)) / b;
                }
                dz_sigma = batch_backward(nets.sigma, sigma_cache, std::move(d_sp),
                                          sigma_g, w);
            } else {
                // unit-variance likelihood while mu finds its footing
                for (std::size_t i = 0; i < mu.a.size(); ++i) {
                    double r = x.a[i] - mu.a[i];
                    loss += 0.5 * r * r + kHalfLog2Pi;
                    d_mu.a[i] = -r / b;
                }
            }
            for (int i = 0; i < b; ++i)
                for (int j = 0; j < d; ++j) {
                    double m = enc_out(i, j), lv = enc_out(i, d + j);
                    loss += kl_beta * 0.5 * (std::exp(lv) + m * m - 1.0 - lv);
                }
            loss /= b;
            if (!std::isfinite(loss))
                throw TrainingError("train_vae diverged at epoch " + std::to_string(epoch) +
                                    ", batch " + std::to_string(start / cfg.batch_size));

            Matrix dz_mu = batch_backward(nets.mu, mu_cache, std::move(d_mu), mu_g, w);

            Matrix d_enc(b, 2 * d);
            for (int i = 0; i < b; ++i)
                for (int j = 0; j < d; ++j) {
                    double dz = dz_mu(i, j) + (train_sigma ? dz_sigma(i, j) : 0.0);
                    double m = enc_out(i, j), lv = enc_out(i, d + j);
                    d_enc(i, j) = dz + kl_beta * m / b;
                    d_enc(i, d + j) = dz * eps(i, j) * 0.5 * std::exp(0.5 * lv) +
                                      kl_beta * 0.5 * (std::exp(lv) - 1.0) / b;
                }
            batch_backward(nets.encoder, enc_cache, std::move(d_enc), enc_g, w);

            opt.step_begin();
            enc_adam.apply(nets.encoder, enc_g, opt);
            mu_adam.apply(nets.mu, mu_g, opt);
            if (train_sigma) {
                sigma_opt.step_begin();
                sigma_adam.apply(nets.sigma, sigma_g, sigma_opt);
            }
        }
        Rng eval_rng(substream(cfg.seed, 0xE7A1));
        res.holdout_elbo.push_back(
            vae_elbo(nets, ds, hold_begin, n, cfg.sigma_floor, d, eval_rng, w));
    }

    res.encoder.net = std::move(nets.encoder);
    res.encoder.latent_dim = d;
    res.decoder.mu_net = std::move(nets.mu);
    res.decoder.sigma_net = std::move(nets.sigma);
    res.decoder.sigma_floor = cfg.sigma_floor;
    res.decoder.validate();
    return res;
}

// ---------------------------------------------------------------------------
// logistic regression

LogregTrainResult train_logreg(const Dataset& ds, const TrainConfig& cfg) {
    cfg.validate();
    if (ds.size() == 0) throw InvalidInput("train_logreg: empty dataset");

    std::vector<int> classes;
    for (int lb : ds.labels)
        if (std::find(classes.begin(), classes.end(), lb) == classes.end())
            classes.push_back(lb);
    std::sort(classes.begin(), classes.end());
    if (classes.size() < 2) throw TrainingError("train_logreg: need at least 2 classes");
    const int k = int(classes.size());
    std::vector<int> class_of(10, -1);
    for (int c = 0; c < k; ++c) class_of[classes[c]] = c;

    Matrix wmat(k, ds.image_size);
    Vec bias(k, 0.0);
    Adam opt{cfg.learning_rate};
    AdamSlot w_slot(wmat.a.size()), b_slot(bias.size());

    const int n = ds.size();
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    Rng shuffle_rng(substream(cfg.seed, 0x106));

    LogregTrainResult res;
    const int workers = cfg.workers;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_indices(idx, shuffle_rng);
        double epoch_loss = 0.0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            int stop = std::min(start + cfg.batch_size, n);
            const int b = stop - start;
            Matrix x = gather_batch(ds, idx, start, stop);
            Matrix logits = gemm_nt(x, wmat, workers);
            Matrix g(b, k);
            for (int i = 0; i < b; ++i) {
                double mx = -1e300;
                for (int c = 0; c < k; ++c) {
                    logits(i, c) += bias[c];
                    mx = std::max(mx, logits(i, c));
                }
                double sum = 0.0;
                for (int c = 0; c < k; ++c) {
                    g(i, c) = std::exp(logits(i, c) - mx);
                    sum += g(i, c);
                }
                int y = class_of[ds.labels[idx[start + i]]];
                for (int c = 0; c < k; ++c) {
                    double p = g(i, c) / sum;
                    if (c == y) epoch_loss -= std::log(std::max(p, 1e-300));
                    g(i, c) = (p - (c == y ? 1.0 : 0.0)) / b;
                }
            }
            Matrix dw = gemm_tn(g, x, workers);
            Vec db(k, 0.0);
            for (int i = 0; i < b; ++i)
                for (int c = 0; c < k; ++c) db[c] += g(i, c);
            if (!std::isfinite(epoch_loss))
                throw TrainingError("train_logreg diverged at epoch " + std::to_string(epoch));
            opt.step_begin();
            opt.update(wmat.a, dw.a, w_slot);
            opt.update(bias, db, b_slot);
        }
        res.loss_history.push_back(epoch_loss / n);
    }

    res.feature = FeatureMap::logistic(wmat, bias);
    res.class_labels = classes;

    int correct = 0;
    for (int i = 0; i < n; ++i) {
        Vec p = feature_forward(res.feature, ds.images[i]);
        int arg = int(std::max_element(p.begin(), p.end()) - p.begin());
        if (classes[arg] == ds.labels[i]) ++correct;
    }
    res.train_accuracy = double(correct) / n;
    return res;
}

// ---------------------------------------------------------------------------
// encode / invert

Vec encode(const Encoder& enc, const Vec& image) {
    Vec out = forward(enc.net, image);
    if (int(out.size()) != 2 * enc.latent_dim)
        throw InvalidInput("encode: encoder output dim != 2 * latent_dim");
    return Vec(out.begin(), out.begin() + enc.latent_dim);
}

double invert_loss(const StochasticGenerator& gen, const Vec& z, const Vec& image) {
    Vec mu = gen.mean(z);
    double s = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        double r = mu[i] - image[i];
        s += r * r;
    }
    return s;
}

Vec invert(const StochasticGenerator& gen, const Vec& image, std::uint64_t seed,
           const InvertConfig& cfg) {
    if (int(image.size()) != gen.output_dim()) throw InvalidInput("invert: image dim mismatch");
    const int d = gen.latent_dim();

    Vec best_z;
    double best_loss = 0.0;
    for (int s = 0; s < cfg.starts; ++s) {
        Rng rng(substream(seed, std::uint64_t(s)));
        Vec z(d);
        for (double& v : z) v = rng.normal();

        Adam opt{cfg.learning_rate};
        AdamSlot slot(d);
        for (int it = 0; it < cfg.iters; ++it) {
            Vec mu = gen.mean(z);
            Vec r(mu.size());
            for (std::size_t i = 0; i < mu.size(); ++i) r[i] = 2.0 * (mu[i] - image[i]);
            Vec g = vjp(gen.mu_net, z, r);
            opt.step_begin();
            opt.update(z, g, slot);
        }
        double loss = invert_loss(gen, z, image);
        if (!std::isfinite(loss)) throw TrainingError("invert: non-finite loss");
        if (best_z.empty() || loss < best_loss) {
            best_loss = loss;
            best_z = z;
        }
    }
    return best_z;
}

} // namespace latentgeo
