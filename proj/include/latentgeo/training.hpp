#pragma once

#include <cstdint>
#include <vector>

#include "latentgeo/data.hpp"
#include "latentgeo/network.hpp"

namespace latentgeo {

struct TrainConfig {
    int epochs = 20;
    int batch_size = 64;
    double learning_rate = 3e-3;
    std::uint64_t seed = 1;
    int latent_dim = 2;
    std::vector<int> hidden = {128, 64};
    double sigma_floor = 1e-4;
    double holdout_fraction = 0.1; // slice used only for ELBO monitoring
    int kl_warmup_epochs = 5;      // KL weight ramps 0 -> kl_weight over these epochs
    double kl_weight = 1.0;        // final KL weight (beta); < 1 spreads the aggregate
                                   // posterior wider than the prior
    // Epochs trained with a unit-variance likelihood and a frozen sigma head
    // before the learned-sigma ELBO takes over; a learned sigma from scratch
    // collapses the posterior (the variance soaks up the likelihood before
    // mu learns anything). -1 = half of epochs.
    int fixed_sigma_epochs = -1;
    int workers = 1;               // kernel threads; results identical for any value

    void validate() const;
};

/// Posterior net: image -> (mean, log-variance), concatenated.
struct Encoder {
    Mlp net;
    int latent_dim = 0;
};

struct VaeTrainResult {
    Encoder encoder;
    StochasticGenerator decoder;
    double initial_elbo = 0.0;        // held-out ELBO before any update
    std::vector<double> holdout_elbo; // after each epoch
};

/// ELBO maximization with the reparameterization trick and Adam
/// (beta1=0.9, beta2=0.999, eps=1e-8). Encoder is
/// image -> hidden... -> 2d; the decoder mirrors the hidden widths, mu head
/// ends in sigmoid, sigma head in softplus. Everything stochastic (init,
/// shuffling, eps draws) comes from the seed, so a fixed seed reproduces
/// weights bit-identically.
VaeTrainResult train_vae(const Dataset& ds, const TrainConfig& cfg);

struct LogregTrainResult {
    FeatureMap feature;
    double train_accuracy = 0.0;
    std::vector<double> loss_history; // mean cross-entropy per epoch
    std::vector<int> class_labels;    // row k of W scores class_labels[k]
};

/// Multinomial logistic regression on raw pixels (softmax cross-entropy,
/// Adam). Throws TrainingError if fewer than two classes are present.
LogregTrainResult train_logreg(const Dataset& ds, const TrainConfig& cfg);

/// Posterior mean.
Vec encode(const Encoder& enc, const Vec& image);

struct InvertConfig {
    int starts = 8;
    int iters = 200;
    double learning_rate = 0.05;
};

/// Gradient-based latent search: Adam on ||mu(z) - x||^2 from `starts`
/// random initializations; returns the best minimizer found.
Vec invert(const StochasticGenerator& gen, const Vec& image, std::uint64_t seed,
           const InvertConfig& cfg = {});

double invert_loss(const StochasticGenerator& gen, const Vec& z, const Vec& image);

} // namespace latentgeo
