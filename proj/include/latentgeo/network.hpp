#pragma once

#include <string>
#include <variant>
#include <vector>

#include "latentgeo/linalg.hpp"

namespace latentgeo {

enum class Activation { identity, tanh_fn, relu, sigmoid, softplus };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

double apply_activation(Activation a, double x);
/// Derivative at x. relu'(0) is defined as 0; this puts a measure-zero
/// discontinuity into relu metrics, which is why the acceptance networks
/// stick to smooth activations.
double activation_derivative(Activation a, double x);

struct Layer {
    Matrix weight; // out x in, row-major
    Vec bias;
    Activation act = Activation::identity;
};

/// Plain feed-forward net. Immutable after construction/loading; every
/// evaluation function here is pure, so concurrent reads are fine.
struct Mlp {
    std::vector<Layer> layers;

    int input_dim() const { return layers.empty() ? 0 : layers.front().weight.cols; }
    int output_dim() const { return layers.empty() ? 0 : layers.back().weight.rows; }

    /// Throws ValidationError if consecutive dims do not chain or weights
    /// are non-finite. Message names the offending layer.
    void validate() const;
};

Vec forward(const Mlp& net, const Vec& z);

/// Exact Jacobian (output_dim x input_dim), forward-mode chain rule
/// diag(act') * W propagated layer by layer.
Matrix jacobian(const Mlp& net, const Vec& z);

/// u^T * jacobian(net, z) without forming the Jacobian (reverse mode).
Vec vjp(const Mlp& net, const Vec& z, const Vec& u);

/// Jacobian-vector product J*v (forward mode, single tangent).
Vec jvp(const Mlp& net, const Vec& z, const Vec& v);

/// Decoder of the paper's stochastic generator: x = mu(z) + sigma(z)*eps.
/// sigma_net carries a final softplus; sigma() adds sigma_floor on top so
/// the metric never degenerates far from data (the floor is a constant, so
/// it does not change the sigma Jacobian).
struct StochasticGenerator {
    Mlp mu_net;
    Mlp sigma_net;
    double sigma_floor = 1e-4;

    int latent_dim() const { return mu_net.input_dim(); }
    int output_dim() const { return mu_net.output_dim(); }

    Vec mean(const Vec& z) const { return forward(mu_net, z); }
    Vec sigma(const Vec& z) const;

    void validate() const;
};

/// f: X -> F. identity, or logistic regression (softmax of W x + b).
struct FeatureMap {
    enum class Kind { identity, logistic_regression };
    Kind kind = Kind::identity;
    Matrix weight; // K x D, logistic only
    Vec bias;      // K

    static FeatureMap identity_map() { return FeatureMap{}; }
    static FeatureMap logistic(Matrix w, Vec b);

    int n_classes() const { return weight.rows; }
};

Vec feature_forward(const FeatureMap& f, const Vec& x);

/// identity -> I; logistic -> (diag(p) - p p^T) W with p = softmax(Wx+b).
Matrix feature_jacobian(const FeatureMap& f, const Vec& x);

/// Model file round trips. Structured text (JSON), format_version 1,
/// full-precision floats; unknown format_version is rejected.
void save_model(const Mlp& net, const std::string& path);
void save_model(const StochasticGenerator& gen, const std::string& path);

using Model = std::variant<Mlp, StochasticGenerator>;
Model load_model(const std::string& path);
Mlp load_mlp(const std::string& path);
StochasticGenerator load_stochastic(const std::string& path);

} // namespace latentgeo
