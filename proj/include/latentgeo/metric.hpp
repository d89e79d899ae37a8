#pragma once

#include <functional>
#include <memory>

#include "latentgeo/linalg.hpp"
#include "latentgeo/network.hpp"

namespace latentgeo {

/// Closed family of pull-back metric evaluators. Holds immutable networks,
/// so metric_at/speed can be called concurrently without restriction (the
/// parallel Monte-Carlo sampler relies on this).
///
///   deterministic : M = J^T J
///   stochastic    : M = Jmu^T Jmu + Jsigma^T Jsigma
///   feature_det   : M = J_xz^T M_fx J_xz              at x = g(z)
///   feature_stoch : M = Jmu^T M_fx Jmu + Jsigma^T diag(M_fx) Jsigma
///                   with M_fx = J_fx^T J_fx evaluated at x = mu(z)
///   custom        : caller-supplied field (synthetic test metrics)
class MetricProvider {
public:
    enum class Kind { deterministic, stochastic, feature_det, feature_stoch, custom };

    static MetricProvider deterministic(Mlp g);
    static MetricProvider stochastic(StochasticGenerator gen);
    static MetricProvider feature_deterministic(Mlp g, FeatureMap f);
    static MetricProvider feature_stochastic(StochasticGenerator gen, FeatureMap f);
    static MetricProvider custom(int dim, std::function<SymMatrix(const Vec&)> field);

    SymMatrix metric_at(const Vec& z) const;

    /// sqrt(v^T M(z) v). Radicands in (-1e-10 * scale, 0] clamp to zero.
    /// Network variants compute J*v directly instead of forming M.
    double speed(const Vec& z, const Vec& v) const;

    int latent_dim() const { return dim_; }
    Kind kind() const { return kind_; }

    /// True when path energy can telescope through output differences
    /// (plain deterministic/stochastic variants).
    bool has_output_energy() const {
        return kind_ == Kind::deterministic || kind_ == Kind::stochastic;
    }

    const Mlp* generator() const { return gen_ ? &*gen_ : nullptr; }
    const StochasticGenerator* stochastic_generator() const {
        return sgen_ ? &*sgen_ : nullptr;
    }
    const FeatureMap* feature() const { return feat_ ? &*feat_ : nullptr; }

private:
    MetricProvider() = default;

    Kind kind_ = Kind::custom;
    int dim_ = 0;
    std::shared_ptr<const Mlp> gen_;
    std::shared_ptr<const StochasticGenerator> sgen_;
    std::shared_ptr<const FeatureMap> feat_;
    std::function<SymMatrix(const Vec&)> field_;

    void check_input(const Vec& z) const;
};

} // namespace latentgeo
