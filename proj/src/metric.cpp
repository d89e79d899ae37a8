#include "latentgeo/metric.hpp"

#include <cmath>

namespace latentgeo {

MetricProvider MetricProvider::deterministic(Mlp g) {
    g.validate();
    MetricProvider p;
    p.kind_ = Kind::deterministic;
    p.dim_ = g.input_dim();
    p.gen_ = std::make_shared<const Mlp>(std::move(g));
    return p;
}

MetricProvider MetricProvider::stochastic(StochasticGenerator gen) {
    gen.validate();
    MetricProvider p;
    p.kind_ = Kind::stochastic;
    p.dim_ = gen.latent_dim();
    p.sgen_ = std::make_shared<const StochasticGenerator>(std::move(gen));
    return p;
}

MetricProvider MetricProvider::feature_deterministic(Mlp g, FeatureMap f) {
    g.validate();
    if (f.kind == FeatureMap::Kind::logistic_regression && f.weight.cols != g.output_dim())
        throw InvalidInput("feature map input dim != generator output dim");
    MetricProvider p;
    p.kind_ = Kind::feature_det;
    p.dim_ = g.input_dim();
    p.gen_ = std::make_shared<const Mlp>(std::move(g));
    p.feat_ = std::make_shared<const FeatureMap>(std::move(f));
    return p;
}

MetricProvider MetricProvider::feature_stochastic(StochasticGenerator gen, FeatureMap f) {
    gen.validate();
    if (f.kind == FeatureMap::Kind::logistic_regression && f.weight.cols != gen.output_dim())
        throw InvalidInput("feature map input dim != generator output dim");
    MetricProvider p;
    p.kind_ = Kind::feature_stoch;
    p.dim_ = gen.latent_dim();
    p.sgen_ = std::make_shared<const StochasticGenerator>(std::move(gen));
    p.feat_ = std::make_shared<const FeatureMap>(std::move(f));
    return p;
}

MetricProvider MetricProvider::custom(int dim, std::function<SymMatrix(const Vec&)> field) {
    if (dim < 1) throw InvalidInput("custom metric: dim must be >= 1");
    MetricProvider p;
    p.kind_ = Kind::custom;
    p.dim_ = dim;
    p.field_ = std::move(field);
    return p;
}

void MetricProvider::check_input(const Vec& z) const {
    if (int(z.size()) != dim_)
        throw InvalidInput("metric: latent dim " + std::to_string(z.size()) +
                           " != " + std::to_string(dim_));
    for (double v : z)
        if (!std::isfinite(v)) throw InvalidInput("metric: non-finite latent point");
}

namespace {

void check_finite(const SymMatrix& m) {
    for (double v : m.a)
        if (!std::isfinite(v)) throw InvalidInput("metric: non-finite network output");
}

// diagonal of M_fx = J_fx^T J_fx, i.e. squared column norms of J_fx
Vec mfx_diagonal(const Matrix& jfx) {
    Vec d(jfx.cols, 0.0);
    for (int r = 0; r < jfx.rows; ++r)
        for (int c = 0; c < jfx.cols; ++c) d[c] += jfx(r, c) * jfx(r, c);
    return d;
}

} // namespace

SymMatrix MetricProvider::metric_at(const Vec& z) const {
    check_input(z);
    SymMatrix m;
    switch (kind_) {
        case Kind::deterministic: {
            m = gram(jacobian(*gen_, z));
            break;
        }
        case Kind::stochastic: {
            Matrix jmu = jacobian(sgen_->mu_net, z);
            Matrix jsig = jacobian(sgen_->sigma_net, z);
            SymMatrix a = gram(jmu), b = gram(jsig);
            m = a;
            for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += b.a[i];
            break;
        }
        case Kind::feature_det: {
            Vec x = forward(*gen_, z);
            Matrix jfx = feature_jacobian(*feat_, x);
            Matrix jxz = jacobian(*gen_, z);
            m = gram(matmul(jfx, jxz));
            break;
        }
        case Kind::feature_stoch: {
            // Eq. 4 realization: J_fx frozen at x = mu(z); the sigma term
            // keeps only the diagonal of M_fx.
            Vec x = sgen_->mean(z);
            Matrix jfx = feature_jacobian(*feat_, x);
            Matrix jmu = jacobian(sgen_->mu_net, z);
            Matrix jsig = jacobian(sgen_->sigma_net, z);
            SymMatrix a = gram(matmul(jfx, jmu));
            SymMatrix b = weighted_gram(jsig, mfx_diagonal(jfx));
            m = a;
            for (std::size_t i = 0; i < m.a.size(); ++i) m.a[i] += b.a[i];
            break;
        }
        case Kind::custom: {
            m = field_(z);
            if (m.dim != dim_) throw InvalidInput("custom metric returned wrong dim");
            break;
        }
    }
    check_finite(m);
    return m;
}

double MetricProvider::speed(const Vec& z, const Vec& v) const {
    check_input(z);
    if (int(v.size()) != dim_) throw InvalidInput("speed: velocity dim mismatch");

    double q = 0.0;
    switch (kind_) {
        case Kind::deterministic: {
            Vec jv = jvp(*gen_, z, v);
            q = dot(jv, jv);
            break;
        }
        case Kind::stochastic: {
            Vec a = jvp(sgen_->mu_net, z, v);
            Vec b = jvp(sgen_->sigma_net, z, v);
            q = dot(a, a) + dot(b, b);
            break;
        }
        case Kind::feature_det: {
            Vec x = forward(*gen_, z);
            Matrix jfx = feature_jacobian(*feat_, x);
            Vec jv = jvp(*gen_, z, v);
            Vec fv = matvec(jfx, jv);
            q = dot(fv, fv);
            break;
        }
        case Kind::feature_stoch: {
            Vec x = sgen_->mean(z);
            Matrix jfx = feature_jacobian(*feat_, x);
            Vec mu_v = jvp(sgen_->mu_net, z, v);
            Vec f_mu = matvec(jfx, mu_v);
            Vec sig_v = jvp(sgen_->sigma_net, z, v);
            Vec diag = mfx_diagonal(jfx);
            q = dot(f_mu, f_mu);
            for (std::size_t i = 0; i < sig_v.size(); ++i) q += diag[i] * sig_v[i] * sig_v[i];
            break;
        }
        case Kind::custom: {
            q = quadratic_form(metric_at(z), v);
            break;
        }
    }

    if (!std::isfinite(q)) throw InvalidInput("speed: non-finite network output");
    if (q < 0.0) {
        // scale-aware clamp for roundoff; anything clearly negative is a bug
        double scale = dot(v, v);
        if (q < -1e-10 * std::max(scale, 1.0))
            throw NotPositiveDefinite("speed: negative radicand " + std::to_string(q));
        q = 0.0;
    }
    return std::sqrt(q);
}

} // namespace latentgeo
