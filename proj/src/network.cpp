#include "latentgeo/network.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace latentgeo {

using nlohmann::json;

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::tanh_fn: return "tanh";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
        case Activation::softplus: return "softplus";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "tanh") return Activation::tanh_fn;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "softplus") return Activation::softplus;
    throw ValidationError("unknown activation '" + name + "'");
}

namespace {

double stable_sigmoid(double x) {
    if (x >= 0) {
        double e = std::exp(-x);
        return 1.0 / (1.0 + e);
    }
    double e = std::exp(x);
    return e / (1.0 + e);
}

double stable_softplus(double x) {
    if (x > 30.0) return x;
    if (x < -30.0) return std::exp(x);
    return std::log1p(std::exp(x));
}

} // namespace

double apply_activation(Activation a, double x) {
    switch (a) {
        case Activation::identity: return x;
        case Activation::tanh_fn: return std::tanh(x);
        case Activation::relu: return x > 0 ? x : 0.0;
        case Activation::sigmoid: return stable_sigmoid(x);
        case Activation::softplus: return stable_softplus(x);
    }
    return x;
}

double activation_derivative(Activation a, double x) {
    switch (a) {
        case Activation::identity: return 1.0;
        case Activation::tanh_fn: {
            double t = std::tanh(x);
            return 1.0 - t * t;
        }
        case Activation::relu: return x > 0 ? 1.0 : 0.0;
        case Activation::sigmoid: {
            double s = stable_sigmoid(x);
            return s * (1.0 - s);
        }
        case Activation::softplus: return stable_sigmoid(x);
    }
    return 1.0;
}

void Mlp::validate() const {
    if (layers.empty()) throw ValidationError("mlp has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const Layer& l = layers[i];
        std::string where = "layer " + std::to_string(i);
        if (l.weight.rows <= 0 || l.weight.cols <= 0)
            throw ValidationError(where + ": empty weight matrix");
        if (int(l.bias.size()) != l.weight.rows)
            throw ValidationError(where + ": bias size " + std::to_string(l.bias.size()) +
                                  " != out " + std::to_string(l.weight.rows));
        if (i > 0 && layers[i - 1].weight.rows != l.weight.cols)
            throw ValidationError(where + ": in " + std::to_string(l.weight.cols) +
                                  " does not chain with previous out " +
                                  std::to_string(layers[i - 1].weight.rows));
        for (double v : l.weight.a)
            if (!std::isfinite(v)) throw ValidationError(where + ": non-finite weight");
        for (double v : l.bias)
            if (!std::isfinite(v)) throw ValidationError(where + ": non-finite bias");
    }
}

Vec forward(const Mlp& net, const Vec& z) {
    if (int(z.size()) != net.input_dim())
        throw InvalidInput("forward: input dim " + std::to_string(z.size()) +
                           " != " + std::to_string(net.input_dim()));
    Vec a = z;
    for (const Layer& l : net.layers) {
        Vec pre = matvec(l.weight, a);
        for (int i = 0; i < int(pre.size()); ++i)
            pre[i] = apply_activation(l.act, pre[i] + l.bias[i]);
        a = std::move(pre);
    }
    return a;
}

Matrix jacobian(const Mlp& net, const Vec& z) {
    if (int(z.size()) != net.input_dim()) throw InvalidInput("jacobian: input dim mismatch");
    const int d = net.input_dim();
    Vec a = z;
    Matrix j = Matrix::identity(d); // running J of a w.r.t. z
    for (const Layer& l : net.layers) {
        const int out = l.weight.rows;
        Vec pre = matvec(l.weight, a);
        for (int i = 0; i < out; ++i) pre[i] += l.bias[i];
        Matrix jn(out, d);
        for (int i = 0; i < out; ++i) {
            double g = activation_derivative(l.act, pre[i]);
            for (int c = 0; c < d; ++c) {
                double s = 0.0;
                for (int k = 0; k < l.weight.cols; ++k) s += l.weight(i, k) * j(k, c);
                jn(i, c) = g * s;
            }
        }
        Vec an(out);
        for (int i = 0; i < out; ++i) an[i] = apply_activation(l.act, pre[i]);
        a = std::move(an);
        j = std::move(jn);
    }
    return j;
}

Vec vjp(const Mlp& net, const Vec& z, const Vec& u) {
    if (int(z.size()) != net.input_dim()) throw InvalidInput("vjp: input dim mismatch");
    if (int(u.size()) != net.output_dim()) throw InvalidInput("vjp: cotangent dim mismatch");

    // forward pass keeping pre-activations
    std::vector<Vec> pres;
    pres.reserve(net.layers.size());
    Vec a = z;
    for (const Layer& l : net.layers) {
        Vec pre = matvec(l.weight, a);
        for (int i = 0; i < int(pre.size()); ++i) pre[i] += l.bias[i];
        pres.push_back(pre);
        Vec an(pre.size());
        for (int i = 0; i < int(pre.size()); ++i) an[i] = apply_activation(l.act, pre[i]);
        a = std::move(an);
    }

    Vec g = u;
    for (int li = int(net.layers.size()) - 1; li >= 0; --li) {
        const Layer& l = net.layers[li];
        const Vec& pre = pres[li];
        Vec gp(pre.size());
        for (int i = 0; i < int(pre.size()); ++i)
            gp[i] = g[i] * activation_derivative(l.act, pre[i]);
        Vec gin(l.weight.cols, 0.0);
        for (int i = 0; i < l.weight.rows; ++i) {
            double gi = gp[i];
            if (gi == 0.0) continue;
            const double* row = &l.weight.a[std::size_t(i) * l.weight.cols];
            for (int k = 0; k < l.weight.cols; ++k) gin[k] += gi * row[k];
        }
        g = std::move(gin);
    }
    return g;
}

Vec jvp(const Mlp& net, const Vec& z, const Vec& v) {
    if (int(z.size()) != net.input_dim()) throw InvalidInput("jvp: input dim mismatch");
    if (int(v.size()) != net.input_dim()) throw InvalidInput("jvp: tangent dim mismatch");
    Vec a = z;
    Vec t = v;
    for (const Layer& l : net.layers) {
        Vec pre = matvec(l.weight, a);
        for (int i = 0; i < int(pre.size()); ++i) pre[i] += l.bias[i];
        Vec tn = matvec(l.weight, t);
        Vec an(pre.size());
        for (int i = 0; i < int(pre.size()); ++i) {
            tn[i] *= activation_derivative(l.act, pre[i]);
            an[i] = apply_activation(l.act, pre[i]);
        }
        a = std::move(an);
        t = std::move(tn);
    }
    return t;
}

Vec StochasticGenerator::sigma(const Vec& z) const {
    Vec s = forward(sigma_net, z);
    for (double& v : s) v += sigma_floor;
    return s;
}

void StochasticGenerator::validate() const {
    mu_net.validate();
    sigma_net.validate();
    if (mu_net.input_dim() != sigma_net.input_dim())
        throw ValidationError("mu/sigma nets disagree on latent dim");
    if (mu_net.output_dim() != sigma_net.output_dim())
        throw ValidationError("mu/sigma nets disagree on output dim");
    if (!(sigma_floor > 0.0)) throw ValidationError("sigma_floor must be > 0");
}

FeatureMap FeatureMap::logistic(Matrix w, Vec b) {
    if (int(b.size()) != w.rows) throw InvalidInput("logistic feature: bias size != K");
    FeatureMap f;
    f.kind = Kind::logistic_regression;
    f.weight = std::move(w);
    f.bias = std::move(b);
    return f;
}

static Vec softmax(const Vec& logits) {
    double m = logits[0];
    for (double v : logits) m = std::max(m, v);
    Vec p(logits.size());
    double s = 0.0;
    for (std::size_t i = 0; i < logits.size(); ++i) {
        p[i] = std::exp(logits[i] - m);
        s += p[i];
    }
    for (double& v : p) v /= s;
    return p;
}

Vec feature_forward(const FeatureMap& f, const Vec& x) {
    if (f.kind == FeatureMap::Kind::identity) return x;
    if (int(x.size()) != f.weight.cols) throw InvalidInput("feature_forward: dim mismatch");
    Vec logits = matvec(f.weight, x);
    for (int i = 0; i < int(logits.size()); ++i) logits[i] += f.bias[i];
    return softmax(logits);
}

Matrix feature_jacobian(const FeatureMap& f, const Vec& x) {
    if (f.kind == FeatureMap::Kind::identity) return Matrix::identity(int(x.size()));
    if (int(x.size()) != f.weight.cols) throw InvalidInput("feature_jacobian: dim mismatch");
    Vec logits = matvec(f.weight, x);
    for (int i = 0; i < int(logits.size()); ++i) logits[i] += f.bias[i];
    Vec p = softmax(logits);
    const int k = f.weight.rows, d = f.weight.cols;
    // (diag(p) - p p^T) W
    Matrix j(k, d);
    for (int i = 0; i < k; ++i) {
        for (int c = 0; c < d; ++c) {
            double s = 0.0;
            for (int l = 0; l < k; ++l) {
                double coef = (i == l ? p[i] * (1.0 - p[i]) : -p[i] * p[l]);
                s += coef * f.weight(l, c);
            }
            j(i, c) = s;
        }
    }
    return j;
}

// ---------------------------------------------------------------------------
// persistence

namespace {

json layer_to_json(const Layer& l) {
    return json{{"in", l.weight.cols},
                {"out", l.weight.rows},
                {"activation", activation_name(l.act)},
                {"weights", l.weight.a},
                {"bias", l.bias}};
}

json mlp_layers_to_json(const Mlp& net) {
    json arr = json::array();
    for (const Layer& l : net.layers) arr.push_back(layer_to_json(l));
    return arr;
}

Layer layer_from_json(const json& j, std::size_t index) {
    std::string where = "layer " + std::to_string(index);
    if (!j.contains("in") || !j.contains("out") || !j.contains("weights") ||
        !j.contains("bias") || !j.contains("activation"))
        throw ValidationError(where + ": missing field");
    Layer l;
    int in = j.at("in").get<int>();
    int out = j.at("out").get<int>();
    if (in <= 0 || out <= 0) throw ValidationError(where + ": non-positive dims");
    l.weight = Matrix(out, in);
    std::vector<double> w = j.at("weights").get<std::vector<double>>();
    if (int(w.size()) != in * out)
        throw ValidationError(where + ": weights size " + std::to_string(w.size()) +
                              " != in*out " + std::to_string(in * out));
    l.weight.a = std::move(w);
    l.bias = j.at("bias").get<std::vector<double>>();
    if (int(l.bias.size()) != out)
        throw ValidationError(where + ": bias size != out");
    l.act = activation_from_name(j.at("activation").get<std::string>());
    return l;
}

Mlp mlp_from_json(const json& layers) {
    Mlp net;
    for (std::size_t i = 0; i < layers.size(); ++i)
        net.layers.push_back(layer_from_json(layers.at(i), i));
    net.validate();
    return net;
}

void write_text_atomic(const std::string& path, const std::string& text) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot open '" + tmp + "' for writing");
        out << text;
        if (!out) throw Error("write failed for '" + tmp + "'");
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0)
        throw Error("rename failed for '" + path + "'");
}

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
}

} // namespace

void save_model(const Mlp& net, const std::string& path) {
    net.validate();
    json doc{{"format_version", 1}, {"kind", "mlp"}, {"layers", mlp_layers_to_json(net)}};
    write_text_atomic(path, doc.dump(1) + "\n");
}

void save_model(const StochasticGenerator& gen, const std::string& path) {
    gen.validate();
    json doc{{"format_version", 1},
             {"kind", "stochastic"},
             {"mu_layers", mlp_layers_to_json(gen.mu_net)},
             {"sigma_layers", mlp_layers_to_json(gen.sigma_net)},
             {"sigma_floor", gen.sigma_floor}};
    write_text_atomic(path, doc.dump(1) + "\n");
}

Model load_model(const std::string& path) {
    json doc = load_json(path);
    if (!doc.contains("format_version") || doc.at("format_version").get<int>() != 1)
        throw ValidationError("'" + path + "': unsupported format_version");
    std::string kind = doc.value("kind", "");
    if (kind == "mlp") {
        if (!doc.contains("layers")) throw ValidationError("'" + path + "': missing layers");
        return mlp_from_json(doc.at("layers"));
    }
    if (kind == "stochastic") {
        if (!doc.contains("mu_layers") || !doc.contains("sigma_layers"))
            throw ValidationError("'" + path + "': missing mu_layers/sigma_layers");
        StochasticGenerator gen;
        gen.mu_net = mlp_from_json(doc.at("mu_layers"));
        gen.sigma_net = mlp_from_json(doc.at("sigma_layers"));
        gen.sigma_floor = doc.value("sigma_floor", 1e-4);
        gen.validate();
        return gen;
    }
    throw ValidationError("'" + path + "': unknown kind '" + kind + "'");
}

Mlp load_mlp(const std::string& path) {
    Model m = load_model(path);
    if (auto* net = std::get_if<Mlp>(&m)) return std::move(*net);
    throw ValidationError("'" + path + "': expected kind \"mlp\"");
}

StochasticGenerator load_stochastic(const std::string& path) {
    Model m = load_model(path);
    if (auto* gen = std::get_if<StochasticGenerator>(&m)) return std::move(*gen);
    throw ValidationError("'" + path + "': expected kind \"stochastic\"");
}

} // namespace latentgeo
