#include "latentgeo/sampling.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "latentgeo/parallel.hpp"

namespace latentgeo {

using nlohmann::json;

void McConfig::validate() const {
    if (n_samples < 1) throw InvalidInput("mc config: n_samples must be >= 1");
    if (!(alpha > 0)) throw InvalidInput("mc config: alpha must be > 0");
    if (histogram_bins < 1) throw InvalidInput("mc config: histogram_bins must be >= 1");
    shorten.validate();
}

std::pair<Vec, Vec> sample_pair(const MetricProvider& p, double alpha, Rng& rng) {
    if (!(alpha > 0)) throw InvalidInput("sample_pair: alpha must be > 0");
    const int d = p.latent_dim();
    Vec x_a(d);
    for (double& v : x_a) v = rng.normal();

    EigenPairs e = sym_eig(p.metric_at(x_a));
    Vec v_max = e.vectors.col(d - 1); // eigenvalues ascend: last column is maximal
    double nv = norm(v_max);
    for (double& v : v_max) v /= nv;

    // align towards the origin; exact ties keep the computed sign
    double along = 0.0;
    for (int i = 0; i < d; ++i) along += v_max[i] * (-x_a[i]);
    if (along < 0.0)
        for (double& v : v_max) v = -v;

    Vec x_b(d);
    for (int i = 0; i < d; ++i) x_b[i] = x_a[i] + alpha * v_max[i];
    return {std::move(x_a), std::move(x_b)};
}

namespace {

ImprovementRecord run_one(const MetricProvider& p, const McConfig& cfg, int index) {
    ImprovementRecord rec;
    rec.index = index;
    try {
        Rng rng(substream(cfg.seed, std::uint64_t(index)));
        auto [x_a, x_b] = sample_pair(p, cfg.alpha, rng);
        rec.x_a = x_a;
        rec.x_b = x_b;
        ShortenResult sr = shorten(x_a, x_b, p, cfg.shorten);
        rec.d_straight = sr.d_straight;
        rec.d_short = sr.d_short;
        rec.rel_improvement = (sr.d_straight - sr.d_short) / sr.d_straight;
        rec.fallback = sr.fallback_used;
    } catch (const std::exception&) {
        rec.failed = true;
    }
    return rec;
}

McSummary summarize(std::vector<ImprovementRecord> records, const McConfig& cfg) {
    McSummary s;
    s.n_samples = cfg.n_samples;
    s.records = std::move(records);

    std::vector<double> vals;
    for (const ImprovementRecord& r : s.records) {
        if (r.failed) {
            ++s.n_failed;
            continue;
        }
        if (r.fallback) ++s.n_fallback;
        vals.push_back(r.rel_improvement);
    }
    if (s.n_failed * 10 > s.n_samples)
        throw RunError("monte carlo: " + std::to_string(s.n_failed) + " of " +
                       std::to_string(s.n_samples) + " samples failed (> 10%)");

    double sum = 0.0;
    for (double v : vals) sum += v;
    s.mean = vals.empty() ? 0.0 : sum / double(vals.size());
    double ss = 0.0;
    for (double v : vals) ss += (v - s.mean) * (v - s.mean);
    s.stddev = vals.size() > 1 ? std::sqrt(ss / double(vals.size() - 1)) : 0.0;

    double hi = 0.0;
    for (double v : vals) hi = std::max(hi, v);
    if (hi <= 0.0) hi = 1.0; // all-zero improvements: histogram over [0,1]
    const int nb = cfg.histogram_bins;
    s.bin_edges.resize(nb + 1);
    for (int i = 0; i <= nb; ++i) s.bin_edges[i] = hi * double(i) / nb;
    s.bin_counts.assign(nb, 0);
    for (double v : vals) {
        int b = std::min(int(v / hi * nb), nb - 1);
        ++s.bin_counts[b];
    }
    return s;
}

} // namespace

McSummary run_monte_carlo_serial(const MetricProvider& p, const McConfig& cfg) {
    cfg.validate();
    std::vector<ImprovementRecord> records(cfg.n_samples);
    for (int i = 0; i < cfg.n_samples; ++i) records[i] = run_one(p, cfg, i);
    return summarize(std::move(records), cfg);
}

McSummary run_monte_carlo(const MetricProvider& p, const McConfig& cfg) {
    cfg.validate();
    std::vector<ImprovementRecord> records(cfg.n_samples);
    parallel_for(cfg.n_samples, cfg.workers,
                 [&](int i) { records[i] = run_one(p, cfg, i); });
    return summarize(std::move(records), cfg);
}

void write_records_csv(const McSummary& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    const int d = s.records.empty() ? 0 : int(s.records.front().x_a.size());
    out << "index";
    for (int k = 0; k < d; ++k) out << ",xA_" << k;
    for (int k = 0; k < d; ++k) out << ",xB_" << k;
    out << ",d_straight,d_short,rel_improvement,fallback,failed\n";
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << ',' << buf;
    };
    for (const ImprovementRecord& r : s.records) {
        out << r.index;
        for (int k = 0; k < d; ++k) put(r.failed ? 0.0 : r.x_a[k]);
        for (int k = 0; k < d; ++k) put(r.failed ? 0.0 : r.x_b[k]);
        put(r.d_straight);
        put(r.d_short);
        put(r.rel_improvement);
        out << ',' << (r.fallback ? 1 : 0) << ',' << (r.failed ? 1 : 0) << "\n";
    }
}

void write_summary_json(const McSummary& s, const std::string& path) {
    json doc{{"n_samples", s.n_samples},
             {"n_failed", s.n_failed},
             {"n_fallback", s.n_fallback},
             {"mean_rel_improvement", s.mean},
             {"stddev_rel_improvement", s.stddev},
             {"histogram", {{"bin_edges", s.bin_edges}, {"counts", s.bin_counts}}}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << doc.dump(1) << "\n";
}

} // namespace latentgeo
