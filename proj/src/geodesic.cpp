#include "latentgeo/geodesic.hpp"

#include <cmath>

namespace latentgeo {

void CurveOptConfig::validate() const {
    if (quad_points < 2) throw InvalidInput("quad_points must be >= 2");
    if (energy_segments < 1) throw InvalidInput("energy_segments must be >= 1");
    if (!(step_size > 0)) throw InvalidInput("step_size must be > 0");
    if (max_iters < 1) throw InvalidInput("max_iters must be >= 1");
    if (plateau_window < 1) throw InvalidInput("plateau_window must be >= 1");
    if (!(plateau_rel_tol > 0)) throw InvalidInput("plateau_rel_tol must be > 0");
    if (max_control_points < 4) throw InvalidInput("max_control_points must be >= 4");
}

double curve_length(const BSplineCurve& c, const MetricProvider& p, int quad_points) {
    if (quad_points < 2) throw InvalidInput("curve_length: quad_points must be >= 2");
    const double h = 1.0 / (quad_points - 1);
    double len = 0.0;
    for (int i = 0; i < quad_points; ++i) {
        double t = double(i) / (quad_points - 1);
        double f = p.speed(eval(c, t), derivative(c, t));
        double w = (i == 0 || i == quad_points - 1) ? 0.5 * h : h;
        len += w * f;
    }
    return len;
}

namespace {

// gamma(t_j) for the uniform energy grid t_j = j/S, j = 0..S
std::vector<Vec> grid_points(const BSplineCurve& c, int segments) {
    std::vector<Vec> pts(segments + 1);
    for (int j = 0; j <= segments; ++j) pts[j] = eval(c, double(j) / segments);
    return pts;
}

double telescoping_energy(const MetricProvider& p, const std::vector<Vec>& pts) {
    const int s = int(pts.size()) - 1;
    double e = 0.0;
    if (p.kind() == MetricProvider::Kind::deterministic) {
        const Mlp& g = *p.generator();
        Vec prev = forward(g, pts[0]);
        for (int i = 1; i <= s; ++i) {
            Vec cur = forward(g, pts[i]);
            double d2 = 0.0;
            for (std::size_t k = 0; k < cur.size(); ++k) {
                double d = cur[k] - prev[k];
                d2 += d * d;
            }
            e += d2;
            prev = std::move(cur);
        }
    } else {
        const StochasticGenerator& g = *p.stochastic_generator();
        Vec pm = forward(g.mu_net, pts[0]);
        Vec ps = forward(g.sigma_net, pts[0]);
        for (int i = 1; i <= s; ++i) {
            Vec cm = forward(g.mu_net, pts[i]);
            Vec cs = forward(g.sigma_net, pts[i]);
            double d2 = 0.0;
            for (std::size_t k = 0; k < cm.size(); ++k) {
                double dm = cm[k] - pm[k];
                double ds = cs[k] - ps[k];
                d2 += dm * dm + ds * ds;
            }
            e += d2;
            pm = std::move(cm);
            ps = std::move(cs);
        }
    }
    return e * s;
}

double quadrature_energy(const BSplineCurve& c, const MetricProvider& p, int segments) {
    const double h = 1.0 / segments;
    double e = 0.0;
    for (int j = 0; j <= segments; ++j) {
        double t = double(j) / segments;
        double f = p.speed(eval(c, t), derivative(c, t));
        double w = (j == 0 || j == segments) ? 0.5 * h : h;
        e += w * f * f;
    }
    return e;
}

// Replace interior control points; endpoints stay put.
BSplineCurve with_interior(const BSplineCurve& c, const std::vector<Vec>& interior) {
    BSplineCurve out = c;
    for (std::size_t m = 0; m < interior.size(); ++m) out.control_points[m + 1] = interior[m];
    return out;
}

std::vector<Vec> interior_points(const BSplineCurve& c) {
    return {c.control_points.begin() + 1, c.control_points.end() - 1};
}

std::vector<Vec> telescoping_gradient(const BSplineCurve& c, const MetricProvider& p,
                                      int segments) {
    const int s = segments;
    const int n = c.n();
    const int d = c.dim();
    std::vector<Vec> pts = grid_points(c, s);
    std::vector<Vec> rows(s + 1);
    for (int j = 0; j <= s; ++j) rows[j] = basis_row(c, double(j) / s);

    std::vector<Vec> grad(n - 1, Vec(d, 0.0));

    auto accumulate = [&](const Mlp& net) {
        std::vector<Vec> vals(s + 1);
        for (int j = 0; j <= s; ++j) vals[j] = forward(net, pts[j]);
        // dE/dval_j = 2S [(val_j - val_{j-1}) + (val_j - val_{j+1})], inner j
        for (int j = 1; j < s; ++j) {
            Vec cot(vals[j].size());
            for (std::size_t k = 0; k < cot.size(); ++k)
                cot[k] = 2.0 * s *
                         ((vals[j][k] - vals[j - 1][k]) + (vals[j][k] - vals[j + 1][k]));
            Vec pull = vjp(net, pts[j], cot);
            for (int m = 1; m < n; ++m) {
                double w = rows[j][m];
                if (w == 0.0) continue;
                for (int k = 0; k < d; ++k) grad[m - 1][k] += w * pull[k];
            }
        }
    };

    if (p.kind() == MetricProvider::Kind::deterministic) {
        accumulate(*p.generator());
    } else {
        accumulate(p.stochastic_generator()->mu_net);
        accumulate(p.stochastic_generator()->sigma_net);
    }
    return grad;
}

std::vector<Vec> fd_gradient(const BSplineCurve& c, const MetricProvider& p, int segments) {
    const double h = 1e-4;
    const int n = c.n();
    const int d = c.dim();
    std::vector<Vec> grad(n - 1, Vec(d, 0.0));
    BSplineCurve work = c;
    for (int m = 1; m < n; ++m) {
        for (int k = 0; k < d; ++k) {
            double orig = work.control_points[m][k];
            work.control_points[m][k] = orig + h;
            double ep = path_energy(work, p, segments);
            work.control_points[m][k] = orig - h;
            double em = path_energy(work, p, segments);
            work.control_points[m][k] = orig;
            grad[m - 1][k] = (ep - em) / (2.0 * h);
        }
    }
    return grad;
}

} // namespace

double path_energy(const BSplineCurve& c, const MetricProvider& p, int segments) {
    if (segments < 1) throw InvalidInput("path_energy: segments must be >= 1");
    if (p.has_output_energy()) return telescoping_energy(p, grid_points(c, segments));
    return quadrature_energy(c, p, segments);
}

std::vector<Vec> energy_gradient(const BSplineCurve& c, const MetricProvider& p,
                                 int segments, GradientMode mode) {
    if (segments < 1) throw InvalidInput("energy_gradient: segments must be >= 1");
    if (mode == GradientMode::exact_vjp) {
        if (!p.has_output_energy())
            throw UnsupportedMode(
                "exact_vjp gradients exist only for plain deterministic/stochastic metrics");
        return telescoping_gradient(c, p, segments);
    }
    return fd_gradient(c, p, segments);
}

ShortenResult shorten(const Vec& z0, const Vec& z1, const MetricProvider& p,
                      const CurveOptConfig& cfg) {
    cfg.validate();
    BSplineCurve curve = straight_line_curve(z0, z1, 2);

    ShortenResult res;
    res.d_straight = curve_length(curve, p, cfg.quad_points);
    BSplineCurve best_curve = curve;
    double best_len = res.d_straight;
    bool improved = false;

    auto consider = [&](const BSplineCurve& c) {
        double len = curve_length(c, p, cfg.quad_points);
        if (len < best_len) {
            best_len = len;
            best_curve = c;
            improved = true;
        }
    };

    double energy = path_energy(curve, p, cfg.energy_segments);
    res.energy_history.push_back(energy);
    // plateau bookkeeping restarts after every control-point insertion
    std::vector<double> segment_energies{energy};
    double step = cfg.step_size;
    const int length_check_every = 25;

    int iter = 0;
    while (iter < cfg.max_iters) {
        std::vector<Vec> grad = energy_gradient(curve, p, cfg.energy_segments,
                                                cfg.gradient_mode);
        double gnorm2 = 0.0;
        for (const Vec& g : grad) gnorm2 += dot(g, g);

        bool accepted = false;
        if (gnorm2 > 0.0) {
            std::vector<Vec> base = interior_points(curve);
            double s = step;
            for (int half = 0; half < 20; ++half) {
                std::vector<Vec> cand = base;
                for (std::size_t m = 0; m < cand.size(); ++m)
                    for (std::size_t k = 0; k < cand[m].size(); ++k)
                        cand[m][k] -= s * grad[m][k];
                BSplineCurve cand_curve = with_interior(curve, cand);
                double e = path_energy(cand_curve, p, cfg.energy_segments);
                if (e < energy) {
                    curve = std::move(cand_curve);
                    energy = e;
                    accepted = true;
                    step = (half == 0) ? s * 2.0 : s;
                    break;
                }
                s *= 0.5;
            }
        }
        ++iter;
        if (accepted) {
            res.energy_history.push_back(energy);
            segment_energies.push_back(energy);
        }

        bool plateau = false;
        if (!accepted) {
            plateau = true; // line search exhausted: no descent at this resolution
        } else if (int(segment_energies.size()) > cfg.plateau_window) {
            double e_old = segment_energies[segment_energies.size() - 1 - cfg.plateau_window];
            double drop = (e_old - energy) / std::max(std::abs(e_old), 1e-300);
            plateau = drop < cfg.plateau_rel_tol;
        }

        if (plateau) {
            consider(curve);
            if (int(curve.control_points.size()) < cfg.max_control_points) {
                curve = insert_control_point(curve);
                energy = path_energy(curve, p, cfg.energy_segments);
                segment_energies.assign(1, energy);
                step = cfg.step_size;
            } else {
                break;
            }
        } else if (iter % length_check_every == 0) {
            consider(curve);
        }
    }
    consider(curve);

    res.iterations = iter;
    if (improved) {
        res.curve = std::move(best_curve);
        res.d_short = best_len;
        res.fallback_used = false;
    } else {
        res.curve = straight_line_curve(z0, z1, 2);
        res.d_short = res.d_straight;
        res.fallback_used = true;
    }
    res.control_points = int(res.curve.control_points.size());
    return res;
}

} // namespace latentgeo
