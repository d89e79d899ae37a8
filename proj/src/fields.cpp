#include "latentgeo/fields.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "latentgeo/parallel.hpp"

namespace latentgeo {

namespace {

double node_value(const MetricProvider& p, FieldKind kind, const Vec& z) {
    try {
        SymMatrix m = p.metric_at(z);
        if (kind == FieldKind::log_condition) return std::log(condition_number(m));
        return log_sqrt_det(m);
    } catch (const NotPositiveDefinite&) {
        return std::numeric_limits<double>::quiet_NaN();
    } catch (const SingularMetric&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

GridField make_grid(const MetricProvider& p, FieldKind kind, const Bounds& b, int nx,
                    int ny, int workers, bool parallel) {
    if (p.latent_dim() != 2) throw InvalidInput("scalar_grid: latent dim must be 2");
    if (nx < 2 || ny < 2) throw InvalidInput("scalar_grid: resolution must be >= 2 per axis");
    if (!(b.xmax > b.xmin && b.ymax > b.ymin)) throw InvalidInput("scalar_grid: bounds not ordered");

    GridField g;
    g.bounds = b;
    g.nx = nx;
    g.ny = ny;
    g.kind = kind;
    g.values.assign(std::size_t(nx) * ny, 0.0);

    auto body = [&](int node) {
        int iy = node / nx, ix = node % nx;
        Vec z{b.xmin + (b.xmax - b.xmin) * ix / (nx - 1),
              b.ymin + (b.ymax - b.ymin) * iy / (ny - 1)};
        g.values[node] = node_value(p, kind, z);
    };
    if (parallel)
        parallel_for(nx * ny, workers, body);
    else
        for (int node = 0; node < nx * ny; ++node) body(node);
    return g;
}

} // namespace

GridField scalar_grid(const MetricProvider& p, FieldKind kind, const Bounds& b, int nx,
                      int ny, int workers) {
    return make_grid(p, kind, b, nx, ny, workers, true);
}

GridField scalar_grid_serial(const MetricProvider& p, FieldKind kind, const Bounds& b,
                             int nx, int ny) {
    return make_grid(p, kind, b, nx, ny, 1, false);
}

StreamlineSet streamlines(const MetricProvider& p, EigKind kind,
                          const std::vector<Vec>& seeds, double step_length, int n_steps,
                          const Bounds& domain, const Vec& first_reference) {
    if (p.latent_dim() != 2) throw InvalidInput("streamlines: latent dim must be 2");
    if (!(step_length > 0)) throw InvalidInput("streamlines: step_length must be > 0");

    StreamlineSet out;
    out.kind = kind;
    out.step_length = step_length;

    for (const Vec& seed : seeds) {
        std::vector<Vec> line{seed};
        Vec prev_dir = first_reference; // orients the first step
        Vec z = seed;
        for (int s = 0; s < n_steps; ++s) {
            if (!domain.contains(z)) break;
            Vec dir;
            try {
                EigenPairs e = sym_eig(p.metric_at(z));
                dir = e.vectors.col(kind == EigKind::min_eig ? 0 : 1);
            } catch (const std::exception&) {
                break; // eigen failure truncates this streamline
            }
            double inner = dir[0] * prev_dir[0] + dir[1] * prev_dir[1];
            if (inner < 0.0) {
                dir[0] = -dir[0];
                dir[1] = -dir[1];
            }
            z = Vec{z[0] + step_length * dir[0], z[1] + step_length * dir[1]};
            line.push_back(z);
            prev_dir = dir;
            if (!domain.contains(z)) break;
        }
        out.lines.push_back(std::move(line));
    }
    return out;
}

namespace {

void put_value(std::ofstream& out, double v) {
    char buf[32];
    if (std::isnan(v))
        out << "nan"; // missing-marker for singular nodes
    else {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        out << buf;
    }
}

} // namespace

void write_grid_csv(const GridField& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    char buf[160];
    std::snprintf(buf, sizeof buf, "# bounds xmin=%.17g xmax=%.17g ymin=%.17g ymax=%.17g\n",
                  g.bounds.xmin, g.bounds.xmax, g.bounds.ymin, g.bounds.ymax);
    out << buf;
    out << "# resolution nx=" << g.nx << " ny=" << g.ny << "\n";
    out << "# kind=" << (g.kind == FieldKind::log_condition ? "log_condition" : "log_sqrt_det")
        << "\n";
    out << "x,y,value\n";
    for (int iy = 0; iy < g.ny; ++iy) {
        for (int ix = 0; ix < g.nx; ++ix) {
            double x = g.bounds.xmin + (g.bounds.xmax - g.bounds.xmin) * ix / (g.nx - 1);
            double y = g.bounds.ymin + (g.bounds.ymax - g.bounds.ymin) * iy / (g.ny - 1);
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,", x, y);
            out << buf;
            put_value(out, g.at(ix, iy));
            out << "\n";
        }
    }
}

void write_streamlines_csv(const StreamlineSet& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << "streamline_id,point_index,x,y\n";
    char buf[96];
    for (std::size_t id = 0; id < s.lines.size(); ++id) {
        for (std::size_t i = 0; i < s.lines[id].size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%zu,%.17g,%.17g\n", id, i,
                          s.lines[id][i][0], s.lines[id][i][1]);
            out << buf;
        }
    }
}

} // namespace latentgeo
