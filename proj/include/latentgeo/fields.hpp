#pragma once

#include <string>
#include <vector>

#include "latentgeo/metric.hpp"

namespace latentgeo {

enum class FieldKind { log_condition, log_sqrt_det };
enum class EigKind { min_eig, max_eig };

struct Bounds {
    double xmin = -4, xmax = 4, ymin = -4, ymax = 4;

    bool contains(const Vec& z) const {
        return z[0] >= xmin && z[0] <= xmax && z[1] >= ymin && z[1] <= ymax;
    }
};

/// values[iy * nx + ix]; singular nodes carry NaN and the scan continues.
struct GridField {
    Bounds bounds;
    int nx = 0, ny = 0;
    FieldKind kind = FieldKind::log_condition;
    std::vector<double> values;

    double at(int ix, int iy) const { return values[std::size_t(iy) * nx + ix]; }
};

/// Integral curves of the chosen extreme-eigenvalue unit eigenvector field.
/// Eigenvectors have no canonical sign, so each Euler step keeps a positive
/// inner product with the previous direction; the first step aligns with
/// (1,0), an exact tie keeping the computed sign.
struct StreamlineSet {
    EigKind kind = EigKind::min_eig;
    double step_length = 0.0;
    std::vector<std::vector<Vec>> lines;
};

GridField scalar_grid(const MetricProvider& p, FieldKind kind, const Bounds& b,
                      int nx, int ny, int workers = 0);
GridField scalar_grid_serial(const MetricProvider& p, FieldKind kind, const Bounds& b,
                             int nx, int ny);

/// first_reference orients the first step (default (1,0)); an exact zero
/// inner product keeps the computed eigenvector sign.
StreamlineSet streamlines(const MetricProvider& p, EigKind kind,
                          const std::vector<Vec>& seeds, double step_length,
                          int n_steps, const Bounds& domain,
                          const Vec& first_reference = Vec{1.0, 0.0});

void write_grid_csv(const GridField& g, const std::string& path);
void write_streamlines_csv(const StreamlineSet& s, const std::string& path);

} // namespace latentgeo
