#pragma once

#include <vector>

#include "latentgeo/metric.hpp"
#include "latentgeo/spline.hpp"

namespace latentgeo {

enum class GradientMode { exact_vjp, finite_difference };

struct CurveOptConfig {
    int quad_points = 256;      // curve_length quadrature nodes
    int energy_segments = 64;   // discrete-energy segments
    double step_size = 1e-2;
    int max_iters = 2000;
    int plateau_window = 20;
    double plateau_rel_tol = 1e-3;
    int max_control_points = 12;
    GradientMode gradient_mode = GradientMode::exact_vjp;

    void validate() const;
};

struct ShortenResult {
    BSplineCurve curve;
    double d_straight = 0.0;
    double d_short = 0.0;
    int iterations = 0;
    int control_points = 0;
    bool fallback_used = false;
    std::vector<double> energy_history; // energy after each accepted iteration
};

/// Riemannian length by composite trapezoid quadrature of
/// speed(gamma(t), gamma'(t)) over a uniform grid of quad_points nodes.
double curve_length(const BSplineCurve& c, const MetricProvider& p, int quad_points);

/// Discrete path energy. Plain deterministic/stochastic metrics use the
/// telescoping output-difference form
///     S * sum_i ||g(gamma(t_{i+1})) - g(gamma(t_i))||^2
/// (+ the sigma term for stochastic decoders), which only needs first
/// derivatives for exact gradients. Feature-chained and custom metrics use
/// trapezoid quadrature of gamma'^T M gamma' instead: the diagonal-only
/// sigma term has no telescoping form.
double path_energy(const BSplineCurve& c, const MetricProvider& p, int segments);

/// Gradient of path_energy w.r.t. the interior control points (endpoints
/// are fixed, so entries exist only for P_1..P_{n-1}). exact_vjp chains the
/// output differences through the network vjp and the spline basis weights;
/// it is only defined for the telescoping variants and throws
/// UnsupportedMode otherwise. finite_difference uses central differences
/// with h = 1e-4 per coordinate.
std::vector<Vec> energy_gradient(const BSplineCurve& c, const MetricProvider& p,
                                 int segments, GradientMode mode);

/// The shorter-curve search: start from the straight line with two interior
/// control points, run gradient descent with backtracking line search on the
/// path energy, insert a control point whenever the energy plateaus, stop at
/// the control-point or iteration budget. Returns the best (shortest) curve
/// seen; if nothing beat the straight line, returns the straight line with
/// fallback_used = true, so d_short <= d_straight always holds exactly.
ShortenResult shorten(const Vec& z0, const Vec& z1, const MetricProvider& p,
                      const CurveOptConfig& cfg);

} // namespace latentgeo
