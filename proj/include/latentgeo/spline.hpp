#pragma once

#include <string>
#include <vector>

#include "latentgeo/linalg.hpp"

namespace latentgeo {

/// Clamped cubic B-spline (order 4) on [0,1]. Knot vector has multiplicity 4
/// at both ends so the curve interpolates the first and last control points.
/// Curves are value types; everything here is pure.
struct BSplineCurve {
    std::vector<Vec> control_points; // n+1 points, n+1 >= 4
    std::vector<double> knots;       // n+5 entries

    int n() const { return int(control_points.size()) - 1; }
    int dim() const { return control_points.empty() ? 0 : int(control_points.front().size()); }

    /// Knot shape, endpoint multiplicities and dimension consistency.
    void validate() const;
};

/// Cox-de Boor basis N_{i,k}(t) with the 0/0 := 0 convention. At the right
/// end of the domain the order-1 base case switches to the left-limit span,
/// so N at t=1 is the limit from below and C(1) = P_n.
double basis(int i, int k, double t, const std::vector<double>& knots);

/// All order-4 basis values at t (length n+1). One row of the collocation
/// matrix; eval/derivative/energy gradients all run off this.
Vec basis_row(const BSplineCurve& c, double t);

/// Coefficients d_i with C'(t) = sum_i d_i P_i, from the closed-form
/// derivative 3 * sum N_{i+1,3}(t) (P_{i+1}-P_i)/(T_{i+4}-T_{i+1}).
Vec derivative_row(const BSplineCurve& c, double t);

Vec eval(const BSplineCurve& c, double t);
Vec derivative(const BSplineCurve& c, double t);

/// Knot insertion at the midpoint of the largest knot interval (lowest index
/// wins ties), adjusting control points so the curve geometry is preserved.
BSplineCurve insert_control_point(const BSplineCurve& c);

/// Straight segment from z0 to z1 with `interior` extra control points,
/// equally spaced; uniform interior knots.
BSplineCurve straight_line_curve(const Vec& z0, const Vec& z1, int interior);

void save_curve(const BSplineCurve& c, const std::string& path);
BSplineCurve load_curve(const std::string& path);

} // namespace latentgeo
