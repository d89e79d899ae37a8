#include "latentgeo/spline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <json.hpp>

namespace latentgeo {

using nlohmann::json;

void BSplineCurve::validate() const {
    const int npts = int(control_points.size());
    if (npts < 4) throw InvalidInput("curve needs at least 4 control points");
    if (int(knots.size()) != npts + 4)
        throw InvalidInput("knot count " + std::to_string(knots.size()) +
                           " != control points + 4");
    for (int i = 0; i < 4; ++i) {
        if (knots[i] != 0.0) throw InvalidInput("first four knots must be 0");
        if (knots[knots.size() - 1 - i] != 1.0) throw InvalidInput("last four knots must be 1");
    }
    for (std::size_t i = 4; i + 4 < knots.size(); ++i) {
        if (!(knots[i] > 0.0 && knots[i] < 1.0))
            throw InvalidInput("interior knots must lie strictly inside (0,1)");
        if (knots[i] < knots[i - 1]) throw InvalidInput("knots must be nondecreasing");
    }
    const std::size_t d = control_points.front().size();
    for (const Vec& p : control_points) {
        if (p.size() != d) throw InvalidInput("control point dims differ");
        for (double v : p)
            if (!std::isfinite(v)) throw InvalidInput("non-finite control point");
    }
}

double basis(int i, int k, double t, const std::vector<double>& knots) {
    if (k == 1) {
        if (knots[i] <= t && t < knots[i + 1]) return 1.0;
        // left-limit convention at the right end of the domain
        if (t >= knots.back() && knots[i] < knots[i + 1] && knots[i + 1] >= knots.back())
            return 1.0;
        return 0.0;
    }
    double v = 0.0;
    double den1 = knots[i + k - 1] - knots[i];
    if (den1 > 0.0) v += (t - knots[i]) / den1 * basis(i, k - 1, t, knots);
    double den2 = knots[i + k] - knots[i + 1];
    if (den2 > 0.0) v += (knots[i + k] - t) / den2 * basis(i + 1, k - 1, t, knots);
    return v;
}

namespace {

// Orders 1..k_max iteratively; returns the order-k_max row.
Vec basis_row_order(const std::vector<double>& knots, double t, int k_max) {
    const int m = int(knots.size());
    Vec b(m - 1, 0.0);
    for (int i = 0; i + 1 < m; ++i) {
        if ((knots[i] <= t && t < knots[i + 1]) ||
            (t >= knots.back() && knots[i] < knots[i + 1] && knots[i + 1] >= knots.back()))
            b[i] = 1.0;
    }
    for (int k = 2; k <= k_max; ++k) {
        Vec bn(m - k, 0.0);
        for (int i = 0; i + k < m; ++i) {
            double v = 0.0;
            double den1 = knots[i + k - 1] - knots[i];
            if (den1 > 0.0) v += (t - knots[i]) / den1 * b[i];
            double den2 = knots[i + k] - knots[i + 1];
            if (den2 > 0.0) v += (knots[i + k] - t) / den2 * b[i + 1];
            bn[i] = v;
        }
        b = std::move(bn);
    }
    return b;
}

void check_domain(double t) {
    if (!(t >= 0.0 && t <= 1.0))
        throw DomainError("curve parameter t = " + std::to_string(t) + " outside [0,1]");
}

} // namespace

Vec basis_row(const BSplineCurve& c, double t) {
    Vec b = basis_row_order(c.knots, t, 4);
    b.resize(c.n() + 1);
    return b;
}

Vec derivative_row(const BSplineCurve& c, double t) {
    const int n = c.n();
    Vec n3 = basis_row_order(c.knots, t, 3); // entries 0..n+1
    Vec d(n + 1, 0.0);
    for (int i = 0; i + 1 <= n; ++i) {
        double den = c.knots[i + 4] - c.knots[i + 1];
        if (den <= 0.0) continue;
        double w = 3.0 * n3[i + 1] / den;
        d[i + 1] += w;
        d[i] -= w;
    }
    return d;
}

Vec eval(const BSplineCurve& c, double t) {
    check_domain(t);
    Vec b = basis_row(c, t);
    Vec out(c.dim(), 0.0);
    for (int i = 0; i <= c.n(); ++i) {
        double w = b[i];
        if (w == 0.0) continue;
        const Vec& p = c.control_points[i];
        for (int k = 0; k < c.dim(); ++k) out[k] += w * p[k];
    }
    return out;
}

Vec derivative(const BSplineCurve& c, double t) {
    check_domain(t);
    Vec d = derivative_row(c, t);
    Vec out(c.dim(), 0.0);
    for (int i = 0; i <= c.n(); ++i) {
        double w = d[i];
        if (w == 0.0) continue;
        const Vec& p = c.control_points[i];
        for (int k = 0; k < c.dim(); ++k) out[k] += w * p[k];
    }
    return out;
}

BSplineCurve insert_control_point(const BSplineCurve& c) {
    const auto& t = c.knots;
    // largest knot interval, lowest index on ties
    int span = -1;
    double best = 0.0;
    for (std::size_t j = 0; j + 1 < t.size(); ++j) {
        double len = t[j + 1] - t[j];
        if (len > best + 0.0) {
            best = len;
            span = int(j);
        }
    }
    if (span < 0) throw InvalidInput("insert_control_point: degenerate knot vector");
    const double t_new = 0.5 * (t[span] + t[span + 1]);

    // Boehm insertion for order 4: control points i in [span-2, span] are
    // affine combinations of the old ones, computed from old values only.
    const int n = c.n();
    std::vector<Vec> pts;
    pts.reserve(n + 2);
    for (int i = 0; i <= n + 1; ++i) {
        if (i <= span - 3) {
            pts.push_back(c.control_points[i]);
        } else if (i <= span) {
            double a = (t_new - t[i]) / (t[i + 3] - t[i]);
            Vec p(c.dim());
            for (int k = 0; k < c.dim(); ++k)
                p[k] = (1.0 - a) * c.control_points[i - 1][k] + a * c.control_points[i][k];
            pts.push_back(std::move(p));
        } else {
            pts.push_back(c.control_points[i - 1]);
        }
    }

    BSplineCurve out;
    out.control_points = std::move(pts);
    out.knots = t;
    out.knots.insert(out.knots.begin() + span + 1, t_new);
    return out;
}

BSplineCurve straight_line_curve(const Vec& z0, const Vec& z1, int interior) {
    if (interior < 2) throw InvalidInput("straight_line_curve: interior must be >= 2");
    if (z0.size() != z1.size()) throw InvalidInput("straight_line_curve: dim mismatch");
    if (z0 == z1) throw DegenerateEndpoints("straight_line_curve: identical endpoints");

    const int n = interior + 1; // n+1 control points
    BSplineCurve c;
    c.control_points.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        double f = double(i) / n;
        Vec p(z0.size());
        for (std::size_t k = 0; k < z0.size(); ++k) p[k] = (1.0 - f) * z0[k] + f * z1[k];
        c.control_points.push_back(std::move(p));
    }
    c.knots.assign(4, 0.0);
    for (int j = 1; j <= n - 3; ++j) c.knots.push_back(double(j) / (n - 2));
    c.knots.insert(c.knots.end(), 4, 1.0);
    c.validate();
    return c;
}

void save_curve(const BSplineCurve& c, const std::string& path) {
    json doc{{"control_points", c.control_points}, {"knots", c.knots}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << doc.dump(1) << "\n";
}

BSplineCurve load_curve(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("'" + path + "': " + e.what());
    }
    BSplineCurve c;
    c.control_points = doc.at("control_points").get<std::vector<Vec>>();
    c.knots = doc.at("knots").get<std::vector<double>>();
    c.validate();
    return c;
}

} // namespace latentgeo
