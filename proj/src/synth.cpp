#include "latentgeo/synth.hpp"

#include <cmath>

#include "latentgeo/rng.hpp"

namespace latentgeo {

namespace {

struct Pt {
    double x, y;
};

using Stroke = std::vector<Pt>;

Stroke line(Pt a, Pt b, int n = 24) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        double t = double(i) / n;
        s.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
    return s;
}

Stroke quad(Pt a, Pt c, Pt b, int n = 32) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        double t = double(i) / n;
        double u = 1.0 - t;
        s.push_back({u * u * a.x + 2 * u * t * c.x + t * t * b.x,
                     u * u * a.y + 2 * u * t * c.y + t * t * b.y});
    }
    return s;
}

Stroke arc(double cx, double cy, double rx, double ry, double a0, double a1, int n = 48) {
    Stroke s;
    for (int i = 0; i <= n; ++i) {
        double a = a0 + (a1 - a0) * double(i) / n;
        s.push_back({cx + rx * std::cos(a), cy + ry * std::sin(a)});
    }
    return s;
}

const double kPi = 3.14159265358979323846;

// glyphs in unit coordinates, y growing downwards
std::vector<Stroke> glyph(int digit) {
    switch (digit) {
        case 0:
            return {arc(0.50, 0.50, 0.26, 0.40, 0, 2 * kPi)};
        case 1:
            return {line({0.36, 0.24}, {0.54, 0.10}), line({0.54, 0.10}, {0.54, 0.90})};
        case 2:
            return {arc(0.50, 0.32, 0.26, 0.22, -kPi, 0.35), line({0.72, 0.42}, {0.24, 0.90}),
                    line({0.24, 0.90}, {0.78, 0.90})};
        case 3:
            return {quad({0.28, 0.16}, {0.88, 0.10}, {0.50, 0.48}),
                    quad({0.50, 0.48}, {0.95, 0.55}, {0.55, 0.90}),
                    line({0.55, 0.90}, {0.28, 0.86})};
        case 4:
            return {line({0.60, 0.10}, {0.22, 0.62}), line({0.22, 0.62}, {0.82, 0.62}),
                    line({0.66, 0.34}, {0.66, 0.92})};
        case 5:
            return {line({0.74, 0.12}, {0.32, 0.12}), line({0.32, 0.12}, {0.29, 0.48}),
                    quad({0.29, 0.48}, {0.95, 0.48}, {0.62, 0.88}),
                    line({0.62, 0.88}, {0.27, 0.84})};
        case 6:
            return {quad({0.66, 0.10}, {0.22, 0.22}, {0.30, 0.62}),
                    arc(0.50, 0.68, 0.21, 0.21, 0, 2 * kPi)};
        case 7:
            return {line({0.22, 0.12}, {0.80, 0.12}), line({0.80, 0.12}, {0.42, 0.90})};
        case 8:
            return {arc(0.50, 0.30, 0.19, 0.18, 0, 2 * kPi),
                    arc(0.50, 0.68, 0.23, 0.21, 0, 2 * kPi)};
        case 9:
            return {arc(0.48, 0.32, 0.20, 0.20, 0, 2 * kPi), line({0.68, 0.34}, {0.60, 0.90})};
        default:
            throw InvalidInput("synth: digit out of range");
    }
}

} // namespace

Vec synth_digit_image(int digit, std::uint64_t seed, int split, int index) {
    Rng rng(substream(substream(substream(seed, std::uint64_t(split)),
                                std::uint64_t(digit)),
                      std::uint64_t(index)));

    const double rot = rng.uniform(-0.09, 0.09);
    const double sx = rng.uniform(0.92, 1.08);
    const double sy = rng.uniform(0.92, 1.08);
    const double shear = rng.uniform(-0.09, 0.09);
    const double tx = rng.uniform(-0.03, 0.03);
    const double ty = rng.uniform(-0.03, 0.03);
    const double stroke_px = rng.uniform(1.0, 1.55); // gaussian radius, pixels
    const double gain = rng.uniform(0.9, 1.0);

    const double cr = std::cos(rot), sr = std::sin(rot);
    auto transform = [&](Pt p) {
        double x = (p.x - 0.5) * sx, y = (p.y - 0.5) * sy;
        x += shear * y;
        double xr = cr * x - sr * y, yr = sr * x + cr * y;
        return Pt{0.5 + xr + tx, 0.5 + yr + ty};
    };

    Vec img(28 * 28, 0.0);
    const double denom = 2.0 * stroke_px * stroke_px;
    for (const Stroke& s : glyph(digit)) {
        for (const Pt& raw : s) {
            Pt p = transform(raw);
            double px = 2.0 + p.x * 23.0;
            double py = 2.0 + p.y * 23.0;
            int lo_x = std::max(0, int(px - 3 * stroke_px));
            int hi_x = std::min(27, int(px + 3 * stroke_px) + 1);
            int lo_y = std::max(0, int(py - 3 * stroke_px));
            int hi_y = std::min(27, int(py + 3 * stroke_px) + 1);
            for (int iy = lo_y; iy <= hi_y; ++iy) {
                for (int ix = lo_x; ix <= hi_x; ++ix) {
                    double dx = ix - px, dy = iy - py;
                    double v = gain * std::exp(-(dx * dx + dy * dy) / denom);
                    double& cell = img[std::size_t(iy) * 28 + ix];
                    if (v > cell) cell = v;
                }
            }
        }
    }
    // byte quantization matches what an IDX round trip would produce
    for (double& v : img) v = std::lround(std::min(1.0, v) * 255.0) / 255.0;
    return img;
}

Dataset synth_digits(int per_class, const std::set<int>& digits, std::uint64_t seed,
                     int split) {
    if (per_class < 1) throw InvalidInput("synth_digits: per_class must be >= 1");
    if (digits.empty()) throw InvalidInput("synth_digits: empty digit set");

    Dataset ds;
    ds.image_rows = ds.image_cols = 28;
    ds.image_size = 28 * 28;
    // interleave classes so any prefix of the dataset stays balanced
    for (int i = 0; i < per_class; ++i) {
        for (int digit : digits) {
            ds.images.push_back(synth_digit_image(digit, seed, split, i));
            ds.labels.push_back(digit);
        }
    }
    return ds;
}

} // namespace latentgeo
