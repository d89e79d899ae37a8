#pragma once

#include <cstdint>
#include <set>

#include "latentgeo/data.hpp"

namespace latentgeo {

/// Deterministic stand-in corpus for environments without the real MNIST
/// files: 28x28 stroke-rendered digits 0-9 with per-image jitter (rotation,
/// scale, shear, translation, stroke width), quantized to bytes exactly like
/// the IDX loader expects. Image i of digit c in split `split` depends only
/// on (seed, split, c, i).
Dataset synth_digits(int per_class, const std::set<int>& digits, std::uint64_t seed,
                     int split);

/// One rendered image (28x28, values in [0,1]).
Vec synth_digit_image(int digit, std::uint64_t seed, int split, int index);

} // namespace latentgeo
