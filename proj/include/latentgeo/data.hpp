#pragma once

#include <set>
#include <string>
#include <vector>

#include "latentgeo/linalg.hpp"

namespace latentgeo {

/// Images normalized to [0,1] at load (pixel / 255). Immutable after load.
struct Dataset {
    int image_size = 0; // pixels per image (e.g. 784)
    int image_rows = 0;
    int image_cols = 0;
    std::vector<Vec> images;
    std::vector<int> labels;

    int size() const { return int(images.size()); }
};

/// Parses the IDX pair: big-endian magic 0x00000803 (images) / 0x00000801
/// (labels), big-endian dimension counts, raw unsigned bytes.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Writes a Dataset back out as an IDX pair, quantizing pixels to bytes.
void save_idx(const Dataset& ds, const std::string& images_path,
              const std::string& labels_path);

/// Keeps only the requested labels, order preserved.
Dataset filter_digits(const Dataset& ds, const std::set<int>& digits);

std::set<int> parse_digit_set(const std::string& csv);

} // namespace latentgeo
