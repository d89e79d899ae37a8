#include "latentgeo/data.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>

namespace latentgeo {

namespace {

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw ParseError("'" + path + "': truncated header");
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(b), 4);
}

} // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream imf(images_path, std::ios::binary);
    if (!imf) throw ParseError("cannot open '" + images_path + "'");
    std::ifstream lbf(labels_path, std::ios::binary);
    if (!lbf) throw ParseError("cannot open '" + labels_path + "'");

    std::uint32_t im_magic = read_u32_be(imf, images_path);
    if (im_magic != 0x00000803u)
        throw FormatError("'" + images_path + "': image magic " + std::to_string(im_magic) +
                          " != 2051");
    std::uint32_t lb_magic = read_u32_be(lbf, labels_path);
    if (lb_magic != 0x00000801u)
        throw FormatError("'" + labels_path + "': label magic " + std::to_string(lb_magic) +
                          " != 2049");

    std::uint32_t n_images = read_u32_be(imf, images_path);
    std::uint32_t rows = read_u32_be(imf, images_path);
    std::uint32_t cols = read_u32_be(imf, images_path);
    std::uint32_t n_labels = read_u32_be(lbf, labels_path);
    if (n_images != n_labels)
        throw ConsistencyError("image count " + std::to_string(n_images) +
                               " != label count " + std::to_string(n_labels));

    Dataset ds;
    ds.image_rows = int(rows);
    ds.image_cols = int(cols);
    ds.image_size = int(rows * cols);
    ds.images.reserve(n_images);
    ds.labels.reserve(n_images);

    std::vector<unsigned char> buf(ds.image_size);
    for (std::uint32_t i = 0; i < n_images; ++i) {
        imf.read(reinterpret_cast<char*>(buf.data()), ds.image_size);
        if (!imf) throw ParseError("'" + images_path + "': truncated at image " + std::to_string(i));
        Vec img(ds.image_size);
        for (int p = 0; p < ds.image_size; ++p) img[p] = buf[p] / 255.0;
        ds.images.push_back(std::move(img));

        char lb;
        lbf.read(&lb, 1);
        if (!lbf) throw ParseError("'" + labels_path + "': truncated at label " + std::to_string(i));
        ds.labels.push_back(int(static_cast<unsigned char>(lb)));
    }
    return ds;
}

void save_idx(const Dataset& ds, const std::string& images_path,
              const std::string& labels_path) {
    std::ofstream imf(images_path, std::ios::binary);
    if (!imf) throw Error("cannot open '" + images_path + "' for writing");
    std::ofstream lbf(labels_path, std::ios::binary);
    if (!lbf) throw Error("cannot open '" + labels_path + "' for writing");

    write_u32_be(imf, 0x00000803u);
    write_u32_be(imf, std::uint32_t(ds.size()));
    write_u32_be(imf, std::uint32_t(ds.image_rows));
    write_u32_be(imf, std::uint32_t(ds.image_cols));
    write_u32_be(lbf, 0x00000801u);
    write_u32_be(lbf, std::uint32_t(ds.size()));

    std::vector<unsigned char> buf(ds.image_size);
    for (int i = 0; i < ds.size(); ++i) {
        for (int p = 0; p < ds.image_size; ++p) {
            double v = ds.images[i][p];
            v = std::min(1.0, std::max(0.0, v));
            buf[p] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        imf.write(reinterpret_cast<char*>(buf.data()), ds.image_size);
        unsigned char lb = static_cast<unsigned char>(ds.labels[i]);
        lbf.write(reinterpret_cast<char*>(&lb), 1);
    }
    if (!imf || !lbf) throw Error("idx write failed");
}

Dataset filter_digits(const Dataset& ds, const std::set<int>& digits) {
    if (digits.empty()) throw InvalidInput("filter_digits: empty digit set");
    for (int d : digits)
        if (d < 0 || d > 9) throw InvalidInput("filter_digits: digit out of range");

    Dataset out;
    out.image_size = ds.image_size;
    out.image_rows = ds.image_rows;
    out.image_cols = ds.image_cols;
    for (int i = 0; i < ds.size(); ++i) {
        if (digits.count(ds.labels[i])) {
            out.images.push_back(ds.images[i]);
            out.labels.push_back(ds.labels[i]);
        }
    }
    if (out.images.empty()) throw EmptyDataset("filter_digits: no matching labels");
    return out;
}

std::set<int> parse_digit_set(const std::string& csv) {
    std::set<int> out;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) continue;
        out.insert(std::stoi(tok));
    }
    return out;
}

} // namespace latentgeo
