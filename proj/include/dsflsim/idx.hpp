#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dsfl {

// IDX binary ingestion (the MNIST container format): big-endian magic and
// dimension words, then raw unsigned bytes. Image files carry magic
// 0x00000803 (3-D: count x rows x cols), label files 0x00000801 (1-D).

inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;

struct Dataset {
    int rows = 0;
    int cols = 0;
    std::vector<std::uint8_t> pixels;  // size() == count * rows * cols
    std::vector<std::uint8_t> labels;  // size() == count

    int count() const { return static_cast<int>(labels.size()); }
    int image_dim() const { return rows * cols; }

    // pixel intensities scaled to [0, 1]
    double pixel(int image, int index) const {
        return pixels[static_cast<std::size_t>(image) * image_dim() + index] / 255.0;
    }
    const std::uint8_t* image_bytes(int image) const {
        return pixels.data() + static_cast<std::size_t>(image) * image_dim();
    }
};

namespace detail {

inline std::uint32_t read_be32(std::istream& in, const std::string& field,
                               const std::string& path) {
    unsigned char buf[4];
    if (!in.read(reinterpret_cast<char*>(buf), 4))
        throw std::runtime_error("idx: truncated file (reading " + field +
                                 "): " + path);
    return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
           (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

inline void write_be32(std::ostream& out, std::uint32_t v) {
    const unsigned char buf[4] = {
        static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
        static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(buf), 4);
}

}  // namespace detail

inline Dataset load_dataset(const std::string& images_path,
                            const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("idx: cannot open images file: " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("idx: cannot open labels file: " + labels_path);

    const std::uint32_t img_magic = detail::read_be32(img, "image magic", images_path);
    if (img_magic != kIdxImageMagic)
        throw std::runtime_error("idx: bad image magic in " + images_path +
                                 ": expected 0x00000803, got " +
                                 std::to_string(img_magic));
    const std::uint32_t n_img = detail::read_be32(img, "image count", images_path);
    const std::uint32_t rows = detail::read_be32(img, "row count", images_path);
    const std::uint32_t cols = detail::read_be32(img, "column count", images_path);

    const std::uint32_t lab_magic = detail::read_be32(lab, "label magic", labels_path);
    if (lab_magic != kIdxLabelMagic)
        throw std::runtime_error("idx: bad label magic in " + labels_path +
                                 ": expected 0x00000801, got " +
                                 std::to_string(lab_magic));
    const std::uint32_t n_lab = detail::read_be32(lab, "label count", labels_path);
    if (n_img != n_lab)
        throw std::runtime_error("idx: image count " + std::to_string(n_img) +
                                 " != label count " + std::to_string(n_lab));

    Dataset ds;
    ds.rows = static_cast<int>(rows);
    ds.cols = static_cast<int>(cols);
    ds.pixels.resize(std::size_t(n_img) * rows * cols);
    ds.labels.resize(n_lab);
    if (!img.read(reinterpret_cast<char*>(ds.pixels.data()),
                  static_cast<std::streamsize>(ds.pixels.size())))
        throw std::runtime_error("idx: truncated pixel data in " + images_path);
    if (!lab.read(reinterpret_cast<char*>(ds.labels.data()),
                  static_cast<std::streamsize>(ds.labels.size())))
        throw std::runtime_error("idx: truncated label data in " + labels_path);
    return ds;
}

inline void save_dataset(const Dataset& ds, const std::string& images_path,
                         const std::string& labels_path) {
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw std::runtime_error("idx: cannot write " + images_path);
    detail::write_be32(img, kIdxImageMagic);
    detail::write_be32(img, static_cast<std::uint32_t>(ds.count()));
    detail::write_be32(img, static_cast<std::uint32_t>(ds.rows));
    detail::write_be32(img, static_cast<std::uint32_t>(ds.cols));
    img.write(reinterpret_cast<const char*>(ds.pixels.data()),
              static_cast<std::streamsize>(ds.pixels.size()));

    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw std::runtime_error("idx: cannot write " + labels_path);
    detail::write_be32(lab, kIdxLabelMagic);
    detail::write_be32(lab, static_cast<std::uint32_t>(ds.count()));
    lab.write(reinterpret_cast<const char*>(ds.labels.data()),
              static_cast<std::streamsize>(ds.labels.size()));
}

}  // namespace dsfl
