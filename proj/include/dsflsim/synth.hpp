#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "dsflsim/idx.hpp"
#include "dsflsim/rng.hpp"

namespace dsfl {

// Deterministic MNIST-shaped stand-in dataset: 28x28 grayscale, 10 balanced
// classes, 60k/10k train/test split by default. Each class is a small
// mixture of smooth random prototype fields; samples are drawn by shifting
// a prototype, scaling its contrast and adding pixel noise. Intended for
// environments where the real IDX files are not available — the training
// pipeline consumes either interchangeably.
struct SynthConfig {
    int train_count = 60000;
    int test_count = 10000;
    int rows = 28;
    int cols = 28;
    int classes = 10;
    int modes_per_class = 3;
    double noise_sigma = 0.25;
    int shift_range = 3;        // uniform integer shift in [-range, range]
    double contrast_lo = 0.75;
    double contrast_hi = 1.25;
};

namespace detail {

// coarse random field, bilinearly upsampled, then soft-thresholded into
// bright blobs on a dark background (sparse, MNIST-like statistics)
inline std::vector<double> make_prototype(Rng& rng, int rows, int cols) {
    constexpr int kCoarse = 7;
    double coarse[kCoarse][kCoarse];
    for (auto& row : coarse)
        for (double& v : row) v = rng.uniform(0.0, 1.0);
    std::vector<double> field(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const double fr = static_cast<double>(r) / (rows - 1) * (kCoarse - 1);
            const double fc = static_cast<double>(c) / (cols - 1) * (kCoarse - 1);
            const int r0 = std::min(static_cast<int>(fr), kCoarse - 2);
            const int c0 = std::min(static_cast<int>(fc), kCoarse - 2);
            const double tr = fr - r0;
            const double tc = fc - c0;
            const double v =
                (1 - tr) * ((1 - tc) * coarse[r0][c0] + tc * coarse[r0][c0 + 1]) +
                tr * ((1 - tc) * coarse[r0 + 1][c0] + tc * coarse[r0 + 1][c0 + 1]);
            field[static_cast<std::size_t>(r) * cols + c] =
                std::clamp((v - 0.55) / 0.45, 0.0, 1.0);
        }
    }
    return field;
}

inline void render_sample(const std::vector<double>& proto, int rows, int cols,
                          int dx, int dy, double contrast, double sigma,
                          Rng& rng, std::uint8_t* out) {
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const int sr = std::clamp(r + dy, 0, rows - 1);
            const int sc = std::clamp(c + dx, 0, cols - 1);
            double v = proto[static_cast<std::size_t>(sr) * cols + sc] * contrast;
            v += sigma * rng.normal();
            v = std::clamp(v, 0.0, 1.0);
            out[r * cols + c] = static_cast<std::uint8_t>(std::lround(v * 255.0));
        }
    }
}

inline Dataset synth_split(const SynthConfig& cfg,
                           const std::vector<std::vector<double>>& prototypes,
                           int count, std::uint64_t seed) {
    Dataset ds;
    ds.rows = cfg.rows;
    ds.cols = cfg.cols;
    ds.pixels.resize(static_cast<std::size_t>(count) * cfg.rows * cfg.cols);
    ds.labels.resize(count);
    Rng rng(seed);
    for (int i = 0; i < count; ++i) {
        const int label = i % cfg.classes;  // balanced by construction
        const int mode = static_cast<int>(rng.below(cfg.modes_per_class));
        const auto& proto =
            prototypes[static_cast<std::size_t>(label) * cfg.modes_per_class + mode];
        const int dx = static_cast<int>(rng.below(2 * cfg.shift_range + 1)) -
                       cfg.shift_range;
        const int dy = static_cast<int>(rng.below(2 * cfg.shift_range + 1)) -
                       cfg.shift_range;
        const double contrast = rng.uniform(cfg.contrast_lo, cfg.contrast_hi);
        render_sample(proto, cfg.rows, cfg.cols, dx, dy, contrast,
                      cfg.noise_sigma, rng,
                      ds.pixels.data() +
                          static_cast<std::size_t>(i) * cfg.rows * cfg.cols);
        ds.labels[i] = static_cast<std::uint8_t>(label);
    }
    return ds;
}

}  // namespace detail

struct SynthDataset {
    Dataset train;
    Dataset test;
};

inline SynthDataset make_synthetic_dataset(const SynthConfig& cfg,
                                           std::uint64_t seed) {
    std::vector<std::vector<double>> prototypes;
    prototypes.reserve(static_cast<std::size_t>(cfg.classes) * cfg.modes_per_class);
    Rng proto_rng(derive_seed(seed, 0x5157, 1));
    for (int c = 0; c < cfg.classes; ++c)
        for (int m = 0; m < cfg.modes_per_class; ++m)
            prototypes.push_back(detail::make_prototype(proto_rng, cfg.rows, cfg.cols));

    SynthDataset out;
    out.train = detail::synth_split(cfg, prototypes, cfg.train_count,
                                    derive_seed(seed, 0x5157, 2));
    out.test = detail::synth_split(cfg, prototypes, cfg.test_count,
                                   derive_seed(seed, 0x5157, 3));
    return out;
}

}  // namespace dsfl
