// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qrn/core/tensor.hpp"
#include "qrn/detector/detect.hpp"

namespace qrn::data {

/// 8-bit grayscale raster as stored on disk.
struct Raster {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major
};

/// One image with its ground-truth boxes. Image values lie in [0, 1].
struct Sample {
    FeatureTensor image;
    std::vector<detector::GroundTruth> truths;
};

struct DatasetConfig {
    int image_size = 32;  // must be divisible by 4 (pyramid strides)
    int samples_per_class = 40;
    std::uint64_t seed = 1;
    double noise_level = 0.05;  // in [0, 0.2]
    bool multi_object = false;
};

/// Seeded synthetic dataset: one parametric glyph per class (long thin bar +
/// stock, thick bar + muzzle, L-shape, thin triangle) at random position,
/// scale, 4-way orientation and intensity, plus uniform noise. Sample order
/// interleaves classes. Fully deterministic per seed; truth boxes tightly
/// bound the pre-noise glyph pixels.
std::vector<Sample> generate(const DatasetConfig& config);

/// value / 255 exactly.
FeatureTensor normalize(const Raster& raster);

/// [0,1] image back to 8-bit (round to nearest).
Raster to_raster(const FeatureTensor& image);

/// Random horizontal flip (p = 0.5) composed with an integer translation of
/// up to +-2 px, clamped so every truth box stays in bounds. Boxes transform
/// with the image.
Sample augment(const Sample& sample, std::uint64_t rng_seed);

/// Deterministic flip primitive used by augment.
Sample flip_horizontal(const Sample& sample);
Sample translate(const Sample& sample, int dx, int dy);

/// Binary PGM (P5, maxval 255) I/O. Malformed input raises FormatError with
/// the byte offset of the defect.
Raster load_pgm(const std::filesystem::path& path);
void save_pgm(const Raster& raster, const std::filesystem::path& path);

/// Directory layout: images/NNNNN.pgm, annotations.jsonl, classes.txt.
struct Dataset {
    std::vector<Sample> samples;
    detector::ClassSet classes;
};

void write_dataset(const std::filesystem::path& dir, const std::vector<Sample>& samples,
                   const detector::ClassSet& classes);
Dataset load_dataset(const std::filesystem::path& dir);

}  // namespace qrn::data
