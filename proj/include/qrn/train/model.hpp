// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "qrn/data/data.hpp"
#include "qrn/detector/detect.hpp"
#include "qrn/quanv/quanv.hpp"

namespace qrn::train {

inline constexpr int kCheckpointVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

enum class StemKind { quantum, classical };

/// Every hyperparameter of the pipeline; echoed into checkpoints.
struct ModelConfig {
    int image_size = 32;
    StemKind stem = StemKind::quantum;

    // quanvolution stem
    int patch_size = 2;
    int stride = 2;
    int n_filters = 4;
    int ansatz_layers = 1;
    quanv::Encoding encoding = quanv::Encoding::angle;
    quanv::Pooling pooling = quanv::Pooling::expectation;
    quanv::Activation activation = quanv::Activation::none;

    // head
    int pyramid_channels = 16;
    int subnet_channels = 16;
    std::vector<int> level_strides{2, 4};
    std::vector<double> anchor_scales{8.0, 16.0};
    std::vector<double> anchor_ratios{1.0, 2.0, 0.5};
    double match_pos_iou = 0.5;
    double match_neg_iou = 0.4;
    double nms_iou = 0.5;
    double score_floor = 0.05;
    double focal_alpha = 0.25;
    double focal_gamma = 2.0;
    double smooth_l1_beta = 1.0;

    std::vector<std::string> class_names = detector::ClassSet::scad().names;

    int n_classes() const { return static_cast<int>(class_names.size()); }
    int anchors_per_location() const { return static_cast<int>(anchor_ratios.size()); }
};

/// Quanvolution (or classical conv) stem plus the shared detection head.
struct Model {
    ModelConfig config;
    std::uint64_t init_seed = 0;

    quanv::QuanvLayer qstem;         // used when config.stem == quantum
    detector::ConvLayer cstem;       // 3x3 stride-2 conv, used when classical
    detector::ConvStack p1_conv;     // 1 layer, stem channels -> pyramid channels
    detector::ConvStack p2_conv;     // 1 layer, pyramid -> pyramid channels
    detector::ConvStack cls_subnet;  // shared across levels
    detector::ConvStack box_subnet;  // shared across levels
    detector::AnchorSet anchors;     // derived from config
};

/// Seeded initialization: head weights uniform in +-0.05, classification
/// output bias log(0.01/0.99) (rare-foreground prior), quanvolution filter
/// angles uniform in [-pi, pi).
Model init_model(const ModelConfig& config, std::uint64_t seed);

/// Ordered view over every trainable tensor, used by SGD, checkpointing and
/// the gradient audits. Order is stable and matches Gradients::by_tensor.
std::vector<std::pair<std::string, std::vector<double>*>> param_refs(Model& model);

struct Gradients {
    std::vector<std::vector<double>> by_tensor;  // aligned with param_refs order

    void accumulate(const Gradients& other, double scale);
};

/// Per-anchor head outputs, flattened across pyramid levels.
struct ForwardResult {
    std::vector<double> scores;                   // [anchor * Y + class]
    std::vector<std::array<double, 4>> offsets;   // [anchor]
};

ForwardResult forward(const Model& model, const FeatureTensor& image);

/// Loss of one sample under the matching/normalization rules:
/// (sum focal over non-ignored anchor-class pairs + sum smooth-L1 over
/// positive anchors) / max(1, n_positives).
struct LossBreakdown {
    double total = 0.0;
    double cls = 0.0;
    double box = 0.0;
    int n_positive = 0;
};

LossBreakdown sample_loss(const Model& model, const data::Sample& sample);

/// Batch gradients: per-sample gradients are summed, then scaled by
/// 1/batch_size. Raises DivergenceError on a non-finite loss.
struct BackwardResult {
    Gradients grads;
    double mean_loss = 0.0;
};

BackwardResult backward(const Model& model, const std::vector<data::Sample>& batch);

/// Decoded, clamped, NMS-filtered detections for one image.
std::vector<detector::Detection> infer(const Model& model, const FeatureTensor& image);

/// Accuracy of the detection-to-classification bridge over a sample set.
double bridge_accuracy(const Model& model, const std::vector<data::Sample>& samples);

struct TrainConfig {
    int epochs = 10;
    int batch_size = 8;
    double learning_rate = 0.01;
    std::uint64_t seed = 0;
};

struct EpochLog {
    int epoch = 0;
    double mean_loss = 0.0;
    double eval_accuracy = 0.0;  // detection-to-classification bridge, held-out split
};

struct FitResult {
    Model model;
    std::vector<EpochLog> log;
};

/// Mini-batch SGD with a fixed learning rate and seeded shuffling; the
/// dataset is split 80/20 (train/held-out) by a seeded shuffle first.
FitResult fit(Model model, const std::vector<data::Sample>& dataset, const TrainConfig& cfg);

/// Versioned binary checkpoint: magic, format version, config echo (JSON),
/// length-checked tensor index, raw little-endian doubles, FNV-1a checksum.
void save_checkpoint(const Model& model, const std::filesystem::path& path);
Model load_checkpoint(const std::filesystem::path& path);

/// JSON echo of a config (stored in checkpoints and manifests).
std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& text);

}  // namespace qrn::train
