// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "qrn/detector/conv.hpp"

namespace qrn::detector {

/// Corner-form box, (x0, y0) top-left, (x1, y1) bottom-right, pixel units.
struct Box {
    double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    double area() const { return (x1 - x0) * (y1 - y0); }
};

/// Center-form anchor.
struct Anchor {
    double cx = 0, cy = 0, w = 0, h = 0;
    Box corners() const { return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2}; }
};

struct LevelInfo {
    int stride = 0;
    int h = 0, w = 0;
    int offset = 0;  // index of this level's first anchor
};

struct AnchorSet {
    std::vector<Anchor> anchors;
    int per_location = 0;  // A
    std::vector<LevelInfo> levels;
};

struct ClassSet {
    std::vector<std::string> names;
    int count() const { return static_cast<int>(names.size()); }
    /// The four street-crime arms categories.
    static ClassSet scad() {
        return {{"short_range_rifle", "shotgun", "pistol", "knife"}};
    }
};

struct Detection {
    Box box;
    int class_index = 0;
    double score = 0.0;
};

struct GroundTruth {
    Box box;
    int class_index = 0;
};

/// Grid of A = |ratios| anchors per feature location for each pyramid level.
/// Anchor (level, i, j, a) is centered at (stride*(j+0.5), stride*(i+0.5))
/// with w = scale*sqrt(ratio), h = scale/sqrt(ratio). image_size must be
/// divisible by every stride.
AnchorSet generate_anchors(int image_size, const std::vector<int>& level_strides,
                           const std::vector<double>& scales,
                           const std::vector<double>& ratios);

struct Pyramid {
    FeatureTensor p1;
    FeatureTensor p2;
};

struct PyramidTrace {
    ConvTrace p1;
    ConvTrace p2;
};

/// Two-level mini pyramid over the stem output: P1 is a same-resolution 3x3
/// conv, P2 a stride-2 2x2 average downsample of P1 followed by a 3x3 conv.
Pyramid build_pyramid(const FeatureTensor& stem_output, const ConvStack& p1_conv,
                      const ConvStack& p2_conv, PyramidTrace* trace = nullptr);

/// Classification subnet: 4 hidden relu conv layers plus a sigmoid output
/// conv with A*Y channels. Validates the stack shape, then runs it.
FeatureTensor class_subnet(const FeatureTensor& features, const ConvStack& stack, int A,
                           int Y, ConvTrace* trace = nullptr);

/// Class-agnostic box subnet: 4 hidden relu conv layers plus a linear output
/// conv with A*4 channels.
FeatureTensor box_subnet(const FeatureTensor& features, const ConvStack& stack, int A,
                         ConvTrace* trace = nullptr);

/// Center-offset decoding; tw/th are clamped to <= 4 before exponentiation.
Box decode_box(const Anchor& anchor, const std::array<double, 4>& t);

/// Algebraic inverse of decode_box (for targets and round-trip checks).
std::array<double, 4> encode_box(const Anchor& anchor, const Box& box);

/// Focal loss on one sigmoid score. The score is clamped to
/// [1e-7, 1 - 1e-7] first; with p_t = score (positive) or 1 - score
/// (negative) and a_t = alpha or 1 - alpha, the loss is
/// -a_t * (1 - p_t)^gamma * log(p_t).
double focal_loss(double score, bool is_positive, double alpha = 0.25, double gamma = 2.0);

/// d(focal_loss)/d(score); zero outside the clamp range.
double focal_loss_grad(double score, bool is_positive, double alpha = 0.25,
                       double gamma = 2.0);

double smooth_l1(double pred, double target, double beta = 1.0);
double smooth_l1_grad(double pred, double target, double beta = 1.0);

/// Intersection over union of corner boxes; degenerate boxes give 0.
double iou(const Box& a, const Box& b);

enum class MatchKind { negative, ignore, positive };

struct AnchorMatch {
    MatchKind kind = MatchKind::negative;
    int truth_index = -1;
};

/// IoU-band assignment: positive at best IoU >= pos_thr (argmax truth, ties
/// to the lowest truth index), negative below neg_thr, ignore between.
/// Additionally every truth claims its single highest-IoU anchor as positive;
/// when two truths claim the same anchor the higher IoU (then lower truth
/// index) wins.
std::vector<AnchorMatch> match_anchors(const AnchorSet& anchors,
                                       const std::vector<GroundTruth>& truths,
                                       double pos_thr = 0.5, double neg_thr = 0.4);

/// Per-class greedy suppression. Detections below score_floor are dropped;
/// survivors are sorted by descending score (ties: smaller area, then input
/// order) and kept while their IoU with every kept box of the class stays
/// <= iou_threshold. Output is ordered by class, then keep order.
std::vector<Detection> nms(const std::vector<Detection>& detections,
                           double iou_threshold = 0.5, double score_floor = 0.05);

}  // namespace qrn::detector
