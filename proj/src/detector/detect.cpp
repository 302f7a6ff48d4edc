// SPDX-License-Identifier: Apache-2.0
#include "qrn/detector/detect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qrn/core/error.hpp"

namespace qrn::detector {

namespace {

constexpr double kScoreEps = 1e-7;
constexpr double kLogOffsetCap = 4.0;

void check_subnet_stack(const ConvStack& stack, int out_channels, Act out_act,
                        const char* what) {
    if (stack.layers.size() != 5)
        throw ArgumentError(std::string(what) + ": expected 4 hidden layers + 1 output layer");
    for (std::size_t i = 0; i + 1 < stack.layers.size(); ++i)
        if (stack.layers[i].act != Act::relu)
            throw ArgumentError(std::string(what) + ": hidden layers must be relu");
    const ConvLayer& out = stack.layers.back();
    if (out.act != out_act) throw ArgumentError(std::string(what) + ": wrong output activation");
    if (out.out_ch != out_channels)
        throw ArgumentError(std::string(what) + ": output channels must be " +
                            std::to_string(out_channels) + ", got " + std::to_string(out.out_ch));
}

}  // namespace

AnchorSet generate_anchors(int image_size, const std::vector<int>& level_strides,
                           const std::vector<double>& scales,
                           const std::vector<double>& ratios) {
    if (level_strides.empty() || level_strides.size() != scales.size())
        throw ArgumentError("generate_anchors: strides and scales must pair up");
    if (ratios.empty()) throw ArgumentError("generate_anchors: at least one ratio");
    AnchorSet set;
    set.per_location = static_cast<int>(ratios.size());
    for (std::size_t l = 0; l < level_strides.size(); ++l) {
        const int stride = level_strides[l];
        if (stride < 1 || image_size % stride != 0)
            throw ArgumentError("generate_anchors: image size must be divisible by stride " +
                                std::to_string(stride));
        LevelInfo info;
        info.stride = stride;
        info.h = info.w = image_size / stride;
        info.offset = static_cast<int>(set.anchors.size());
        for (int i = 0; i < info.h; ++i) {
            for (int j = 0; j < info.w; ++j) {
                const double cx = stride * (j + 0.5);
                const double cy = stride * (i + 0.5);
                for (double r : ratios) {
                    const double sr = std::sqrt(r);
                    set.anchors.push_back({cx, cy, scales[l] * sr, scales[l] / sr});
                }
            }
        }
        set.levels.push_back(info);
    }
    return set;
}

Pyramid build_pyramid(const FeatureTensor& stem_output, const ConvStack& p1_conv,
                      const ConvStack& p2_conv, PyramidTrace* trace) {
    Pyramid py;
    py.p1 = conv_forward(stem_output, p1_conv, trace ? &trace->p1 : nullptr);
    const FeatureTensor down = avg_downsample_2x2(py.p1);
    py.p2 = conv_forward(down, p2_conv, trace ? &trace->p2 : nullptr);
    return py;
}

FeatureTensor class_subnet(const FeatureTensor& features, const ConvStack& stack, int A,
                           int Y, ConvTrace* trace) {
    check_subnet_stack(stack, A * Y, Act::sigmoid, "class_subnet");
    return conv_forward(features, stack, trace);
}

FeatureTensor box_subnet(const FeatureTensor& features, const ConvStack& stack, int A,
                         ConvTrace* trace) {
    check_subnet_stack(stack, A * 4, Act::none, "box_subnet");
    return conv_forward(features, stack, trace);
}

Box decode_box(const Anchor& anchor, const std::array<double, 4>& t) {
    const double tw = std::min(t[2], kLogOffsetCap);
    const double th = std::min(t[3], kLogOffsetCap);
    const double cx = anchor.cx + t[0] * anchor.w;
    const double cy = anchor.cy + t[1] * anchor.h;
    const double w = anchor.w * std::exp(tw);
    const double h = anchor.h * std::exp(th);
    return {cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2};
}

std::array<double, 4> encode_box(const Anchor& anchor, const Box& box) {
    const double cx = 0.5 * (box.x0 + box.x1);
    const double cy = 0.5 * (box.y0 + box.y1);
    const double w = box.x1 - box.x0;
    const double h = box.y1 - box.y0;
    return {(cx - anchor.cx) / anchor.w, (cy - anchor.cy) / anchor.h,
            std::log(w / anchor.w), std::log(h / anchor.h)};
}

double focal_loss(double score, bool is_positive, double alpha, double gamma) {
    const double p = std::clamp(score, kScoreEps, 1.0 - kScoreEps);
    const double p_t = is_positive ? p : 1.0 - p;
    const double a_t = is_positive ? alpha : 1.0 - alpha;
    return -a_t * std::pow(1.0 - p_t, gamma) * std::log(p_t);
}

double focal_loss_grad(double score, bool is_positive, double alpha, double gamma) {
    if (score < kScoreEps || score > 1.0 - kScoreEps) return 0.0;
    const double p_t = is_positive ? score : 1.0 - score;
    const double a_t = is_positive ? alpha : 1.0 - alpha;
    // d/dp_t of -a_t (1-p_t)^g log(p_t)
    double d = -a_t * std::pow(1.0 - p_t, gamma) / p_t;
    if (gamma != 0.0)
        d += a_t * gamma * std::pow(1.0 - p_t, gamma - 1.0) * std::log(p_t);
    return is_positive ? d : -d;
}

double smooth_l1(double pred, double target, double beta) {
    const double d = std::abs(pred - target);
    return d < beta ? 0.5 * d * d / beta : d - 0.5 * beta;
}

double smooth_l1_grad(double pred, double target, double beta) {
    const double d = pred - target;
    if (std::abs(d) < beta) return d / beta;
    return d > 0 ? 1.0 : -1.0;
}

double iou(const Box& a, const Box& b) {
    const double area_a = a.area(), area_b = b.area();
    if (area_a <= 0.0 || area_b <= 0.0) return 0.0;
    const double ix = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
    const double iy = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    return inter / (area_a + area_b - inter);
}

std::vector<AnchorMatch> match_anchors(const AnchorSet& anchors,
                                       const std::vector<GroundTruth>& truths,
                                       double pos_thr, double neg_thr) {
    const std::size_t n = anchors.anchors.size();
    std::vector<AnchorMatch> matches(n);
    if (truths.empty()) return matches;

    std::vector<double> best_truth_iou(truths.size(), -1.0);
    std::vector<int> best_truth_anchor(truths.size(), -1);

    for (std::size_t a = 0; a < n; ++a) {
        const Box ab = anchors.anchors[a].corners();
        double best = -1.0;
        int best_t = -1;
        for (std::size_t t = 0; t < truths.size(); ++t) {
            const double v = iou(ab, truths[t].box);
            if (v > best) {
                best = v;
                best_t = static_cast<int>(t);
            }
            if (v > best_truth_iou[t]) {
                best_truth_iou[t] = v;
                best_truth_anchor[t] = static_cast<int>(a);
            }
        }
        if (best >= pos_thr)
            matches[a] = {MatchKind::positive, best_t};
        else if (best >= neg_thr)
            matches[a] = {MatchKind::ignore, -1};
    }

    // every truth claims its best anchor; higher IoU then lower index wins a
    // contested anchor
    std::vector<double> claim_iou(n, -1.0);
    for (std::size_t t = 0; t < truths.size(); ++t) {
        const int a = best_truth_anchor[t];
        if (a < 0) continue;
        if (best_truth_iou[t] > claim_iou[a]) {
            claim_iou[a] = best_truth_iou[t];
            matches[a] = {MatchKind::positive, static_cast<int>(t)};
        }
    }
    return matches;
}

std::vector<Detection> nms(const std::vector<Detection>& detections, double iou_threshold,
                           double score_floor) {
    int max_class = -1;
    for (const Detection& d : detections) max_class = std::max(max_class, d.class_index);
    std::vector<Detection> kept;
    for (int c = 0; c <= max_class; ++c) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < detections.size(); ++i)
            if (detections[i].class_index == c && detections[i].score >= score_floor)
                order.push_back(i);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) {
            if (detections[l].score != detections[r].score)
                return detections[l].score > detections[r].score;
            return detections[l].box.area() < detections[r].box.area();
        });
        std::vector<std::size_t> class_kept;
        for (std::size_t i : order) {
            bool suppressed = false;
            for (std::size_t k : class_kept) {
                if (iou(detections[i].box, detections[k].box) > iou_threshold) {
                    suppressed = true;
                    break;
                }
            }
            if (!suppressed) {
                class_kept.push_back(i);
                kept.push_back(detections[i]);
            }
        }
    }
    return kept;
}

}  // namespace qrn::detector
