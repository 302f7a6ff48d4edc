// SPDX-License-Identifier: Apache-2.0
#include "qrn/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "qrn/core/error.hpp"

namespace qrn::metrics {

std::int64_t ConfusionMatrix::total() const {
    std::int64_t s = 0;
    for (auto v : counts) s += v;
    return s;
}

std::int64_t ConfusionMatrix::trace() const {
    std::int64_t s = 0;
    for (int i = 0; i < n_classes; ++i) s += at(i, i);
    return s;
}

std::int64_t ConfusionMatrix::row_sum(int r) const {
    std::int64_t s = 0;
    for (int c = 0; c < n_classes; ++c) s += at(r, c);
    return s;
}

std::int64_t ConfusionMatrix::col_sum(int c) const {
    std::int64_t s = 0;
    for (int r = 0; r < n_classes; ++r) s += at(r, c);
    return s;
}

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& actuals,
                          int n_classes) {
    if (preds.size() != actuals.size())
        throw ArgumentError("confusion: preds and actuals must have equal length");
    if (n_classes < 1) throw ArgumentError("confusion: need at least one class");
    ConfusionMatrix m(n_classes);
    for (std::size_t i = 0; i < preds.size(); ++i) {
        if (preds[i] < 0 || preds[i] >= n_classes || actuals[i] < 0 || actuals[i] >= n_classes)
            throw ArgumentError("confusion: class index out of range at sample " +
                                std::to_string(i));
        ++m.at(preds[i], actuals[i]);
    }
    return m;
}

Prf per_class_prf(const ConfusionMatrix& m, int c) {
    if (c < 0 || c >= m.n_classes) throw IndexError("per_class_prf: class out of range");
    const double tp = static_cast<double>(m.at(c, c));
    const double fp = static_cast<double>(m.row_sum(c)) - tp;
    const double fn = static_cast<double>(m.col_sum(c)) - tp;
    Prf r;
    r.precision = (tp + fp) > 0 ? tp / (tp + fp) : 0.0;
    r.recall = (tp + fn) > 0 ? tp / (tp + fn) : 0.0;
    r.f1 = (r.precision + r.recall) > 0
               ? 2.0 * (r.precision * r.recall) / (r.precision + r.recall)
               : 0.0;
    return r;
}

double accuracy(const ConfusionMatrix& m) {
    const std::int64_t t = m.total();
    return t > 0 ? static_cast<double>(m.trace()) / static_cast<double>(t) : 0.0;
}

RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw ArgumentError("roc: scores and labels must have equal length");
    std::int64_t P = 0, N = 0;
    for (int l : labels) (l != 0 ? P : N) += 1;
    if (P == 0 || N == 0)
        throw ArgumentError("roc: degenerate input, need both label classes");

    std::vector<std::size_t> order(scores.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    RocCurve curve;
    curve.points.emplace_back(0.0, 0.0);
    std::int64_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        // tied scores advance together
        while (i < order.size() && scores[order[i]] == s) {
            (labels[order[i]] != 0 ? tp : fp) += 1;
            ++i;
        }
        curve.thresholds.push_back(s);
        curve.points.emplace_back(static_cast<double>(fp) / static_cast<double>(N),
                                  static_cast<double>(tp) / static_cast<double>(P));
    }
    if (curve.points.back() != std::make_pair(1.0, 1.0)) curve.points.emplace_back(1.0, 1.0);
    return curve;
}

double auc(const RocCurve& curve) {
    double area = 0.0;
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
        const auto& [x0, y0] = curve.points[i - 1];
        const auto& [x1, y1] = curve.points[i];
        area += (x1 - x0) * 0.5 * (y0 + y1);
    }
    return area;
}

EvalReport evaluate(const std::vector<ImageEval>& images, int n_classes) {
    std::vector<int> preds, actuals;
    std::vector<int> roc_actuals;
    std::vector<std::vector<double>> roc_scores(n_classes);
    std::int64_t missed = 0;

    for (const ImageEval& img : images) {
        for (const auto& truth : img.truths) {
            int best = -1;
            double best_iou = 0.0;
            std::vector<double> class_best(n_classes, 0.0);
            for (std::size_t d = 0; d < img.detections.size(); ++d) {
                const auto& det = img.detections[d];
                const double v = detector::iou(det.box, truth.box);
                if (v < 0.5) continue;
                if (det.class_index >= 0 && det.class_index < n_classes)
                    class_best[det.class_index] = std::max(class_best[det.class_index], det.score);
                const auto& cur = img.detections[best < 0 ? d : best];
                const bool better =
                    best < 0 || v > best_iou ||
                    (v == best_iou && (det.score > cur.score ||
                                       (det.score == cur.score &&
                                        det.class_index < cur.class_index)));
                if (better) {
                    best = static_cast<int>(d);
                    best_iou = v;
                }
            }
            if (best >= 0) {
                preds.push_back(img.detections[best].class_index);
                actuals.push_back(truth.class_index);
            } else {
                ++missed;
            }
            roc_actuals.push_back(truth.class_index);
            for (int c = 0; c < n_classes; ++c) roc_scores[c].push_back(class_best[c]);
        }
    }

    EvalReport report;
    report.matrix = confusion(preds, actuals, n_classes);
    report.missed_truths = missed;
    report.accuracy = accuracy(report.matrix);
    double f1_sum = 0.0;
    for (int c = 0; c < n_classes; ++c) {
        report.per_class.push_back(per_class_prf(report.matrix, c));
        f1_sum += report.per_class.back().f1;
    }
    report.macro_f1 = n_classes > 0 ? f1_sum / n_classes : 0.0;

    for (int c = 0; c < n_classes; ++c) {
        ClassRoc cr;
        std::vector<int> labels(roc_actuals.size());
        for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = roc_actuals[i] == c ? 1 : 0;
        const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
        const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
        if (!has_pos || !has_neg) {
            cr.degenerate = true;
        } else {
            cr.curve = roc(roc_scores[c], labels);
            cr.auc = auc(cr.curve);
        }
        report.roc.push_back(std::move(cr));
    }
    return report;
}

}  // namespace qrn::metrics
