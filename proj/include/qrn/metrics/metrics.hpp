// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "qrn/detector/detect.hpp"

namespace qrn::metrics {

/**
 * @brief Class confusion counts. Rows index the PREDICTED class, columns the
 * actual class.
 */
struct ConfusionMatrix {
    int n_classes = 0;
    std::vector<std::int64_t> counts;  // row-major [predicted][actual]

    explicit ConfusionMatrix(int n = 0)
        : n_classes(n), counts(static_cast<std::size_t>(n) * n, 0) {}
    std::int64_t& at(int predicted, int actual) {
        return counts[static_cast<std::size_t>(predicted) * n_classes + actual];
    }
    std::int64_t at(int predicted, int actual) const {
        return counts[static_cast<std::size_t>(predicted) * n_classes + actual];
    }
    std::int64_t total() const;
    std::int64_t trace() const;
    std::int64_t row_sum(int r) const;
    std::int64_t col_sum(int c) const;
};

ConfusionMatrix confusion(const std::vector<int>& preds, const std::vector<int>& actuals,
                          int n_classes);

struct Prf {
    double precision = 0, recall = 0, f1 = 0;
};

/// TP = counts[c][c], FP = row sum - TP, FN = column sum - TP. Zero
/// denominators give 0, and f1 = 2*p*r/(p+r) with the same convention.
Prf per_class_prf(const ConfusionMatrix& m, int c);

/// trace / total; 0 for an empty matrix.
double accuracy(const ConfusionMatrix& m);

struct RocCurve {
    std::vector<std::pair<double, double>> points;  // (fpr, tpr), (0,0) .. (1,1)
    std::vector<double> thresholds;                 // descending distinct scores
};

/// Threshold sweep over descending distinct scores; tied scores advance
/// together. Throws ArgumentError unless both label classes are present.
RocCurve roc(const std::vector<double>& scores, const std::vector<int>& labels);

/// Trapezoidal area under the curve over fpr.
double auc(const RocCurve& curve);

struct ClassRoc {
    RocCurve curve;
    double auc = 0.0;
    bool degenerate = false;  // single-class labels in the eval set
};

struct EvalReport {
    ConfusionMatrix matrix;
    std::vector<Prf> per_class;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassRoc> roc;
    std::int64_t missed_truths = 0;  // truths with no detection at IoU >= 0.5
};

struct ImageEval {
    std::vector<detector::Detection> detections;
    std::vector<detector::GroundTruth> truths;
};

/// Detection-to-classification bridge: each ground truth is matched to the
/// highest-IoU detection with IoU >= 0.5 (ties: higher score, then lower
/// class index) and scored as a classification of that truth. Unmatched
/// truths are counted in missed_truths and excluded from the matrix. ROC
/// scores per class c are the best overlapping detection score of class c
/// (0 when none), over all truths.
EvalReport evaluate(const std::vector<ImageEval>& images, int n_classes);

}  // namespace qrn::metrics
