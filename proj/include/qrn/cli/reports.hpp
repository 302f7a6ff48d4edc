// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>

#include "qrn/detector/detect.hpp"
#include "qrn/metrics/metrics.hpp"

namespace qrn::cli {

/// Shortest round-trip decimal form; keeps CSV/JSON output byte-stable.
std::string fmt_double(double v);

/// Writes the four report artifacts for one evaluated model into dir:
/// report.json, confusion.csv, roc_<class>.csv per class, and the SVG
/// renderings confusion.svg, roc.svg, f1.svg, accuracy.svg.
void write_eval_artifacts(const std::filesystem::path& dir,
                          const metrics::EvalReport& report,
                          const detector::ClassSet& classes);

/// Mean AUC over non-degenerate classes (0 if all degenerate).
double mean_auc(const metrics::EvalReport& report);

}  // namespace qrn::cli
