// SPDX-License-Identifier: Apache-2.0
#include "qrn/cli/reports.hpp"

#include <charconv>
#include <fstream>

#include "json.hpp"
#include "qrn/cli/svg.hpp"
#include "qrn/core/error.hpp"

namespace qrn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot write '" + path.string() + "'", 0);
    f << content;
}

std::string confusion_csv(const metrics::EvalReport& r, const detector::ClassSet& classes) {
    std::string out = "predicted\\actual";
    for (const auto& n : classes.names) out += "," + n;
    out += "\n";
    for (int p = 0; p < r.matrix.n_classes; ++p) {
        out += classes.names[p];
        for (int a = 0; a < r.matrix.n_classes; ++a)
            out += "," + std::to_string(r.matrix.at(p, a));
        out += "\n";
    }
    return out;
}

std::string confusion_svg(const metrics::EvalReport& r, const detector::ClassSet& classes) {
    const int n = r.matrix.n_classes;
    const double cell = 56, left = 120, top = 60;
    SvgWriter svg(static_cast<int>(left + n * cell + 40),
                  static_cast<int>(top + n * cell + 60));
    svg.text(left, 24, "Confusion matrix (rows: predicted, columns: actual)", 14);
    std::int64_t maxc = 1;
    for (auto v : r.matrix.counts) maxc = std::max(maxc, v);
    for (int a = 0; a < n; ++a)
        svg.text(left + a * cell + cell / 2, top - 10, classes.names[a], 10, "middle");
    for (int p = 0; p < n; ++p) {
        svg.text(left - 8, top + p * cell + cell / 2 + 4, classes.names[p], 10, "end");
        for (int a = 0; a < n; ++a) {
            const double frac = static_cast<double>(r.matrix.at(p, a)) / static_cast<double>(maxc);
            const int shade = static_cast<int>(255 - frac * 170);
            char color[8];
            std::snprintf(color, sizeof(color), "#%02x%02xff", shade, shade);
            svg.rect(left + a * cell, top + p * cell, cell, cell, color, "#444444");
            svg.text(left + a * cell + cell / 2, top + p * cell + cell / 2 + 4,
                     std::to_string(r.matrix.at(p, a)), 12, "middle");
        }
    }
    svg.text(left, top + n * cell + 28,
             "accuracy " + fmt_double(r.accuracy) + ", missed truths " +
                 std::to_string(r.missed_truths),
             12);
    return svg.finish();
}

std::string roc_svg(const metrics::EvalReport& r, const detector::ClassSet& classes) {
    const double size = 300, left = 60, top = 40;
    SvgWriter svg(static_cast<int>(left + size + 220), static_cast<int>(top + size + 60));
    svg.text(left, 24, "ROC curves (TPR vs FPR)", 14);
    svg.rect(left, top, size, size, "none", "#444444");
    svg.line(left, top + size, left + size, top, "#bbbbbb");
    svg.text(left + size / 2, top + size + 34, "FPR", 12, "middle");
    svg.text(left - 40, top + size / 2, "TPR", 12, "middle");
    for (int c = 0; c < static_cast<int>(r.roc.size()); ++c) {
        const auto& cr = r.roc[c];
        const std::string color = kPalette[c % 8];
        std::string label = classes.names[c];
        if (cr.degenerate) {
            label += " (degenerate)";
        } else {
            std::vector<std::pair<double, double>> pts;
            for (const auto& [fpr, tpr] : cr.curve.points)
                pts.emplace_back(left + fpr * size, top + size - tpr * size);
            svg.polyline(pts, color);
            label += " AUC " + fmt_double(cr.auc);
        }
        svg.line(left + size + 16, top + 16 + c * 18 - 4, left + size + 34,
                 top + 16 + c * 18 - 4, color, 2.0);
        svg.text(left + size + 40, top + 16 + c * 18, label, 11);
    }
    return svg.finish();
}

std::string bar_chart_svg(const std::string& title,
                          const std::vector<std::pair<std::string, double>>& bars) {
    const double bw = 64, gap = 28, left = 60, top = 50, plot_h = 220;
    SvgWriter svg(static_cast<int>(left + bars.size() * (bw + gap) + 40),
                  static_cast<int>(top + plot_h + 70));
    svg.text(left, 24, title, 14);
    svg.line(left - 8, top + plot_h, left + bars.size() * (bw + gap) + 8, top + plot_h,
             "#444444");
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double h = std::max(0.0, std::min(1.0, bars[i].second)) * plot_h;
        const double x = left + i * (bw + gap);
        svg.rect(x, top + plot_h - h, bw, h, kPalette[i % 8]);
        svg.text(x + bw / 2, top + plot_h - h - 6, fmt_double(bars[i].second), 11, "middle");
        svg.text(x + bw / 2, top + plot_h + 16, bars[i].first, 10, "middle");
    }
    return svg.finish();
}

}  // namespace

std::string fmt_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

double mean_auc(const metrics::EvalReport& report) {
    double sum = 0.0;
    int n = 0;
    for (const auto& cr : report.roc) {
        if (cr.degenerate) continue;
        sum += cr.auc;
        ++n;
    }
    return n > 0 ? sum / n : 0.0;
}

void write_eval_artifacts(const fs::path& dir, const metrics::EvalReport& r,
                          const detector::ClassSet& classes) {
    fs::create_directories(dir);

    json rep;
    rep["accuracy"] = r.accuracy;
    rep["macro_f1"] = r.macro_f1;
    rep["missed_truths"] = r.missed_truths;
    rep["confusion"]["rows_are"] = "predicted";
    rep["confusion"]["n_classes"] = r.matrix.n_classes;
    {
        json rows = json::array();
        for (int p = 0; p < r.matrix.n_classes; ++p) {
            json row = json::array();
            for (int a = 0; a < r.matrix.n_classes; ++a) row.push_back(r.matrix.at(p, a));
            rows.push_back(row);
        }
        rep["confusion"]["counts"] = rows;
    }
    rep["per_class"] = json::array();
    for (int c = 0; c < classes.count(); ++c) {
        rep["per_class"].push_back({{"name", classes.names[c]},
                                    {"precision", r.per_class[c].precision},
                                    {"recall", r.per_class[c].recall},
                                    {"f1", r.per_class[c].f1}});
    }
    rep["roc"] = json::array();
    for (int c = 0; c < classes.count(); ++c) {
        const auto& cr = r.roc[c];
        json jr;
        jr["name"] = classes.names[c];
        jr["degenerate"] = cr.degenerate;
        if (cr.degenerate) {
            jr["auc"] = nullptr;
        } else {
            jr["auc"] = cr.auc;
            json pts = json::array();
            for (const auto& [fpr, tpr] : cr.curve.points) pts.push_back({fpr, tpr});
            jr["points"] = pts;
            jr["thresholds"] = cr.curve.thresholds;
        }
        rep["roc"].push_back(jr);
    }
    write_file(dir / "report.json", rep.dump(2) + "\n");

    write_file(dir / "confusion.csv", confusion_csv(r, classes));
    for (int c = 0; c < classes.count(); ++c) {
        std::string csv = "fpr,tpr\n";
        if (!r.roc[c].degenerate)
            for (const auto& [fpr, tpr] : r.roc[c].curve.points)
                csv += fmt_double(fpr) + "," + fmt_double(tpr) + "\n";
        write_file(dir / ("roc_" + classes.names[c] + ".csv"), csv);
    }

    write_file(dir / "confusion.svg", confusion_svg(r, classes));
    write_file(dir / "roc.svg", roc_svg(r, classes));
    std::vector<std::pair<std::string, double>> f1_bars;
    for (int c = 0; c < classes.count(); ++c)
        f1_bars.emplace_back(classes.names[c], r.per_class[c].f1);
    write_file(dir / "f1.svg", bar_chart_svg("Per-class F1", f1_bars));
    write_file(dir / "accuracy.svg",
               bar_chart_svg("Accuracy", {{"accuracy", r.accuracy}}));
}

}  // namespace qrn::cli
