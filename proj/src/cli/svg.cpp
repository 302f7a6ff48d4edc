// SPDX-License-Identifier: Apache-2.0
#include "qrn/cli/svg.hpp"

#include <cstdio>

namespace qrn::cli {

namespace {

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

SvgWriter::SvgWriter(int width, int height) : width_(width), height_(height) {}

void SvgWriter::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke, double stroke_width) {
    body_ += "  <rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" + num(w) +
             "\" height=\"" + num(h) + "\" fill=\"" + fill + "\"";
    if (!stroke.empty())
        body_ += " stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_width) + "\"";
    body_ += "/>\n";
}

void SvgWriter::line(double x1, double y1, double x2, double y2, const std::string& stroke,
                     double width) {
    body_ += "  <line x1=\"" + num(x1) + "\" y1=\"" + num(y1) + "\" x2=\"" + num(x2) +
             "\" y2=\"" + num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(width) + "\"/>\n";
}

void SvgWriter::polyline(const std::vector<std::pair<double, double>>& points,
                         const std::string& stroke, double width) {
    body_ += "  <polyline fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" +
             num(width) + "\" points=\"";
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (i) body_ += " ";
        body_ += num(points[i].first) + "," + num(points[i].second);
    }
    body_ += "\"/>\n";
}

void SvgWriter::text(double x, double y, const std::string& s, int size,
                     const std::string& anchor, const std::string& fill) {
    body_ += "  <text x=\"" + num(x) + "\" y=\"" + num(y) + "\" font-size=\"" +
             std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
             "\" fill=\"" + fill + "\">" + xml_escape(s) + "</text>\n";
}

std::string SvgWriter::finish() const {
    return "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
           std::to_string(width_) + "\" height=\"" + std::to_string(height_) +
           "\" viewBox=\"0 0 " + std::to_string(width_) + " " + std::to_string(height_) +
           "\">\n" + body_ + "</svg>\n";
}

}  // namespace qrn::cli
