// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

namespace qrn::cli {

/// Minimal SVG emitter for the diagnostic report figures.
class SvgWriter {
  public:
    SvgWriter(int width, int height);

    void rect(double x, double y, double w, double h, const std::string& fill,
              const std::string& stroke = "", double stroke_width = 1.0);
    void line(double x1, double y1, double x2, double y2, const std::string& stroke,
              double width = 1.0);
    void polyline(const std::vector<std::pair<double, double>>& points,
                  const std::string& stroke, double width = 1.5);
    void text(double x, double y, const std::string& s, int size = 12,
              const std::string& anchor = "start", const std::string& fill = "#000000");

    std::string finish() const;

  private:
    std::string body_;
    int width_;
    int height_;
};

std::string xml_escape(const std::string& s);

}  // namespace qrn::cli
