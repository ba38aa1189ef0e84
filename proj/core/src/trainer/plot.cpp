// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/trainer/plot.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <sstream>

namespace rationale::trainer {
namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 180, kTop = 40, kBottom = 50;
constexpr std::array<const char*, 6> kColors{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string render_curve_svg(const std::string& title, const std::vector<PlotSeries>& series) {
  std::size_t epochs = 1;
  for (const auto& s : series) epochs = std::max(epochs, s.values.size());
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto x_at = [&](std::size_t i) {
    return epochs == 1 ? kLeft + plot_w / 2 : kLeft + plot_w * static_cast<double>(i) / static_cast<double>(epochs - 1);
  };
  auto y_at = [&](double v) { return kTop + plot_h * (1.0 - std::clamp(v, 0.0, 1.0)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << kLeft << "\" y=\"24\" font-size=\"15\">" << escape(title) << "</text>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    svg << "<line x1=\"" << kLeft << "\" x2=\"" << kLeft + plot_w << "\" y1=\"" << num(y_at(v)) << "\" y2=\""
        << num(y_at(v)) << "\" stroke=\"#ddd\"/>\n";
    svg << "<text x=\"" << kLeft - 8 << "\" y=\"" << num(y_at(v) + 4) << "\" text-anchor=\"end\">" << num(v)
        << "</text>\n";
  }
  for (std::size_t i = 0; i < epochs; ++i) {
    svg << "<text x=\"" << num(x_at(i)) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << i + 1
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\">epoch</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333\"/>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto* color = kColors[k % kColors.size()];
    const auto& s = series[k];
    svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.values.size(); ++i) svg << num(x_at(i)) << ',' << num(y_at(s.values[i])) << ' ';
    svg << "\"/>\n";
    for (std::size_t i = 0; i < s.values.size(); ++i) {
      svg << "<circle cx=\"" << num(x_at(i)) << "\" cy=\"" << num(y_at(s.values[i])) << "\" r=\"3\" fill=\"" << color
          << "\"/>\n";
    }
    const double ly = kTop + 10 + 20 * static_cast<double>(k);
    svg << "<line x1=\"" << kWidth - kRight + 15 << "\" x2=\"" << kWidth - kRight + 35 << "\" y1=\"" << ly
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << kWidth - kRight + 40 << "\" y=\"" << ly + 4 << "\">" << escape(s.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace rationale::trainer
