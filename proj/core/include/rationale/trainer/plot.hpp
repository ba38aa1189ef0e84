// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace rationale::trainer {

struct PlotSeries {
  std::string name;
  std::vector<double> values;  // one per epoch, epoch 1 first
};

/// Self-contained SVG line chart with epochs on the x axis and a [0, 1] y axis.
std::string render_curve_svg(const std::string& title, const std::vector<PlotSeries>& series);

}  // namespace rationale::trainer
