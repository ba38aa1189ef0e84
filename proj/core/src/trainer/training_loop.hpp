// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace rationale::trainer::detail {

struct EncodedExample {
  std::vector<std::int32_t> ids;
  int label = 0;
};

/// One pass over `examples` in a freshly shuffled order. `accumulate` adds one
/// example's gradient and returns its loss; `apply` takes an optimizer step
/// with the gradient scaled by 1/batch. Returns the mean example loss.
template <typename Accumulate, typename Apply>
double run_epoch(const std::vector<EncodedExample>& examples, std::mt19937_64& rng, int batch_size,
                 Accumulate&& accumulate, Apply&& apply) {
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  double total = 0.0;
  for (std::size_t start = 0; start < order.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t end = std::min(order.size(), start + static_cast<std::size_t>(batch_size));
    for (std::size_t i = start; i < end; ++i) total += accumulate(examples[order[i]]);
    apply(1.0f / static_cast<float>(end - start));
  }
  return examples.empty() ? 0.0 : total / static_cast<double>(examples.size());
}

}  // namespace rationale::trainer::detail
