// SPDX-License-Identifier: Apache-2.0
#pragma once

// CSV/JSON renderings consumed by external box-plot tooling. Every CSV row
// for a box carries: min, q1, median, q3, max, then the raw values.

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "segalign/analysis/alignment.hpp"
#include "segalign/analysis/cka.hpp"

namespace segalign {

/// Fixed-precision rendering shared by every exported number.
std::string format_real(double v);

std::string cka_csv(const CkaReport& report);
nlohmann::json cka_json(const CkaReport& report);

struct EpochAlignment {
  std::size_t epoch = 0;
  AlignmentReport report;
};

/// One row per epoch: epoch, apag, cosine.
std::string apag_epochs_csv(const std::vector<EpochAlignment>& epochs);
/// One box row over the per-layer aligned proportions, raw values labeled
/// layer_0 (embedding) through layer_N+1 (classifier).
std::string layer_proportions_csv(const AlignmentReport& report);
nlohmann::json alignment_json(const std::vector<EpochAlignment>& epochs);

}  // namespace segalign
