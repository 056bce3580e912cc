// SPDX-License-Identifier: Apache-2.0
#pragma once

// Checkpoint directory layout:
//   manifest.json  {format, config, tensors: [{name, rows, cols, offset}], extra}
//   tensors.bin    concatenated matrix dumps in manifest order
//
// Gradient dump layout (one pair of files per snapshot):
//   <stem>.json    {config, groups: [{layer, head, kind, offset, length}], meta}
//   <stem>.bin     one 1×total matrix dump holding every group back to back

#include <filesystem>

#include <nlohmann/json.hpp>

#include "segalign/model/param_groups.hpp"
#include "segalign/model/parameters.hpp"

namespace segalign {

void save_checkpoint(const std::filesystem::path& dir, const ParameterStore& params,
                     const nlohmann::json& extra = nlohmann::json::object());

struct LoadedCheckpoint {
  ParameterStore params;
  nlohmann::json extra;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);

struct GradientDump {
  ModelConfig config;
  GradientSet gradients;
  nlohmann::json meta;
};

void save_gradients(const std::filesystem::path& stem, const ModelConfig& config,
                    const GradientSet& grads, const nlohmann::json& meta = nlohmann::json::object());
GradientDump load_gradients(const std::filesystem::path& stem);

}  // namespace segalign
