// SPDX-License-Identifier: Apache-2.0
#pragma once
// Output directory of one command. Files are written through the RunDir so
// the closing manifest can list each with its SHA-256. The manifest carries
// no timestamps or absolute output paths, so identical runs produce
// identical manifests.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace segalign {

std::string sha256_hex(std::string_view bytes);
std::string file_sha256(const std::filesystem::path& path);

/// Raised when an output directory holds files and --force was not given.
class OutputExists : public std::runtime_error {
 public:
  explicit OutputExists(const std::string& what) : std::runtime_error(what) {}
};

class RunDir {
 public:
  /// Creates `root`; an existing non-empty directory is cleared with `force`
  /// and refused otherwise.
  RunDir(std::filesystem::path root, bool force);

  const std::filesystem::path& root() const noexcept { return root_; }
  std::filesystem::path path(std::string_view rel) const { return root_ / rel; }

  void write_text(std::string_view rel, std::string_view text);
  /// Pretty-printed with a trailing newline.
  void write_json(std::string_view rel, const nlohmann::json& doc);
  /// Records a file (or every file under a directory) written by other code.
  void add(std::string_view rel);

  /// Writes config.resolved.json and manifest.json.
  void finish(std::string_view command, const std::vector<std::string>& inputs,
              const nlohmann::json& resolved_config, std::uint64_t seed);

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

/// Refuses or clears like RunDir without taking ownership (worker trials).
void prepare_output_dir(const std::filesystem::path& root, bool force);

}  // namespace segalign
