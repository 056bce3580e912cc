// SPDX-License-Identifier: Apache-2.0
#include "segalign/cli/run_dir.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <iterator>

#include <openssl/evp.h>

namespace segalign {

namespace fs = std::filesystem;

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string file_sha256(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

void prepare_output_dir(const fs::path& root, bool force) {
  if (fs::exists(root)) {
    if (!fs::is_directory(root)) throw OutputExists(root.string() + " exists and is not a directory");
    if (!fs::is_empty(root)) {
      if (!force) {
        throw OutputExists("output directory " + root.string() +
                           " is not empty; pass --force to overwrite");
      }
      for (const auto& entry : fs::directory_iterator(root)) fs::remove_all(entry.path());
    }
  }
  fs::create_directories(root);
}

RunDir::RunDir(fs::path root, bool force) : root_(std::move(root)) {
  prepare_output_dir(root_, force);
}

void RunDir::write_text(std::string_view rel, std::string_view text) {
  const fs::path p = path(rel);
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
  add(rel);
}

void RunDir::write_json(std::string_view rel, const nlohmann::json& doc) {
  write_text(rel, doc.dump(2) + "\n");
}

void RunDir::add(std::string_view rel) {
  const fs::path p = path(rel);
  if (fs::is_directory(p)) {
    for (const auto& entry : fs::recursive_directory_iterator(p)) {
      if (entry.is_regular_file()) files_.push_back(fs::relative(entry.path(), root_).generic_string());
    }
  } else {
    files_.push_back(fs::path(rel).generic_string());
  }
}

void RunDir::finish(std::string_view command, const std::vector<std::string>& inputs,
                    const nlohmann::json& resolved_config, std::uint64_t seed) {
  write_json("config.resolved.json", resolved_config);
  std::sort(files_.begin(), files_.end());
  files_.erase(std::unique(files_.begin(), files_.end()), files_.end());
  nlohmann::json listed = nlohmann::json::array();
  for (const auto& f : files_) listed.push_back({{"path", f}, {"sha256", file_sha256(path(f))}});
  const nlohmann::json manifest = {
      {"format", "segalign-manifest/1"},
      {"command", std::string(command)},
      {"seed", seed},
      {"inputs", inputs},
      {"config_sha256", file_sha256(path("config.resolved.json"))},
      {"files", listed},
  };
  const fs::path p = path("manifest.json");
  std::ofstream out(p, std::ios::binary);
  out << manifest.dump(2) << '\n';
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace segalign
