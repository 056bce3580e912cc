// SPDX-License-Identifier: Apache-2.0
#include "segalign/model/checkpoint.hpp"

#include <fstream>
#include <stdexcept>

#include "segalign/numerics/errors.hpp"
#include "segalign/numerics/matrix_io.hpp"

namespace segalign {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kCheckpointFormat = "segalign-checkpoint/1";
constexpr const char* kGradientFormat = "segalign-gradients/1";

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return json::parse(in);
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

fs::path with_suffix(const fs::path& stem, const char* ext) {
  return fs::path(stem.string() + ext);
}

}  // namespace

void save_checkpoint(const fs::path& dir, const ParameterStore& params, const json& extra) {
  fs::create_directories(dir);
  json tensors = json::array();
  std::ofstream bin(dir / "tensors.bin", std::ios::binary | std::ios::trunc);
  if (!bin) throw std::runtime_error("cannot write " + (dir / "tensors.bin").string());
  std::size_t offset = 0;
  params.for_each_tensor([&](const std::string& name, const Matrix& m) {
    tensors.push_back({{"name", name}, {"rows", m.rows()}, {"cols", m.cols()}, {"offset", offset}});
    write_matrix(bin, m);
    offset += dump_size(m);
  });
  bin.close();
  write_json(dir / "manifest.json", {{"format", kCheckpointFormat},
                                      {"config", params.config},
                                      {"parameter_count", params.parameter_count()},
                                      {"tensors", tensors},
                                      {"extra", extra}});
}

LoadedCheckpoint load_checkpoint(const fs::path& dir) {
  const json manifest = read_json(dir / "manifest.json");
  if (manifest.value("format", "") != kCheckpointFormat) {
    throw InvalidInput(dir.string() + " is not a segalign checkpoint");
  }
  LoadedCheckpoint out;
  ModelConfig cfg = manifest.at("config").get<ModelConfig>();
  cfg.validate();
  // Shapes come from a fresh init; payloads overwrite them.
  out.params = zeros_like(init_model(cfg, Rng(0)));
  out.extra = manifest.value("extra", json::object());

  std::ifstream bin(dir / "tensors.bin", std::ios::binary);
  if (!bin) throw std::runtime_error("cannot open " + (dir / "tensors.bin").string());
  const auto& index = manifest.at("tensors");
  std::size_t i = 0;
  out.params.for_each_tensor([&](const std::string& name, Matrix& m) {
    if (i >= index.size() || index[i].at("name").get<std::string>() != name) {
      throw InvalidInput("checkpoint tensor index out of order at " + name);
    }
    Matrix loaded = read_matrix(bin);
    if (loaded.rows() != m.rows() || loaded.cols() != m.cols()) {
      throw InvalidInput("checkpoint tensor " + name + " has the wrong shape");
    }
    m = std::move(loaded);
    ++i;
  });
  return out;
}

void save_gradients(const fs::path& stem, const ModelConfig& config, const GradientSet& grads,
                    const json& meta) {
  if (!stem.parent_path().empty()) fs::create_directories(stem.parent_path());
  json groups = json::array();
  std::vector<double> flat;
  flat.reserve(grads.total_size());
  for (std::size_t g = 0; g < grads.size(); ++g) {
    const ParamGroup& pg = grads.groups()[g];
    groups.push_back({{"layer", pg.layer},
                      {"head", pg.head},
                      {"kind", std::string(to_string(pg.kind))},
                      {"offset", flat.size()},
                      {"length", pg.size}});
    flat.insert(flat.end(), grads.vectors()[g].begin(), grads.vectors()[g].end());
  }
  const std::size_t n = flat.size();
  save_matrix(with_suffix(stem, ".bin"), Matrix(1, n, std::move(flat)));
  write_json(with_suffix(stem, ".json"),
             {{"format", kGradientFormat}, {"config", config}, {"groups", groups}, {"meta", meta}});
}

GradientDump load_gradients(const fs::path& stem) {
  const json index = read_json(with_suffix(stem, ".json"));
  if (index.value("format", "") != kGradientFormat) {
    throw InvalidInput(stem.string() + ".json is not a gradient dump");
  }
  GradientDump out;
  out.config = index.at("config").get<ModelConfig>();
  out.meta = index.value("meta", json::object());
  const Matrix payload = load_matrix(with_suffix(stem, ".bin"));
  auto values = payload.values();
  std::vector<ParamGroup> groups;
  std::vector<std::vector<double>> vecs;
  for (const auto& g : index.at("groups")) {
    ParamGroup pg;
    pg.layer = g.at("layer").get<std::size_t>();
    pg.head = g.at("head").get<std::size_t>();
    pg.kind = group_kind_from_string(g.at("kind").get<std::string>());
    pg.size = g.at("length").get<std::size_t>();
    const auto off = g.at("offset").get<std::size_t>();
    if (off + pg.size > values.size()) throw InvalidInput("gradient dump payload too short");
    vecs.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(off),
                      values.begin() + static_cast<std::ptrdiff_t>(off + pg.size));
    groups.push_back(pg);
  }
  out.gradients = GradientSet(std::move(groups), std::move(vecs));
  return out;
}

}  // namespace segalign
