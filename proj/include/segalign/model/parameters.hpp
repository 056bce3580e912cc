// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "segalign/model/config.hpp"
#include "segalign/numerics/matrix.hpp"
#include "segalign/numerics/rng.hpp"

namespace segalign {

struct EncoderLayerParams {
  Matrix wq, wk, wv, wo;  // d×d, no bias
  Matrix ln1_gain, ln1_bias;  // 1×d
  Matrix ff1_w, ff1_b;  // d×d_ff, 1×d_ff
  Matrix ff2_w, ff2_b;  // d_ff×d, 1×d
  Matrix ln2_gain, ln2_bias;  // 1×d

  friend bool operator==(const EncoderLayerParams&, const EncoderLayerParams&) = default;
};

/// Linear classifier head. Weight rows are class-major (n_classes × d).
struct ClassifierHeadParams {
  Matrix weight;
  Matrix bias;  // 1 × n_classes

  friend bool operator==(const ClassifierHeadParams&, const ClassifierHeadParams&) = default;
};

/// All trainable tensors of one encoder model. Gradients and optimizer
/// moments reuse this layout.
struct ParameterStore {
  ModelConfig config;
  Matrix token_embedding;  // vocab × d
  Matrix position_embedding;  // max_seq_len × d
  std::vector<EncoderLayerParams> layers;
  std::vector<ClassifierHeadParams> heads;

  std::size_t parameter_count() const noexcept;

  /// Visits every tensor in a fixed order with a stable dotted name.
  template <typename Fn>
  void for_each_tensor(Fn&& fn);
  template <typename Fn>
  void for_each_tensor(Fn&& fn) const;

  friend bool operator==(const ParameterStore&, const ParameterStore&) = default;
};

/// Uniform(±sqrt(6/(fan_in+fan_out))) weights, zero biases, unit LN gains.
ParameterStore init_model(const ModelConfig& config, Rng rng);
/// Same shapes as `like`, every entry zero.
ParameterStore zeros_like(const ParameterStore& like);

/// Total parameters implied by a configuration.
std::size_t parameter_count(const ModelConfig& config);

/// a += scale * b over every tensor.
void axpy(ParameterStore& a, double scale, const ParameterStore& b);
double squared_norm(const ParameterStore& p);

// ---------------------------------------------------------------------------

namespace detail {
template <typename Store, typename Fn>
void visit_tensors(Store& s, Fn&& fn) {
  fn(std::string("embedding.token"), s.token_embedding);
  fn(std::string("embedding.position"), s.position_embedding);
  for (std::size_t l = 0; l < s.layers.size(); ++l) {
    auto& L = s.layers[l];
    const std::string p = "layer" + std::to_string(l + 1) + ".";
    fn(p + "wq", L.wq);
    fn(p + "wk", L.wk);
    fn(p + "wv", L.wv);
    fn(p + "wo", L.wo);
    fn(p + "ln1_gain", L.ln1_gain);
    fn(p + "ln1_bias", L.ln1_bias);
    fn(p + "ff1_w", L.ff1_w);
    fn(p + "ff1_b", L.ff1_b);
    fn(p + "ff2_w", L.ff2_w);
    fn(p + "ff2_b", L.ff2_b);
    fn(p + "ln2_gain", L.ln2_gain);
    fn(p + "ln2_bias", L.ln2_bias);
  }
  for (std::size_t h = 0; h < s.heads.size(); ++h) {
    const std::string p = "head" + std::to_string(h) + ".";
    fn(p + "weight", s.heads[h].weight);
    fn(p + "bias", s.heads[h].bias);
  }
}
}  // namespace detail

template <typename Fn>
void ParameterStore::for_each_tensor(Fn&& fn) {
  detail::visit_tensors(*this, fn);
}
template <typename Fn>
void ParameterStore::for_each_tensor(Fn&& fn) const {
  detail::visit_tensors(*this, fn);
}

}  // namespace segalign
