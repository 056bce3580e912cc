// SPDX-License-Identifier: Apache-2.0
#pragma once

// Post-LN transformer encoder with learned positions.
//
//   x0      = E[tok] + P[pos]
//   h1      = LN1(x + MHA(x))        probe "post_attention"
//   f       = W2 gelu(W1 h1 + b1) + b2   probe "post_ffn"
//   x_next  = LN2(h1 + f)            probe "layer_output"
//
// Sequence mode pools the first ([CLS]) position, applies dropout and feeds
// every task head. Token mode applies dropout to each position and a
// binary tag head.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segalign/model/parameters.hpp"
#include "segalign/numerics/matrix.hpp"
#include "segalign/numerics/rng.hpp"

namespace segalign {

/// Token ids padded to a common length. Row b occupies rows
/// [b*seq_len, (b+1)*seq_len) of every per-token matrix.
struct Batch {
  std::size_t batch_size = 0;
  std::size_t seq_len = 0;
  std::vector<int> tokens;     // batch_size * seq_len
  std::vector<unsigned char> mask;  // 1 real token, 0 padding

  /// Pads to the longest row; rows longer than max_seq_len are truncated.
  static Batch from_sequences(std::span<const std::vector<int>> rows, std::size_t max_seq_len);
  std::size_t length(std::size_t b) const;
};

inline constexpr const char* kProbePostAttention = "post_attention";
inline constexpr const char* kProbePostFfn = "post_ffn";
inline constexpr const char* kProbeLayerOutput = "layer_output";

struct ActivationProbe {
  std::string label;
  Matrix activations;  // batch_size × d_model, masked mean over real tokens
};

struct ActivationStack {
  std::vector<std::vector<ActivationProbe>> layers;  // n_layers × 3
  Matrix pooled;  // classification-token rows, before dropout
};

struct LayerNormCache {
  Matrix normalized;  // x̂
  std::vector<double> inv_std;
};

/// Per-token matrices hold only the real (unmasked) tokens, packed example
/// by example; padded positions are never computed.
struct LayerCache {
  Matrix input;
  Matrix q, k, v;
  std::vector<Matrix> attention;  // per (example, head), length × length
  Matrix context;
  LayerNormCache ln1;
  Matrix h1;
  Matrix ff_pre;
  Matrix ff_cdf;  // Φ(ff_pre)
  Matrix ff_act;
  Matrix ff_out;
  LayerNormCache ln2;
  Matrix output;
};

/// Everything backward needs from one forward pass.
struct ForwardCache {
  Batch batch;
  std::vector<std::size_t> token_rows;      // batch row of each packed row
  std::vector<std::size_t> example_offset;  // batch_size + 1 packed offsets
  std::vector<LayerCache> layers;
  /// Classification-token rows (sequence mode) or every batch row (token
  /// mode, zero at padded positions), before dropout.
  Matrix features;
  Matrix dropout_mask;  // same shape, entries 0 or 1/(1-p); empty when inactive
  Matrix dropped;       // classifier input
};

struct ForwardOutput {
  /// One block per task: batch_size × n_classes (sequence mode) or
  /// (batch_size*seq_len) × 2 (token mode).
  std::vector<Matrix> logits;
  std::optional<ActivationStack> activations;
  ForwardCache cache;
};

/// Token ids must be < vocab_size. In sequence mode the first position of
/// every example must be a real token. Padded positions in token mode get
/// bias-only logits. Dropout draws from `rng` only when train_mode is set.
ForwardOutput forward(const ParameterStore& params, const Batch& batch, bool train_mode,
                      Rng& rng, bool capture = false);

/// Exact reverse-mode gradient of sum_t <logit_grads[t], logits[t]>.
ParameterStore backward(const ParameterStore& params, const ForwardCache& cache,
                        std::span<const Matrix> logit_grads);

/// Argmax per task block; ties go to the lowest class index.
std::vector<std::vector<std::size_t>> predict(const ParameterStore& params, const Batch& batch);

std::size_t argmax_lowest(std::span<const double> values) noexcept;

}  // namespace segalign
