// SPDX-License-Identifier: Apache-2.0
#include "segalign/model/encoder.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

const double* at(const Matrix& m, std::size_t r, std::size_t c) { return m.row(r).data() + c; }
double* at(Matrix& m, std::size_t r, std::size_t c) { return m.row(r).data() + c; }

double normal_cdf(double x) { return 0.5 * (1.0 + std::erf(x * kInvSqrt2)); }

// d/dx x·Φ(x) given the cached Φ(x).
double gelu_grad(double x, double cdf) {
  const double pdf = std::exp(-0.5 * x * x) * 0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2;
  return cdf + x * pdf;
}

void add_row_bias(Matrix& m, const Matrix& bias) {
  auto b = bias.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += b[c];
  }
}

void accumulate_col_sums(const Matrix& m, Matrix& into) {
  auto dst = into.values();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) dst[c] += row[c];
  }
}

Matrix layer_norm_forward(const Matrix& x, const Matrix& gain, const Matrix& bias, double eps,
                          LayerNormCache& cache) {
  const std::size_t n = x.cols();
  cache.normalized = Matrix(x.rows(), n);
  cache.inv_std.assign(x.rows(), 0.0);
  Matrix y(x.rows(), n);
  auto g = gain.values();
  auto b = bias.values();
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto in = x.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= static_cast<double>(n);
    const double inv = 1.0 / std::sqrt(var + eps);
    cache.inv_std[r] = inv;
    auto xh = cache.normalized.row(r);
    auto out = y.row(r);
    for (std::size_t c = 0; c < n; ++c) {
      xh[c] = (in[c] - mean) * inv;
      out[c] = g[c] * xh[c] + b[c];
    }
  }
  return y;
}

// Returns dx; accumulates dgain / dbias.
Matrix layer_norm_backward(const Matrix& dy, const Matrix& gain, const LayerNormCache& cache,
                           Matrix& dgain, Matrix& dbias) {
  const std::size_t n = dy.cols();
  Matrix dx(dy.rows(), n);
  auto g = gain.values();
  auto dg = dgain.values();
  auto db = dbias.values();
  std::vector<double> dxh(n);
  for (std::size_t r = 0; r < dy.rows(); ++r) {
    auto d = dy.row(r);
    auto xh = cache.normalized.row(r);
    double mean_dxh = 0.0, mean_dxh_xh = 0.0;
    for (std::size_t c = 0; c < n; ++c) {
      dg[c] += d[c] * xh[c];
      db[c] += d[c];
      dxh[c] = d[c] * g[c];
      mean_dxh += dxh[c];
      mean_dxh_xh += dxh[c] * xh[c];
    }
    mean_dxh /= static_cast<double>(n);
    mean_dxh_xh /= static_cast<double>(n);
    auto out = dx.row(r);
    for (std::size_t c = 0; c < n; ++c) {
      out[c] = cache.inv_std[r] * (dxh[c] - mean_dxh - xh[c] * mean_dxh_xh);
    }
  }
  return dx;
}

// Mean over the packed rows of each example.
Matrix masked_mean(const Matrix& x, const ForwardCache& cache) {
  const std::size_t n = cache.example_offset.size() - 1;
  Matrix out(n, x.cols());
  for (std::size_t b = 0; b < n; ++b) {
    auto o = out.row(b);
    const std::size_t begin = cache.example_offset[b], end = cache.example_offset[b + 1];
    for (std::size_t r = begin; r < end; ++r) {
      auto in = x.row(r);
      for (std::size_t c = 0; c < o.size(); ++c) o[c] += in[c];
    }
    if (end > begin) {
      for (double& v : o) v /= static_cast<double>(end - begin);
    }
  }
  return out;
}

// Rows [row0, row0+rows) and columns [col0, col0+cols) as a dense matrix.
Matrix slice(const Matrix& m, std::size_t row0, std::size_t rows, std::size_t col0,
             std::size_t cols) {
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const double* src = at(m, row0 + r, col0);
    std::copy(src, src + cols, out.row(r).begin());
  }
  return out;
}

void add_slice(Matrix& m, std::size_t row0, std::size_t col0, const Matrix& part) {
  for (std::size_t r = 0; r < part.rows(); ++r) {
    double* dst = at(m, row0 + r, col0);
    auto src = part.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
  }
}

// Each example attends over its own real tokens only; padded keys would get
// exactly zero weight, so leaving them out changes nothing.
void attention_forward(const ModelConfig& cfg, const ForwardCache& cache, LayerCache& L) {
  const std::size_t dk = cfg.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const std::size_t examples = cache.example_offset.size() - 1;
  L.context = Matrix(L.q.rows(), cfg.d_model);
  L.attention.assign(examples * cfg.n_heads, Matrix());
  for (std::size_t b = 0; b < examples; ++b) {
    const std::size_t base = cache.example_offset[b];
    const std::size_t T = cache.example_offset[b + 1] - base;
    if (T == 0) continue;
    for (std::size_t h = 0; h < cfg.n_heads; ++h) {
      const std::size_t c0 = h * dk;
      Matrix scores = matmul_nt(slice(L.q, base, T, c0, dk), slice(L.k, base, T, c0, dk));
      scores *= scale;
      Matrix probs = row_softmax(scores);
      add_slice(L.context, base, c0, matmul(probs, slice(L.v, base, T, c0, dk)));
      L.attention[b * cfg.n_heads + h] = std::move(probs);
    }
  }
}

// Given d(context), produce dq, dk, dv.
void attention_backward(const ModelConfig& cfg, const ForwardCache& cache, const LayerCache& L,
                        const Matrix& dctx, Matrix& dq, Matrix& dkm, Matrix& dv) {
  const std::size_t dk = cfg.head_dim();
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  const std::size_t examples = cache.example_offset.size() - 1;
  dq = Matrix(L.q.rows(), cfg.d_model);
  dkm = Matrix(L.k.rows(), cfg.d_model);
  dv = Matrix(L.v.rows(), cfg.d_model);
  for (std::size_t b = 0; b < examples; ++b) {
    const std::size_t base = cache.example_offset[b];
    const std::size_t T = cache.example_offset[b + 1] - base;
    if (T == 0) continue;
    for (std::size_t h = 0; h < cfg.n_heads; ++h) {
      const std::size_t c0 = h * dk;
      const Matrix& A = L.attention[b * cfg.n_heads + h];
      const Matrix g = slice(dctx, base, T, c0, dk);
      // dA = dctx V^T ; dV = A^T dctx
      Matrix dscores = matmul_nt(g, slice(L.v, base, T, c0, dk));
      add_slice(dv, base, c0, matmul_tn(A, g));
      // softmax backward, then scores -> q, k
      for (std::size_t i = 0; i < T; ++i) {
        auto d = dscores.row(i);
        auto a = A.row(i);
        double dot = 0.0;
        for (std::size_t j = 0; j < T; ++j) dot += d[j] * a[j];
        for (std::size_t j = 0; j < T; ++j) d[j] = a[j] * (d[j] - dot) * scale;
      }
      add_slice(dq, base, c0, matmul(dscores, slice(L.k, base, T, c0, dk)));
      add_slice(dkm, base, c0, matmul_tn(dscores, slice(L.q, base, T, c0, dk)));
    }
  }
}

}  // namespace

Batch Batch::from_sequences(std::span<const std::vector<int>> rows, std::size_t max_seq_len) {
  Batch batch;
  batch.batch_size = rows.size();
  std::size_t longest = 1;
  for (const auto& r : rows) longest = std::max(longest, r.size());
  batch.seq_len = std::min(longest, max_seq_len);
  batch.tokens.assign(batch.batch_size * batch.seq_len, special_tokens::kPad);
  batch.mask.assign(batch.batch_size * batch.seq_len, 0);
  for (std::size_t b = 0; b < rows.size(); ++b) {
    const std::size_t n = std::min(rows[b].size(), batch.seq_len);
    for (std::size_t t = 0; t < n; ++t) {
      const int id = rows[b][t];
      batch.tokens[b * batch.seq_len + t] = id;
      batch.mask[b * batch.seq_len + t] = id != special_tokens::kPad ? 1 : 0;
    }
  }
  return batch;
}

std::size_t Batch::length(std::size_t b) const {
  std::size_t n = 0;
  for (std::size_t t = 0; t < seq_len; ++t) n += mask[b * seq_len + t];
  return n;
}

std::size_t argmax_lowest(std::span<const double> values) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

ForwardOutput forward(const ParameterStore& params, const Batch& batch, bool train_mode,
                      Rng& rng, bool capture) {
  const ModelConfig& cfg = params.config;
  const std::size_t T = batch.seq_len;
  const std::size_t rows = batch.batch_size * T;
  if (T > cfg.max_seq_len) {
    throw InvalidInput("forward: batch length " + std::to_string(T) + " exceeds max_seq_len");
  }
  if (batch.tokens.size() != rows || batch.mask.size() != rows) {
    throw InvalidInput("forward: malformed batch");
  }
  const bool sequence = cfg.head_mode == HeadMode::SequenceClassifier;

  ForwardOutput out;
  ForwardCache& cache = out.cache;
  cache.batch = batch;
  cache.example_offset.assign(1, 0);
  for (std::size_t b = 0; b < batch.batch_size; ++b) {
    if (sequence && !batch.mask[b * T]) {
      throw InvalidInput("forward: example " + std::to_string(b) + " starts with padding");
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (batch.mask[b * T + t]) cache.token_rows.push_back(b * T + t);
    }
    cache.example_offset.push_back(cache.token_rows.size());
  }

  Matrix x(cache.token_rows.size(), cfg.d_model);
  for (std::size_t i = 0; i < cache.token_rows.size(); ++i) {
    const std::size_t r = cache.token_rows[i];
    const int id = batch.tokens[r];
    if (id < 0 || static_cast<std::size_t>(id) >= cfg.vocab_size) {
      throw InvalidInput("forward: token id " + std::to_string(id) + " outside vocabulary");
    }
    auto dst = x.row(i);
    auto te = params.token_embedding.row(static_cast<std::size_t>(id));
    auto pe = params.position_embedding.row(r % T);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = te[c] + pe[c];
  }

  if (capture) out.activations.emplace();

  cache.layers.resize(cfg.n_layers);
  for (std::size_t l = 0; l < cfg.n_layers; ++l) {
    const EncoderLayerParams& P = params.layers[l];
    LayerCache& L = cache.layers[l];
    L.input = std::move(x);
    L.q = matmul(L.input, P.wq);
    L.k = matmul(L.input, P.wk);
    L.v = matmul(L.input, P.wv);
    attention_forward(cfg, cache, L);
    Matrix sum1 = matmul(L.context, P.wo);
    sum1 += L.input;
    L.h1 = layer_norm_forward(sum1, P.ln1_gain, P.ln1_bias, cfg.layer_norm_eps, L.ln1);

    L.ff_pre = matmul(L.h1, P.ff1_w);
    add_row_bias(L.ff_pre, P.ff1_b);
    L.ff_cdf = Matrix(L.ff_pre.rows(), L.ff_pre.cols());
    L.ff_act = Matrix(L.ff_pre.rows(), L.ff_pre.cols());
    {
      auto pre = L.ff_pre.values();
      auto cdf = L.ff_cdf.values();
      auto act = L.ff_act.values();
      for (std::size_t i = 0; i < pre.size(); ++i) {
        cdf[i] = normal_cdf(pre[i]);
        act[i] = pre[i] * cdf[i];
      }
    }
    L.ff_out = matmul(L.ff_act, P.ff2_w);
    add_row_bias(L.ff_out, P.ff2_b);
    Matrix sum2 = L.h1 + L.ff_out;
    L.output = layer_norm_forward(sum2, P.ln2_gain, P.ln2_bias, cfg.layer_norm_eps, L.ln2);

    if (capture) {
      out.activations->layers.push_back({{kProbePostAttention, masked_mean(L.h1, cache)},
                                         {kProbePostFfn, masked_mean(L.ff_out, cache)},
                                         {kProbeLayerOutput, masked_mean(L.output, cache)}});
    }
    x = L.output;
  }

  // First real position of each example, all-zero for an empty example.
  Matrix pooled(batch.batch_size, cfg.d_model);
  for (std::size_t b = 0; b < batch.batch_size; ++b) {
    if (cache.example_offset[b] == cache.example_offset[b + 1]) continue;
    auto src = x.row(cache.example_offset[b]);
    std::copy(src.begin(), src.end(), pooled.row(b).begin());
  }
  if (sequence) {
    cache.features = pooled;
  } else {
    cache.features = Matrix(rows, cfg.d_model);
    for (std::size_t i = 0; i < cache.token_rows.size(); ++i) {
      auto src = x.row(i);
      std::copy(src.begin(), src.end(), cache.features.row(cache.token_rows[i]).begin());
    }
  }
  if (capture) out.activations->pooled = std::move(pooled);

  cache.dropped = cache.features;
  if (train_mode && cfg.dropout_p > 0.0) {
    const double keep_scale = 1.0 / (1.0 - cfg.dropout_p);
    cache.dropout_mask = Matrix(cache.features.rows(), cache.features.cols());
    auto mask = cache.dropout_mask.values();
    auto vals = cache.dropped.values();
    for (std::size_t i = 0; i < mask.size(); ++i) {
      mask[i] = rng.bernoulli(cfg.dropout_p) ? 0.0 : keep_scale;
      vals[i] *= mask[i];
    }
  }

  for (const auto& head : params.heads) {
    Matrix logits = matmul_nt(cache.dropped, head.weight);
    add_row_bias(logits, head.bias);
    out.logits.push_back(std::move(logits));
  }
  return out;
}

ParameterStore backward(const ParameterStore& params, const ForwardCache& cache,
                        std::span<const Matrix> logit_grads) {
  const ModelConfig& cfg = params.config;
  const Batch& batch = cache.batch;
  const std::size_t T = batch.seq_len;
  if (logit_grads.size() != params.heads.size()) {
    throw InvalidInput("backward: expected " + std::to_string(params.heads.size()) +
                       " logit gradient blocks");
  }

  ParameterStore grads = zeros_like(params);

  Matrix d_dropped(cache.dropped.rows(), cache.dropped.cols());
  for (std::size_t t = 0; t < params.heads.size(); ++t) {
    const Matrix& dl = logit_grads[t];
    const auto& head = params.heads[t];
    if (dl.rows() != cache.dropped.rows() || dl.cols() != head.weight.rows()) {
      throw InvalidInput("backward: logit gradient block " + std::to_string(t) +
                         " has the wrong shape");
    }
    grads.heads[t].weight += matmul_tn(dl, cache.dropped);
    accumulate_col_sums(dl, grads.heads[t].bias);
    d_dropped += matmul(dl, head.weight);
  }
  if (!cache.dropout_mask.empty()) {
    auto m = cache.dropout_mask.values();
    auto d = d_dropped.values();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] *= m[i];
  }

  // Padded features are constants, so their gradient is dropped here.
  Matrix dx(cache.token_rows.size(), cfg.d_model);
  if (cfg.head_mode == HeadMode::SequenceClassifier) {
    for (std::size_t b = 0; b < batch.batch_size; ++b) {
      auto src = d_dropped.row(b);
      std::copy(src.begin(), src.end(), dx.row(cache.example_offset[b]).begin());
    }
  } else {
    for (std::size_t i = 0; i < cache.token_rows.size(); ++i) {
      auto src = d_dropped.row(cache.token_rows[i]);
      std::copy(src.begin(), src.end(), dx.row(i).begin());
    }
  }

  for (std::size_t li = cfg.n_layers; li-- > 0;) {
    const EncoderLayerParams& P = params.layers[li];
    const LayerCache& L = cache.layers[li];
    EncoderLayerParams& G = grads.layers[li];

    Matrix dsum2 = layer_norm_backward(dx, P.ln2_gain, L.ln2, G.ln2_gain, G.ln2_bias);
    // ff_out branch
    G.ff2_w += matmul_tn(L.ff_act, dsum2);
    accumulate_col_sums(dsum2, G.ff2_b);
    Matrix dpre = matmul_nt(dsum2, P.ff2_w);
    {
      auto d = dpre.values();
      auto pre = L.ff_pre.values();
      auto cdf = L.ff_cdf.values();
      for (std::size_t i = 0; i < d.size(); ++i) d[i] *= gelu_grad(pre[i], cdf[i]);
    }
    G.ff1_w += matmul_tn(L.h1, dpre);
    accumulate_col_sums(dpre, G.ff1_b);
    Matrix dh1 = matmul_nt(dpre, P.ff1_w);
    dh1 += dsum2;

    Matrix dsum1 = layer_norm_backward(dh1, P.ln1_gain, L.ln1, G.ln1_gain, G.ln1_bias);
    G.wo += matmul_tn(L.context, dsum1);
    Matrix dctx = matmul_nt(dsum1, P.wo);

    Matrix dq, dk, dv;
    attention_backward(cfg, cache, L, dctx, dq, dk, dv);
    G.wq += matmul_tn(L.input, dq);
    G.wk += matmul_tn(L.input, dk);
    G.wv += matmul_tn(L.input, dv);

    Matrix dinput = std::move(dsum1);
    dinput += matmul_nt(dq, P.wq);
    dinput += matmul_nt(dk, P.wk);
    dinput += matmul_nt(dv, P.wv);
    dx = std::move(dinput);
  }

  for (std::size_t i = 0; i < cache.token_rows.size(); ++i) {
    const std::size_t r = cache.token_rows[i];
    auto d = dx.row(i);
    auto te = grads.token_embedding.row(static_cast<std::size_t>(batch.tokens[r]));
    auto pe = grads.position_embedding.row(r % T);
    for (std::size_t c = 0; c < d.size(); ++c) {
      te[c] += d[c];
      pe[c] += d[c];
    }
  }
  return grads;
}

std::vector<std::vector<std::size_t>> predict(const ParameterStore& params, const Batch& batch) {
  Rng unused(0);
  ForwardOutput out = forward(params, batch, /*train_mode=*/false, unused);
  std::vector<std::vector<std::size_t>> classes;
  for (const Matrix& block : out.logits) {
    std::vector<std::size_t> per_row(block.rows());
    for (std::size_t r = 0; r < block.rows(); ++r) per_row[r] = argmax_lowest(block.row(r));
    classes.push_back(std::move(per_row));
  }
  return classes;
}

}  // namespace segalign
