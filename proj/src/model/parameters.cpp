// SPDX-License-Identifier: Apache-2.0
#include "segalign/model/parameters.hpp"

#include <cmath>

#include "segalign/numerics/errors.hpp"

namespace segalign {

namespace {

Matrix glorot(std::size_t rows, std::size_t cols, std::size_t fan_in, std::size_t fan_out,
              Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix m(rows, cols);
  for (double& v : m.values()) v = rng.uniform(-limit, limit);
  return m;
}

Matrix row_of(std::size_t n, double v) { return Matrix(1, n, v); }

}  // namespace

std::size_t ParameterStore::parameter_count() const noexcept {
  std::size_t n = 0;
  for_each_tensor([&](const std::string&, const Matrix& m) { n += m.size(); });
  return n;
}

ParameterStore init_model(const ModelConfig& config, Rng rng) {
  config.validate();
  const std::size_t d = config.d_model;
  ParameterStore p;
  p.config = config;

  // Separate streams keep the backbone identical across models that share a
  // seed but differ in task schema.
  Rng emb_rng = rng.split("embedding");
  p.token_embedding = glorot(config.vocab_size, d, config.vocab_size, d, emb_rng);
  p.position_embedding = glorot(config.max_seq_len, d, config.max_seq_len, d, emb_rng);

  for (std::size_t l = 0; l < config.n_layers; ++l) {
    Rng lr = rng.split("layer").split(l);
    EncoderLayerParams L;
    L.wq = glorot(d, d, d, d, lr);
    L.wk = glorot(d, d, d, d, lr);
    L.wv = glorot(d, d, d, d, lr);
    L.wo = glorot(d, d, d, d, lr);
    L.ln1_gain = row_of(d, 1.0);
    L.ln1_bias = row_of(d, 0.0);
    L.ff1_w = glorot(d, config.d_ff, d, config.d_ff, lr);
    L.ff1_b = row_of(config.d_ff, 0.0);
    L.ff2_w = glorot(config.d_ff, d, config.d_ff, d, lr);
    L.ff2_b = row_of(d, 0.0);
    L.ln2_gain = row_of(d, 1.0);
    L.ln2_bias = row_of(d, 0.0);
    p.layers.push_back(std::move(L));
  }

  const MultiTaskSchema schema = config.effective_schema();
  for (std::size_t t = 0; t < schema.size(); ++t) {
    // Fixed fan-out and a stream keyed by task name: a task's head starts
    // identically in its single-task and multi-task models for a given seed.
    Rng hr = rng.split("classifier").split(schema[t].name);
    const std::size_t n = schema[t].n_classes;
    const double limit = std::sqrt(6.0 / static_cast<double>(d + 2));
    ClassifierHeadParams h;
    h.weight = Matrix(n, d);
    for (double& v : h.weight.values()) v = hr.uniform(-limit, limit);
    h.bias = row_of(n, 0.0);
    p.heads.push_back(std::move(h));
  }
  return p;
}

ParameterStore zeros_like(const ParameterStore& like) {
  ParameterStore z = like;
  z.for_each_tensor([](const std::string&, Matrix& m) { m.fill(0.0); });
  return z;
}

std::size_t parameter_count(const ModelConfig& c) {
  const std::size_t d = c.d_model;
  std::size_t n = (c.vocab_size + c.max_seq_len) * d;
  n += c.n_layers * (4 * d * d + 2 * d * c.d_ff + c.d_ff + d + 4 * d);
  for (const auto& t : c.effective_schema().tasks()) n += t.n_classes * (d + 1);
  return n;
}

void axpy(ParameterStore& a, double scale, const ParameterStore& b) {
  std::vector<const Matrix*> bs;
  b.for_each_tensor([&](const std::string&, const Matrix& m) { bs.push_back(&m); });
  std::size_t i = 0;
  a.for_each_tensor([&](const std::string& name, Matrix& m) {
    if (i >= bs.size() || bs[i]->size() != m.size()) {
      throw InvalidInput("axpy: tensor layout mismatch at " + name);
    }
    auto dst = m.values();
    auto src = bs[i++]->values();
    for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += scale * src[k];
  });
}

double squared_norm(const ParameterStore& p) {
  double s = 0.0;
  p.for_each_tensor([&](const std::string&, const Matrix& m) {
    for (double v : m.values()) s += v * v;
  });
  return s;
}

}  // namespace segalign
