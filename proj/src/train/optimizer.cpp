// SPDX-License-Identifier: Apache-2.0
#include "segalign/train/optimizer.hpp"

#include <cmath>

#include "segalign/numerics/errors.hpp"
#include "segalign/train/train_config.hpp"

namespace segalign {

double lr_at(std::size_t step, std::size_t total_steps, const TrainConfig& cfg) {
  if (total_steps == 0) return 0.0;
  if (step > total_steps) throw InvalidInput("lr_at: step beyond total_steps");
  return cfg.lr_peak * static_cast<double>(total_steps - step) / static_cast<double>(total_steps);
}

double global_norm(const GradientSet& g) {
  double s = 0.0;
  for (const auto& v : g.vectors())
    for (double x : v) s += x * x;
  return std::sqrt(s);
}

double global_norm(const ParameterStore& g) { return std::sqrt(squared_norm(g)); }

GradientSet clip_gradients(GradientSet g, double max_norm) {
  if (!(max_norm > 0.0)) throw InvalidInput("clip_gradients: max_norm must be positive");
  const double norm = global_norm(g);
  if (norm > max_norm) g *= max_norm / norm;
  return g;
}

double clip_gradients_inplace(ParameterStore& g, double max_norm) {
  if (!(max_norm > 0.0)) throw InvalidInput("clip_gradients: max_norm must be positive");
  const double norm = global_norm(g);
  if (norm > max_norm) {
    const double s = max_norm / norm;
    g.for_each_tensor([s](const std::string&, Matrix& m) { m *= s; });
  }
  return norm;
}

void AdamW::step(std::span<const std::span<double>> params,
                 std::span<const std::span<const double>> grads, double lr) {
  if (params.size() != grads.size()) throw InvalidInput("AdamW: parameter/gradient count mismatch");
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.emplace_back(p.size(), 0.0);
      v_.emplace_back(p.size(), 0.0);
    }
  }
  if (m_.size() != params.size()) throw InvalidInput("AdamW: parameter layout changed");
  ++t_;
  const auto& s = settings_;
  const double bc1 = 1.0 - std::pow(s.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(s.beta2, static_cast<double>(t_));
  const double decay = 1.0 - lr * s.weight_decay;
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i];
    auto g = grads[i];
    if (w.size() != g.size() || w.size() != m_[i].size()) {
      throw InvalidInput("AdamW: buffer " + std::to_string(i) + " changed shape");
    }
    auto& m = m_[i];
    auto& v = v_[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      m[k] = s.beta1 * m[k] + (1.0 - s.beta1) * g[k];
      v[k] = s.beta2 * v[k] + (1.0 - s.beta2) * g[k] * g[k];
      const double mhat = m[k] / bc1;
      const double vhat = v[k] / bc2;
      w[k] = w[k] * decay - lr * mhat / (std::sqrt(vhat) + s.eps);
    }
  }
}

void AdamW::step(ParameterStore& params, const ParameterStore& grads, double lr) {
  std::vector<std::span<double>> ps;
  std::vector<std::span<const double>> gs;
  params.for_each_tensor([&](const std::string&, Matrix& m) { ps.push_back(m.values()); });
  grads.for_each_tensor([&](const std::string&, const Matrix& m) { gs.push_back(m.values()); });
  step(ps, gs, lr);
}

}  // namespace segalign
