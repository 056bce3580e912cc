// SPDX-License-Identifier: Apache-2.0
#include "segalign/train/loss.hpp"

#include <algorithm>
#include <cmath>

#include "segalign/numerics/errors.hpp"

namespace segalign {

CrossEntropy cross_entropy(std::span<const double> logits, std::size_t target) {
  if (target >= logits.size()) {
    throw InvalidInput("cross_entropy: target " + std::to_string(target) + " out of range");
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double v : logits) sum += std::exp(v - mx);
  const double log_z = mx + std::log(sum);
  CrossEntropy ce;
  ce.loss = log_z - logits[target];
  ce.grad.resize(logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) ce.grad[c] = std::exp(logits[c] - log_z);
  ce.grad[target] -= 1.0;
  return ce;
}

TaskLoss batch_cross_entropy(std::string task, const Matrix& logits, std::span<const int> targets) {
  if (targets.size() != logits.rows()) {
    throw InvalidInput("batch_cross_entropy: " + std::to_string(targets.size()) +
                       " targets for " + std::to_string(logits.rows()) + " rows");
  }
  TaskLoss out;
  out.task = std::move(task);
  out.logit_grad = Matrix(logits.rows(), logits.cols());
  std::size_t counted = 0;
  for (int t : targets) counted += t >= 0;
  if (counted == 0) return out;
  const double inv = 1.0 / static_cast<double>(counted);
  for (std::size_t r = 0; r < logits.rows(); ++r) {
    if (targets[r] < 0) continue;
    CrossEntropy ce = cross_entropy(logits.row(r), static_cast<std::size_t>(targets[r]));
    out.loss += ce.loss * inv;
    auto g = out.logit_grad.row(r);
    for (std::size_t c = 0; c < g.size(); ++c) g[c] = ce.grad[c] * inv;
  }
  return out;
}

MultiTaskLoss multi_task_loss(std::span<const TaskLoss> losses, const MultiTaskSchema& schema) {
  MultiTaskLoss out;
  std::size_t rows = 0;
  for (const auto& task : schema.tasks()) {
    const TaskLoss* found = nullptr;
    for (const auto& l : losses) {
      if (l.task == task.name) found = &l;
    }
    if (!found) throw InvalidInput("multi_task_loss: missing loss for task '" + task.name + "'");
    if (found->logit_grad.cols() != task.n_classes) {
      throw InvalidInput("multi_task_loss: gradient block for '" + task.name + "' has width " +
                         std::to_string(found->logit_grad.cols()));
    }
    if (out.blocks.empty()) rows = found->logit_grad.rows();
    if (found->logit_grad.rows() != rows) {
      throw InvalidInput("multi_task_loss: gradient blocks disagree on row count");
    }
    out.total += found->loss;
    out.blocks.push_back(found->logit_grad);
  }
  out.logit_grad = Matrix(rows, schema.total_width());
  std::size_t col = 0;
  for (const auto& b : out.blocks) {
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < b.cols(); ++c) out.logit_grad(r, col + c) = b(r, c);
    col += b.cols();
  }
  return out;
}

}  // namespace segalign
