// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "segalign/model/config.hpp"
#include "segalign/numerics/matrix.hpp"

namespace segalign {

struct CrossEntropy {
  double loss = 0.0;
  std::vector<double> grad;  // softmax(logits) - onehot(target)
};

CrossEntropy cross_entropy(std::span<const double> logits, std::size_t target);

struct TaskLoss {
  std::string task;
  double loss = 0.0;
  Matrix logit_grad;  // rows × n_classes
};

struct MultiTaskLoss {
  double total = 0.0;
  /// Logit gradient blocks concatenated column-wise in schema order.
  Matrix logit_grad;
  std::vector<Matrix> blocks;
};

/// Unweighted sum of task losses; blocks reordered to schema order.
/// Throws InvalidInput when a schema task is missing or mis-shaped.
MultiTaskLoss multi_task_loss(std::span<const TaskLoss> losses, const MultiTaskSchema& schema);

/// Mean cross-entropy over rows whose target is >= 0 (negative = ignored).
TaskLoss batch_cross_entropy(std::string task, const Matrix& logits,
                             std::span<const int> targets);

}  // namespace segalign
