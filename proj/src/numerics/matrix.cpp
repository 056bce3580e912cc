// SPDX-License-Identifier: Apache-2.0
#include "segalign/numerics/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "segalign/numerics/errors.hpp"
#include "segalign/numerics/kernels.hpp"

namespace segalign {

namespace {

std::string shape_str(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw InvalidInput(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                       shape_str(b));
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows_ * cols_) {
    throw InvalidInput("Matrix: payload of " + std::to_string(data_.size()) +
                       " values does not fit " + std::to_string(rows) + "x" +
                       std::to_string(cols));
  }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::size_t r = rows.size();
  std::size_t c = r == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(r * c);
  for (const auto& row : rows) {
    if (row.size() != c) throw InvalidInput("Matrix::from_rows: ragged rows");
    data.insert(data.end(), row.begin(), row.end());
  }
  return Matrix(r, c, std::move(data));
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

void Matrix::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Matrix::all_finite() const noexcept {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "operator+=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "operator-=");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
  for (double& v : data_) v *= s;
  return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix transpose(const Matrix& a) {
  Matrix t(a.cols(), a.rows());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) t(c, r) = a(r, c);
  return t;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw InvalidInput("matmul: " + shape_str(a) + " times " + shape_str(b));
  }
  Matrix c(a.rows(), b.cols());
  kernels::parallel::gemm_nn({a.rows(), b.cols(), a.cols()}, a.values().data(),
                             b.values().data(), c.values().data());
  return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw InvalidInput("matmul_tn: " + shape_str(a) + "^T times " + shape_str(b));
  }
  Matrix c(a.cols(), b.cols());
  kernels::parallel::gemm_tn({a.cols(), b.cols(), a.rows()}, a.values().data(),
                             b.values().data(), c.values().data());
  return c;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw InvalidInput("matmul_nt: " + shape_str(a) + " times " + shape_str(b) + "^T");
  }
  Matrix c(a.rows(), b.rows());
  kernels::parallel::gemm_nt({a.rows(), b.rows(), a.cols()}, a.values().data(),
                             b.values().data(), c.values().data());
  return c;
}

double frobenius_norm(const Matrix& a) {
  // Scaled accumulation keeps huge or tiny entries from over/underflowing.
  double scale = 0.0;
  for (double v : a.values()) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : a.values()) {
    double s = v / scale;
    sum += s * s;
  }
  return scale * std::sqrt(sum);
}

Matrix row_softmax(const Matrix& a) {
  Matrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto in = a.row(r);
    auto o = out.row(r);
    if (in.empty()) continue;
    double mx = *std::max_element(in.begin(), in.end());
    double sum = 0.0;
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = std::exp(in[c] - mx);
      sum += o[c];
    }
    for (double& v : o) v /= sum;
  }
  return out;
}

Matrix layer_norm_rows(const Matrix& a, std::span<const double> gain,
                       std::span<const double> bias, double eps) {
  if (gain.size() != a.cols() || bias.size() != a.cols()) {
    throw InvalidInput("layer_norm_rows: gain/bias length must equal " +
                       std::to_string(a.cols()));
  }
  Matrix out(a.rows(), a.cols());
  const double n = static_cast<double>(a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r) {
    auto in = a.row(r);
    double mean = 0.0;
    for (double v : in) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : in) var += (v - mean) * (v - mean);
    var /= n;
    const double inv = 1.0 / std::sqrt(var + eps);
    auto o = out.row(r);
    for (std::size_t c = 0; c < in.size(); ++c) {
      o[c] = gain[c] * (in[c] - mean) * inv + bias[c];
    }
  }
  return out;
}

Matrix center_columns(const Matrix& a) {
  Matrix out = a;
  if (a.rows() == 0) return out;
  for (std::size_t c = 0; c < a.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < a.rows(); ++r) mean += a(r, c);
    mean /= static_cast<double>(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) out(r, c) -= mean;
  }
  return out;
}

}  // namespace segalign
