#include "membias/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace membias::kernels {
namespace {

inline double row_score(std::span<const double> query, double query_norm,
                        std::span<const double> row, double row_norm) {
  double dot = 0.0;
  for (std::size_t j = 0; j < row.size(); ++j) dot += query[j] * row[j];
  return std::clamp(dot / (query_norm * row_norm), -1.0, 1.0);
}

double checked_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  if (s == 0.0) throw std::invalid_argument("zero-norm embedding");
  return std::sqrt(s);
}

void check_shapes(std::span<const double> query, const DenseMatrix& pool, std::span<double> out) {
  if (query.size() != pool.cols()) {
    throw std::invalid_argument("query dimension " + std::to_string(query.size()) +
                                " does not match pool dimension " + std::to_string(pool.cols()));
  }
  if (out.size() != pool.rows()) throw std::invalid_argument("score buffer size mismatch");
}

}  // namespace

void DenseMatrix::append(std::span<const double> row) {
  if (row.size() != cols_) {
    throw std::invalid_argument("row dimension " + std::to_string(row.size()) + " != " +
                                std::to_string(cols_));
  }
  data_.insert(data_.end(), row.begin(), row.end());
  norms_.push_back(checked_norm(row));
}

void cosine_scores_serial(std::span<const double> query, const DenseMatrix& pool,
                          std::span<double> out) {
  check_shapes(query, pool, out);
  const double qn = checked_norm(query);
  for (std::size_t i = 0; i < pool.rows(); ++i) {
    out[i] = row_score(query, qn, pool.row(i), pool.norm(i));
  }
}

void cosine_scores_parallel(std::span<const double> query, const DenseMatrix& pool,
                            std::span<double> out) {
  check_shapes(query, pool, out);
  const double qn = checked_norm(query);
  const auto n = static_cast<std::ptrdiff_t>(pool.rows());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = row_score(query, qn, pool.row(i), pool.norm(i));
  }
}

}  // namespace membias::kernels
