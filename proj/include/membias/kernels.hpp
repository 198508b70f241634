#ifndef MEMBIAS_KERNELS_HPP_
#define MEMBIAS_KERNELS_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace membias::kernels {

// Row-major matrix of embedding rows with cached Euclidean norms.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t cols) : cols_(cols) {}

  void append(std::span<const double> row);
  std::size_t rows() const { return norms_.size(); }
  std::size_t cols() const { return cols_; }
  std::span<const double> row(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  double norm(std::size_t i) const { return norms_[i]; }

 private:
  std::size_t cols_ = 0;
  std::vector<double> data_;
  std::vector<double> norms_;
};

// out[i] = cosine(query, row i), clamped to [-1, 1]. Each row is accumulated in
// index order, so both variants give bitwise identical results and agree with
// membias::cosine_similarity.
void cosine_scores_serial(std::span<const double> query, const DenseMatrix& pool,
                          std::span<double> out);
void cosine_scores_parallel(std::span<const double> query, const DenseMatrix& pool,
                            std::span<double> out);

}  // namespace membias::kernels

#endif  // MEMBIAS_KERNELS_HPP_
