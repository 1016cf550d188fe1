#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>

namespace nammd {

using Index = Eigen::Index;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// An i.i.d. sample: m points of dimension d stored one per row.
///
/// Construction validates the invariants (m >= 2, finite entries), so every
/// Sample reaching an estimator is well-formed.
class Sample {
 public:
  explicit Sample(Matrix rows);

  Index size() const noexcept { return rows_.rows(); }
  Index dimension() const noexcept { return rows_.cols(); }
  const Matrix& rows() const noexcept { return rows_; }

  std::span<const double> point(Index i) const noexcept {
    return {rows_.data() + i * rows_.cols(), static_cast<std::size_t>(rows_.cols())};
  }

  /// Rows of `a` followed by rows of `b`.
  static Sample concat(const Sample& a, const Sample& b);

  /// Rows selected by `indices`, in order.
  Sample select(std::span<const Index> indices) const;

 private:
  Matrix rows_;
};

}  // namespace nammd
