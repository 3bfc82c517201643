#pragma once

#include <Eigen/Dense>

#include <cassert>

namespace wed {

/// LDL^T-style elimination for a symmetric tridiagonal matrix given by its
/// diagonal and off-diagonal. No pivoting: intended for SPD and diagonally
/// dominant systems. The factorization is immutable once constructed and may be
/// shared between threads.
template <typename Scalar>
class SymmetricTridiagonal {
 public:
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  SymmetricTridiagonal(Vec diagonal, Vec off_diagonal)
      : diag_(std::move(diagonal)), off_(std::move(off_diagonal)) {
    const Eigen::Index n = diag_.size();
    assert(off_.size() == (n > 0 ? n - 1 : 0));
    pivot_.resize(n);
    mult_.resize(n > 0 ? n - 1 : 0);
    if (n == 0) return;
    pivot_(0) = diag_(0);
    for (Eigen::Index i = 1; i < n; ++i) {
      mult_(i - 1) = off_(i - 1) / pivot_(i - 1);
      pivot_(i) = diag_(i) - mult_(i - 1) * off_(i - 1);
    }
  }

  Eigen::Index size() const { return diag_.size(); }

  template <typename Derived>
  Vec solve(const Eigen::MatrixBase<Derived>& rhs) const {
    const Eigen::Index n = size();
    Vec x = rhs;
    for (Eigen::Index i = 1; i < n; ++i) x(i) -= mult_(i - 1) * x(i - 1);
    x(n - 1) /= pivot_(n - 1);
    for (Eigen::Index i = n - 2; i >= 0; --i) x(i) = (x(i) - off_(i) * x(i + 1)) / pivot_(i);
    return x;
  }

  template <typename Derived>
  Vec apply(const Eigen::MatrixBase<Derived>& x) const {
    const Eigen::Index n = size();
    Vec y = diag_.cwiseProduct(x);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      y(i) += off_(i) * x(i + 1);
      y(i + 1) += off_(i) * x(i);
    }
    return y;
  }

  const Vec& pivots() const { return pivot_; }

 private:
  Vec diag_;
  Vec off_;
  Vec pivot_;
  Vec mult_;
};

}  // namespace wed
