#pragma once

// Dense building blocks: column-pivoted Householder QR, interpolative
// decomposition and partial-pivoting LU. Storage is Eigen; the
// factorizations themselves are implemented here so that rank selection,
// pivot tie-breaking and singularity reporting follow our own rules.

#include <Eigen/Dense>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace hikersolve {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown by DenseFactor when elimination meets a pivot that is exactly
/// zero (or below the caller's pivot threshold).
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(Index step, double pivot, double smallest_accepted);
  Index step() const noexcept { return step_; }
  double pivot() const noexcept { return pivot_; }
  /// Smallest pivot magnitude accepted before the failing step.
  double smallest_accepted() const noexcept { return smallest_; }

 private:
  Index step_;
  double pivot_;
  double smallest_;
};

struct PivotedQR {
  /// pivots[j] is the original column placed at position j.
  std::vector<Index> pivots;
  /// First `rank` rows of R (upper trapezoidal), columns in pivoted order.
  Matrix r_factor;
  Index rank = 0;

  double diagonal(Index j) const { return r_factor(j, j); }
};

/// Householder QR with column pivoting, truncated at the first pivot whose
/// magnitude drops to tol * |R(0,0)| or below, and at max_rank.
/// Pivot ties go to the lowest column position.
PivotedQR pivoted_qr(const Matrix& a, double tol, Index max_rank);

struct InterpolativeDecomposition {
  /// Selected (skeleton) columns of A, in pivot order.
  std::vector<Index> columns;
  /// r x n interpolation matrix with A ~= A(:, columns) * interp.
  Matrix interp;

  Index rank() const noexcept { return static_cast<Index>(columns.size()); }
};

InterpolativeDecomposition interpolative_decomposition(const Matrix& a, double tol,
                                                       Index max_rank);

/// Long-double storage for the small reduced systems whose updates cancel
/// heavily (see direct_solver).
using ExtendedMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using ExtendedVector = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

/// LU factorization with partial (row) pivoting of a square matrix.
template <class Scalar>
class BasicDenseFactor {
 public:
  using MatrixType = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using VectorType = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicDenseFactor() = default;

  /// Factors `a`. A pivot with |p| <= pivot_tol * max|a| is treated as
  /// singular; the default only rejects exact zeros.
  explicit BasicDenseFactor(MatrixType a, double pivot_tol = 0.0);

  Index size() const noexcept { return lu_.rows(); }
  bool empty() const noexcept { return lu_.size() == 0; }

  MatrixType solve(const MatrixType& b) const;
  VectorType solve(const VectorType& b) const;
  /// In-place variant for a column block.
  void solve_in_place(Eigen::Ref<MatrixType> b) const;

  /// Rebuilds P^T * L * U (i.e. the original matrix) for diagnostics.
  MatrixType reconstruct() const;

  double min_pivot() const noexcept { return min_pivot_; }
  double max_pivot() const noexcept { return max_pivot_; }
  /// max|U_kk| / min|U_kk|: a cheap lower bound on the condition number.
  double pivot_ratio() const noexcept {
    return min_pivot_ > 0.0 ? max_pivot_ / min_pivot_ : 0.0;
  }

  const MatrixType& packed() const noexcept { return lu_; }
  /// row_perm[k] is the original row that ended up in row k.
  const std::vector<Index>& row_permutation() const noexcept { return row_perm_; }

 private:
  MatrixType lu_;
  std::vector<Index> row_perm_;
  double min_pivot_ = 0.0;
  double max_pivot_ = 0.0;
};

extern template class BasicDenseFactor<double>;
extern template class BasicDenseFactor<long double>;

using DenseFactor = BasicDenseFactor<double>;
using ExtendedFactor = BasicDenseFactor<long double>;

inline DenseFactor factor_dense(Matrix a) { return DenseFactor(std::move(a)); }
inline Matrix solve_dense(const DenseFactor& f, const Matrix& b) { return f.solve(b); }

/// blkdiag(a, b).
Matrix block_diagonal(const Matrix& a, const Matrix& b);

double relative_frobenius_error(const Matrix& approx, const Matrix& exact);

}  // namespace hikersolve
