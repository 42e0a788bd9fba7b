#include "hikersolve/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace hikersolve {

namespace {

std::string singular_message(Index step, double pivot) {
  std::ostringstream os;
  os << "singular matrix: pivot " << pivot << " at elimination step " << step;
  return os.str();
}

constexpr Index kPanelWidth = 48;

}  // namespace

SingularMatrixError::SingularMatrixError(Index step, double pivot, double smallest_accepted)
    : std::runtime_error(singular_message(step, pivot)),
      step_(step),
      pivot_(pivot),
      smallest_(smallest_accepted) {}

PivotedQR pivoted_qr(const Matrix& a, double tol, Index max_rank) {
  if (!(tol > 0.0)) throw std::invalid_argument("pivoted_qr: tol must be positive");
  if (max_rank < 1) throw std::invalid_argument("pivoted_qr: max_rank must be >= 1");

  const Index m = a.rows();
  const Index n = a.cols();
  PivotedQR out;
  out.pivots.resize(static_cast<std::size_t>(n));
  std::iota(out.pivots.begin(), out.pivots.end(), Index{0});
  if (m == 0 || n == 0) {
    out.r_factor.resize(0, n);
    return out;
  }

  Matrix w = a;
  const Index steps = std::min({m, n, max_rank});
  double r00 = 0.0;
  Index rank = 0;
  Vector v;

  for (Index j = 0; j < steps; ++j) {
    // Exact trailing norms each step; the chosen norm becomes |R(j,j)|.
    Index best = j;
    double best_norm = -1.0;
    for (Index c = j; c < n; ++c) {
      const double nrm = w.col(c).tail(m - j).norm();
      if (nrm > best_norm) {
        best_norm = nrm;
        best = c;
      }
    }
    if (j == 0) {
      r00 = best_norm;
      if (!(r00 > 0.0)) break;
    } else if (best_norm <= tol * r00) {
      break;
    }

    if (best != j) {
      w.col(j).swap(w.col(best));
      std::swap(out.pivots[static_cast<std::size_t>(j)],
                out.pivots[static_cast<std::size_t>(best)]);
    }

    const Index len = m - j;
    const double x0 = w(j, j);
    const double alpha = x0 >= 0.0 ? -best_norm : best_norm;
    v = w.col(j).tail(len);
    v(0) -= alpha;
    const double vnorm2 = v.squaredNorm();
    if (vnorm2 > 0.0 && j + 1 < n) {
      const double beta = 2.0 / vnorm2;
      auto trailing = w.block(j, j + 1, len, n - j - 1);
      Eigen::RowVectorXd proj = beta * (v.transpose() * trailing);
      trailing.noalias() -= v * proj;
    }
    w(j, j) = alpha;
    w.col(j).tail(len - 1).setZero();
    rank = j + 1;
  }

  out.rank = rank;
  out.r_factor = w.topRows(rank);
  for (Index i = 0; i < rank; ++i)
    for (Index c = 0; c < i && c < n; ++c) out.r_factor(i, c) = 0.0;
  return out;
}

InterpolativeDecomposition interpolative_decomposition(const Matrix& a, double tol,
                                                       Index max_rank) {
  const PivotedQR qr = pivoted_qr(a, tol, max_rank);
  const Index r = qr.rank;
  const Index n = a.cols();

  InterpolativeDecomposition id;
  id.columns.assign(qr.pivots.begin(), qr.pivots.begin() + r);
  id.interp = Matrix::Zero(r, n);
  if (r == 0) return id;

  // T = R11^{-1} R12; every diagonal of R11 exceeds tol * |R(0,0)|.
  Matrix t = qr.r_factor.rightCols(n - r);
  qr.r_factor.leftCols(r).triangularView<Eigen::Upper>().solveInPlace(t);

  for (Index j = 0; j < r; ++j) id.interp(j, qr.pivots[static_cast<std::size_t>(j)]) = 1.0;
  for (Index j = r; j < n; ++j) id.interp.col(qr.pivots[static_cast<std::size_t>(j)]) = t.col(j - r);
  return id;
}

template <class Scalar>
BasicDenseFactor<Scalar>::BasicDenseFactor(MatrixType a, double pivot_tol) : lu_(std::move(a)) {
  if (lu_.rows() != lu_.cols()) throw std::invalid_argument("DenseFactor: matrix must be square");
  const Index n = lu_.rows();
  row_perm_.resize(static_cast<std::size_t>(n));
  std::iota(row_perm_.begin(), row_perm_.end(), Index{0});
  if (n == 0) return;

  const Scalar threshold = pivot_tol > 0.0 ? Scalar(pivot_tol) * lu_.cwiseAbs().maxCoeff() : Scalar(0);
  min_pivot_ = std::numeric_limits<double>::infinity();
  max_pivot_ = 0.0;

  for (Index k0 = 0; k0 < n; k0 += kPanelWidth) {
    const Index b = std::min(kPanelWidth, n - k0);
    const Index panel_end = k0 + b;
    for (Index j = k0; j < panel_end; ++j) {
      Index p = j;
      Scalar pmax = std::abs(lu_(j, j));
      for (Index i = j + 1; i < n; ++i) {
        const Scalar v = std::abs(lu_(i, j));
        if (v > pmax) {
          pmax = v;
          p = i;
        }
      }
      if (!(pmax > threshold)) throw SingularMatrixError(j, static_cast<double>(pmax), min_pivot_);
      if (p != j) {
        lu_.row(j).swap(lu_.row(p));
        std::swap(row_perm_[static_cast<std::size_t>(j)], row_perm_[static_cast<std::size_t>(p)]);
      }
      min_pivot_ = std::min(min_pivot_, static_cast<double>(pmax));
      max_pivot_ = std::max(max_pivot_, static_cast<double>(pmax));

      const Index below = n - j - 1;
      if (below == 0) continue;
      lu_.col(j).tail(below) /= lu_(j, j);
      const Index width = panel_end - j - 1;
      if (width > 0) {
        lu_.block(j + 1, j + 1, below, width).noalias() -=
            lu_.col(j).tail(below) * lu_.row(j).segment(j + 1, width);
      }
    }

    const Index rest = n - panel_end;
    if (rest > 0) {
      lu_.block(k0, k0, b, b).template triangularView<Eigen::UnitLower>().solveInPlace(
          lu_.block(k0, panel_end, b, rest));
      lu_.block(panel_end, panel_end, rest, rest).noalias() -=
          lu_.block(panel_end, k0, rest, b) * lu_.block(k0, panel_end, b, rest);
    }
  }
}

template <class Scalar>
void BasicDenseFactor<Scalar>::solve_in_place(Eigen::Ref<MatrixType> b) const {
  if (b.rows() != lu_.rows()) throw std::invalid_argument("DenseFactor::solve: row count mismatch");
  if (lu_.rows() == 0) return;
  MatrixType permuted(b.rows(), b.cols());
  for (Index k = 0; k < b.rows(); ++k) permuted.row(k) = b.row(row_perm_[static_cast<std::size_t>(k)]);
  lu_.template triangularView<Eigen::UnitLower>().solveInPlace(permuted);
  lu_.template triangularView<Eigen::Upper>().solveInPlace(permuted);
  b = permuted;
}

template <class Scalar>
typename BasicDenseFactor<Scalar>::MatrixType BasicDenseFactor<Scalar>::solve(const MatrixType& b) const {
  MatrixType x = b;
  solve_in_place(x);
  return x;
}

template <class Scalar>
typename BasicDenseFactor<Scalar>::VectorType BasicDenseFactor<Scalar>::solve(const VectorType& b) const {
  if (b.size() != lu_.rows()) throw std::invalid_argument("DenseFactor::solve: row count mismatch");
  VectorType x(b.size());
  for (Index k = 0; k < b.size(); ++k) x(k) = b(row_perm_[static_cast<std::size_t>(k)]);
  lu_.template triangularView<Eigen::UnitLower>().solveInPlace(x);
  lu_.template triangularView<Eigen::Upper>().solveInPlace(x);
  return x;
}

template <class Scalar>
typename BasicDenseFactor<Scalar>::MatrixType BasicDenseFactor<Scalar>::reconstruct() const {
  const Index n = lu_.rows();
  const MatrixType l = lu_.template triangularView<Eigen::UnitLower>();
  const MatrixType u = lu_.template triangularView<Eigen::Upper>();
  const MatrixType prod = l * u;
  MatrixType a(n, n);
  for (Index k = 0; k < n; ++k) a.row(row_perm_[static_cast<std::size_t>(k)]) = prod.row(k);
  return a;
}

template class BasicDenseFactor<double>;
template class BasicDenseFactor<long double>;

Matrix block_diagonal(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  out.topLeftCorner(a.rows(), a.cols()) = a;
  out.bottomRightCorner(b.rows(), b.cols()) = b;
  return out;
}

double relative_frobenius_error(const Matrix& approx, const Matrix& exact) {
  const double denom = exact.norm();
  const double num = (approx - exact).norm();
  if (denom == 0.0) return num;
  return num / denom;
}

}  // namespace hikersolve
