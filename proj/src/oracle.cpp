#include "hikersolve/oracle.hpp"

#include <stdexcept>

namespace hikersolve {

Matrix dense_kernel_matrix(const KernelSpec& kernel, const PointSet& ps, double lambda) {
  if (ps.size() > kDenseOracleMaxPoints)
    throw std::invalid_argument("dense oracle limited to n <= " + std::to_string(kDenseOracleMaxPoints));
  kernel.validate(ps.dim());
  const Index n = static_cast<Index>(ps.size());
  Matrix k(n, n);
  for (Index j = 0; j < n; ++j) {
    const auto y = ps.point(static_cast<std::size_t>(j));
    for (Index i = 0; i < n; ++i) k(i, j) = kernel.entry(ps.point(static_cast<std::size_t>(i)), y);
  }
  k.diagonal().array() += lambda;
  return k;
}

Vector dense_solve(const Matrix& a, const Vector& b, double* relative_residual) {
  const DenseFactor f = factor_dense(a);
  Vector x = f.solve(b);
  if (relative_residual != nullptr) {
    const double bn = b.norm();
    const double rn = (a * x - b).norm();
    *relative_residual = bn > 0.0 ? rn / bn : rn;
  }
  return x;
}

Matrix dense_inverse(const Matrix& a) {
  return factor_dense(a).solve(Matrix(Matrix::Identity(a.rows(), a.cols())));
}

}  // namespace hikersolve
