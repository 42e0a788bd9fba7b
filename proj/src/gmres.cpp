#include "hikersolve/gmres.hpp"

#include "hikersolve/oracle.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace hikersolve {

namespace {

constexpr double kReorthThreshold = 1e-8;

Vector checked(const LinearOperator& op, const Vector& v, const char* name) {
  Vector out = op(v);
  if (out.size() != v.size())
    throw std::invalid_argument(std::string("gmres: ") + name + " returned a vector of length " +
                                std::to_string(out.size()) + ", expected " + std::to_string(v.size()));
  return out;
}

}  // namespace

KrylovResult gmres(const LinearOperator& apply_a, const LinearOperator& apply_minv, const Vector& b,
                   const GmresOptions& options) {
  if (!(options.tol > 0.0)) throw std::invalid_argument("gmres: tol must be > 0");
  if (options.restart < 1) throw std::invalid_argument("gmres: restart must be >= 1");
  if (options.max_iter < 0) throw std::invalid_argument("gmres: max_iter must be >= 0");

  const auto start = std::chrono::steady_clock::now();
  const Index n = b.size();
  const Index m = options.restart;
  KrylovResult result{Vector::Zero(n), {}};
  KrylovReport& rep = result.report;
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    rep.converged = true;
    return result;
  }

  Matrix basis(n, m + 1);
  // Preconditioned directions M^{-1} v_j, kept so x is assembled from the
  // exact vectors the Arnoldi relation was built with.
  Matrix directions(n, m);
  Matrix hess(m + 1, m);
  Vector cs(m), sn(m), rhs(m + 1);
  Vector residual = b;
  double rel = 1.0;
  bool first_cycle = true;

  while (true) {
    const double beta = residual.norm();
    rel = beta / bnorm;
    if (rel <= options.tol || rep.iterations >= options.max_iter) break;
    if (!first_cycle) ++rep.restarts;
    first_cycle = false;

    hess.setZero();
    rhs.setZero();
    rhs(0) = beta;
    basis.col(0) = residual / beta;
    Index k = 0;
    for (Index j = 0; j < m && rep.iterations < options.max_iter; ++j) {
      directions.col(j) = checked(apply_minv, basis.col(j), "preconditioner");
      Vector w = checked(apply_a, directions.col(j), "operator");
      for (Index i = 0; i <= j; ++i) {
        const double h = basis.col(i).dot(w);
        hess(i, j) = h;
        w.noalias() -= h * basis.col(i);
      }
      const double wnorm = w.norm();
      const Vector again = basis.leftCols(j + 1).transpose() * w;
      if (wnorm > 0.0 && again.cwiseAbs().maxCoeff() > kReorthThreshold * wnorm) {
        w.noalias() -= basis.leftCols(j + 1) * again;
        hess.col(j).head(j + 1) += again;
      }
      const double hn = w.norm();
      hess(j + 1, j) = hn;

      for (Index i = 0; i < j; ++i) {
        const double t = cs(i) * hess(i, j) + sn(i) * hess(i + 1, j);
        hess(i + 1, j) = -sn(i) * hess(i, j) + cs(i) * hess(i + 1, j);
        hess(i, j) = t;
      }
      const double denom = std::hypot(hess(j, j), hess(j + 1, j));
      if (denom == 0.0) {
        cs(j) = 1.0;
        sn(j) = 0.0;
      } else {
        cs(j) = hess(j, j) / denom;
        sn(j) = hess(j + 1, j) / denom;
      }
      hess(j, j) = denom;
      hess(j + 1, j) = 0.0;
      rhs(j + 1) = -sn(j) * rhs(j);
      rhs(j) = cs(j) * rhs(j);

      ++rep.iterations;
      k = j + 1;
      const double estimate = std::abs(rhs(j + 1)) / bnorm;
      rep.residuals.push_back(estimate);
      if (hn == 0.0 || estimate <= options.tol) break;
      basis.col(j + 1) = w / hn;
    }

    Vector y = rhs.head(k);
    hess.topLeftCorner(k, k).triangularView<Eigen::Upper>().solveInPlace(y);
    result.x.noalias() += directions.leftCols(k) * y;
    residual = b - checked(apply_a, result.x, "operator");
    if (!rep.residuals.empty()) rep.residuals.back() = residual.norm() / bnorm;
  }

  rep.final_residual = rel;
  rep.converged = rel <= options.tol;
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

OperatorMode parse_operator_mode(const std::string& name) {
  if (name == "compressed") return OperatorMode::compressed;
  if (name == "dense" || name == "dense_oracle") return OperatorMode::dense_oracle;
  throw std::invalid_argument("unknown operator mode '" + name + "'");
}

std::string to_string(OperatorMode mode) {
  return mode == OperatorMode::compressed ? "compressed" : "dense_oracle";
}

KrylovResult hybrid_solve(const HierarchicalOperator& op, const Factorization& f, const Vector& b,
                          const GmresOptions& options, OperatorMode mode) {
  if (&f.op() != &op) throw std::invalid_argument("hybrid_solve: factorization belongs to another operator");
  if (f.lambda() != op.kernel().lambda)
    throw std::invalid_argument("hybrid_solve: lambda mismatch between operator (" +
                                std::to_string(op.kernel().lambda) + ") and factorization (" +
                                std::to_string(f.lambda()) + ")");
  if (b.size() != op.size()) throw std::invalid_argument("hybrid_solve: right-hand side length mismatch");

  const double lambda = f.lambda();
  const LinearOperator minv = [&f](const Vector& v) { return f.solve(v); };
  if (mode == OperatorMode::compressed) {
    const LinearOperator a = [&op, lambda](const Vector& v) { return op.hmatvec(v, lambda); };
    return gmres(a, minv, b, options);
  }
  if (op.size() > kMaterializeMaxPoints)
    throw std::invalid_argument("hybrid_solve: dense operator mode is limited to n <= " +
                                std::to_string(kMaterializeMaxPoints));
  const Matrix dense = dense_kernel_matrix(op.kernel(), op.tree().points(), lambda);
  const LinearOperator a = [&dense](const Vector& v) { return Vector(dense * v); };
  return gmres(a, minv, b, options);
}

}  // namespace hikersolve
