#pragma once

#include "hikersolve/direct_solver.hpp"
#include "hikersolve/linalg.hpp"
#include "hikersolve/treecode.hpp"

#include <functional>
#include <string>
#include <vector>

namespace hikersolve {

using LinearOperator = std::function<Vector(const Vector&)>;

struct KrylovReport {
  Index iterations = 0;
  Index restarts = 0;
  /// Relative residual |b - A x| / |b| after each iteration (least-squares
  /// estimate within a cycle, replaced by the recomputed value at cycle end).
  std::vector<double> residuals;
  /// Explicitly recomputed |b - A x| / |b| for the returned x.
  double final_residual = 0.0;
  bool converged = false;
  double seconds = 0.0;
};

struct GmresOptions {
  double tol = 1e-8;
  Index max_iter = 500;
  Index restart = 50;
};

struct KrylovResult {
  Vector x;
  KrylovReport report;
};

/// Right-preconditioned restarted GMRES: solves A M^{-1} y = b with modified
/// Gram-Schmidt Arnoldi (plus a second pass when orthogonality degrades) and
/// Givens least squares; returns x = M^{-1} y.
KrylovResult gmres(const LinearOperator& apply_a, const LinearOperator& apply_minv, const Vector& b,
                   const GmresOptions& options);

enum class OperatorMode { compressed, dense_oracle };

OperatorMode parse_operator_mode(const std::string& name);
std::string to_string(OperatorMode mode);

/// GMRES on K~ + lambda I (compressed) or the exact K + lambda I
/// (dense_oracle, n <= 4096), preconditioned by the direct factorization.
/// Vectors are in tree order.
KrylovResult hybrid_solve(const HierarchicalOperator& op, const Factorization& f, const Vector& b,
                          const GmresOptions& options, OperatorMode mode);

}  // namespace hikersolve
