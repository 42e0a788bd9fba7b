#include "hikersolve/kernels.hpp"

#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace hikersolve {

KernelFamily parse_kernel_family(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "laplace3d") return KernelFamily::laplace3d;
  if (name == "polynomial") return KernelFamily::polynomial;
  throw std::invalid_argument("unknown kernel '" + name + "'");
}

std::string to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::laplace3d: return "laplace3d";
    case KernelFamily::polynomial: return "polynomial";
  }
  return "unknown";
}

void KernelSpec::validate(std::size_t dim) const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw std::invalid_argument("kernel: lambda must be finite and >= 0");
  switch (family) {
    case KernelFamily::gaussian:
      if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
        throw std::invalid_argument("gaussian kernel: bandwidth h must be > 0");
      break;
    case KernelFamily::laplace3d:
      if (dim != 0 && dim != 3)
        throw std::invalid_argument("laplace3d kernel requires dimension 3, got " +
                                    std::to_string(dim));
      break;
    case KernelFamily::polynomial:
      if (degree < 1) throw std::invalid_argument("polynomial kernel: degree must be >= 1");
      if (!(shift >= 0.0)) throw std::invalid_argument("polynomial kernel: shift must be >= 0");
      break;
  }
}

double KernelSpec::entry(std::span<const double> x, std::span<const double> y) const noexcept {
  switch (family) {
    case KernelFamily::gaussian: {
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        d2 += diff * diff;
      }
      return std::exp(-d2 / (2.0 * bandwidth * bandwidth));
    }
    case KernelFamily::laplace3d: {
      double d2 = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) {
        const double diff = x[k] - y[k];
        d2 += diff * diff;
      }
      if (d2 == 0.0) return 0.0;
      return 1.0 / (4.0 * std::numbers::pi * std::sqrt(d2));
    }
    case KernelFamily::polynomial: {
      double dot = 0.0;
      for (std::size_t k = 0; k < x.size(); ++k) dot += x[k] * y[k];
      double base = dot + shift;
      double out = 1.0;
      for (int p = degree; p > 0; p >>= 1) {
        if (p & 1) out *= base;
        base *= base;
      }
      return out;
    }
  }
  return 0.0;
}

Matrix eval_block(const KernelSpec& k, const PointSet& targets, std::span<const Index> ti,
                  const PointSet& sources, std::span<const Index> si) {
  if (targets.dim() != sources.dim())
    throw std::invalid_argument("eval_block: dimension mismatch (" + std::to_string(targets.dim()) +
                                " vs " + std::to_string(sources.dim()) + ")");
  if (k.family == KernelFamily::laplace3d && targets.dim() != 3)
    throw std::invalid_argument("eval_block: laplace3d requires dimension 3");
  Matrix out(static_cast<Index>(ti.size()), static_cast<Index>(si.size()));
  for (Index c = 0; c < out.cols(); ++c) {
    const auto y = sources.point(static_cast<std::size_t>(si[static_cast<std::size_t>(c)]));
    for (Index r = 0; r < out.rows(); ++r)
      out(r, c) = k.entry(targets.point(static_cast<std::size_t>(ti[static_cast<std::size_t>(r)])), y);
  }
  return out;
}

Matrix eval_block(const KernelSpec& k, const PointSet& ps, std::span<const Index> rows,
                  std::span<const Index> cols) {
  return eval_block(k, ps, rows, ps, cols);
}

namespace {
std::vector<Index> iota_range(Index begin, Index end) {
  std::vector<Index> out(static_cast<std::size_t>(std::max<Index>(0, end - begin)));
  std::iota(out.begin(), out.end(), begin);
  return out;
}
}  // namespace

Matrix eval_block(const KernelSpec& k, const PointSet& ps, Index row_begin, Index row_end,
                  Index col_begin, Index col_end) {
  const auto rows = iota_range(row_begin, row_end);
  const auto cols = iota_range(col_begin, col_end);
  return eval_block(k, ps, rows, ps, cols);
}

Matrix eval_block(const KernelSpec& k, const PointSet& targets, const PointSet& sources) {
  const auto rows = iota_range(0, static_cast<Index>(targets.size()));
  const auto cols = iota_range(0, static_cast<Index>(sources.size()));
  return eval_block(k, targets, rows, sources, cols);
}

}  // namespace hikersolve
