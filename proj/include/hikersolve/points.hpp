#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hikersolve {

/// n points in d dimensions, row-major.
class PointSet {
 public:
  PointSet() = default;
  PointSet(std::size_t n, std::size_t d);
  PointSet(std::size_t n, std::size_t d, std::vector<double> coords);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }

  std::span<const double> point(std::size_t i) const noexcept {
    return {coords_.data() + i * d_, d_};
  }
  std::span<double> point(std::size_t i) noexcept { return {coords_.data() + i * d_, d_}; }
  double operator()(std::size_t i, std::size_t k) const noexcept { return coords_[i * d_ + k]; }
  double& operator()(std::size_t i, std::size_t k) noexcept { return coords_[i * d_ + k]; }

  const std::vector<double>& coords() const noexcept { return coords_; }

  /// Rows in the given order: out[i] = this[order[i]].
  PointSet permuted(std::span<const std::size_t> order) const;

  /// Throws if any coordinate is NaN/Inf or the set is empty.
  void validate() const;

  friend bool operator==(const PointSet&, const PointSet&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> coords_;
};

enum class Shape { uniform_cube, sphere_surface, gaussian_mixture };

Shape parse_shape(const std::string& name);
std::string to_string(Shape shape);

struct GeneratorSpec {
  Shape shape = Shape::uniform_cube;
  std::size_t dim = 3;
  /// Number of mixture components (gaussian_mixture only).
  std::size_t clusters = 4;
};

/// Mixture components are isotropic with this standard deviation; centers
/// are drawn in the unit cube at least 10 sigma apart when possible.
inline constexpr double kMixtureSigma = 0.05;

struct MixtureSample {
  PointSet points;
  std::vector<std::size_t> labels;
  PointSet centers;
};

PointSet generate(const GeneratorSpec& spec, std::size_t n, std::uint64_t seed);
/// gaussian_mixture with ground-truth labels and centers.
MixtureSample generate_mixture(std::size_t dim, std::size_t clusters, std::size_t n,
                               std::uint64_t seed);

/// Rescales each coordinate affinely onto [0, 1]; constant coordinates map to 0.
PointSet normalize_unit_box(const PointSet& ps);

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class FileFormat { binary, csv };

/// Picks csv for a ".csv" extension, binary otherwise.
FileFormat format_for_path(const std::filesystem::path& path);

/// Binary layout: "PTS1", u64 n, u64 d (little-endian), then n*d
/// little-endian IEEE-754 doubles, row-major.
PointSet load_points(const std::filesystem::path& path, FileFormat format);
void save_points(const PointSet& ps, const std::filesystem::path& path, FileFormat format);

PointSet parse_points_binary(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> encode_points_binary(const PointSet& ps);
PointSet parse_points_csv(const std::string& text);
std::string encode_points_csv(const PointSet& ps);

}  // namespace hikersolve
