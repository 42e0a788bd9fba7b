#include "hikersolve/points.hpp"

#include "hikersolve/random.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace hikersolve {

PointSet::PointSet(std::size_t n, std::size_t d) : n_(n), d_(d), coords_(n * d, 0.0) {}

PointSet::PointSet(std::size_t n, std::size_t d, std::vector<double> coords)
    : n_(n), d_(d), coords_(std::move(coords)) {
  if (coords_.size() != n * d) throw std::invalid_argument("PointSet: coordinate count != n*d");
}

PointSet PointSet::permuted(std::span<const std::size_t> order) const {
  PointSet out(order.size(), d_);
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto src = point(order[i]);
    std::copy(src.begin(), src.end(), out.point(i).begin());
  }
  return out;
}

void PointSet::validate() const {
  if (n_ == 0) throw std::invalid_argument("point set is empty");
  if (d_ == 0) throw std::invalid_argument("point dimension must be >= 1");
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      std::ostringstream os;
      os << "non-finite coordinate at point " << i / d_ << ", component " << i % d_;
      throw std::invalid_argument(os.str());
    }
  }
}

Shape parse_shape(const std::string& name) {
  if (name == "cube" || name == "uniform_cube" || name == "uniform-cube") return Shape::uniform_cube;
  if (name == "sphere" || name == "sphere_surface" || name == "sphere-surface")
    return Shape::sphere_surface;
  if (name == "mixture" || name == "gaussian_mixture" || name == "gaussian-mixture")
    return Shape::gaussian_mixture;
  throw std::invalid_argument("unknown shape '" + name + "'");
}

std::string to_string(Shape shape) {
  switch (shape) {
    case Shape::uniform_cube: return "uniform_cube";
    case Shape::sphere_surface: return "sphere_surface";
    case Shape::gaussian_mixture: return "gaussian_mixture";
  }
  return "unknown";
}

namespace {

PointSet mixture_centers(std::size_t dim, std::size_t clusters, Rng& rng) {
  PointSet centers(clusters, dim);
  const double min_sep = 10.0 * kMixtureSigma;
  for (std::size_t c = 0; c < clusters; ++c) {
    for (int attempt = 0; attempt < 1000; ++attempt) {
      for (std::size_t k = 0; k < dim; ++k) centers(c, k) = rng.uniform();
      bool ok = true;
      for (std::size_t o = 0; o < c && ok; ++o) {
        double d2 = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double diff = centers(c, k) - centers(o, k);
          d2 += diff * diff;
        }
        ok = d2 >= min_sep * min_sep;
      }
      if (ok) break;
    }
  }
  return centers;
}

}  // namespace

MixtureSample generate_mixture(std::size_t dim, std::size_t clusters, std::size_t n,
                               std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate: n must be >= 1");
  if (dim == 0) throw std::invalid_argument("generate: dimension must be >= 1");
  if (clusters == 0) throw std::invalid_argument("generate: clusters must be >= 1");
  Rng center_rng(derive_seed(seed, 1));
  Rng rng(derive_seed(seed, 2));
  MixtureSample out{PointSet(n, dim), std::vector<std::size_t>(n), mixture_centers(dim, clusters, center_rng)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = static_cast<std::size_t>(rng.below(clusters));
    out.labels[i] = c;
    for (std::size_t k = 0; k < dim; ++k)
      out.points(i, k) = out.centers(c, k) + kMixtureSigma * rng.normal();
  }
  return out;
}

PointSet generate(const GeneratorSpec& spec, std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("generate: n must be >= 1");
  if (spec.dim == 0) throw std::invalid_argument("generate: dimension must be >= 1");
  switch (spec.shape) {
    case Shape::uniform_cube: {
      Rng rng(seed);
      PointSet ps(n, spec.dim);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < spec.dim; ++k) ps(i, k) = rng.uniform();
      return ps;
    }
    case Shape::sphere_surface: {
      Rng rng(seed);
      PointSet ps(n, spec.dim);
      for (std::size_t i = 0; i < n; ++i) {
        auto x = ps.point(i);
        double norm2 = 0.0;
        while (norm2 < 1e-20) {
          norm2 = 0.0;
          for (double& v : x) {
            v = rng.normal();
            norm2 += v * v;
          }
        }
        const double inv = 1.0 / std::sqrt(norm2);
        for (double& v : x) v *= inv;
      }
      return ps;
    }
    case Shape::gaussian_mixture:
      return generate_mixture(spec.dim, spec.clusters, n, seed).points;
  }
  throw std::invalid_argument("generate: unknown shape");
}

PointSet normalize_unit_box(const PointSet& ps) {
  PointSet out = ps;
  for (std::size_t k = 0; k < ps.dim(); ++k) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      lo = std::min(lo, ps(i, k));
      hi = std::max(hi, ps(i, k));
    }
    const double span = hi - lo;
    for (std::size_t i = 0; i < ps.size(); ++i)
      out(i, k) = span > 0.0 ? (ps(i, k) - lo) / span : 0.0;
  }
  return out;
}

FileFormat format_for_path(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? FileFormat::csv : FileFormat::binary;
}

namespace {

constexpr std::size_t kHeaderBytes = 20;

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<std::uint8_t>(v >> (8 * b)));
}

std::uint64_t get_u64(std::span<const std::uint8_t> bytes, std::size_t offset) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(bytes[offset + b]) << (8 * b);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_points_binary(const PointSet& ps) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + ps.coords().size() * 8);
  for (char c : {'P', 'T', 'S', '1'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u64(out, ps.size());
  put_u64(out, ps.dim());
  for (double v : ps.coords()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  return out;
}

PointSet parse_points_binary(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), "PTS1", 4) != 0)
    throw FormatError("bad magic at byte 0 (expected \"PTS1\")");
  if (bytes.size() < kHeaderBytes) {
    std::ostringstream os;
    os << "truncated header: " << bytes.size() << " bytes, need " << kHeaderBytes;
    throw FormatError(os.str());
  }
  const std::uint64_t n = get_u64(bytes, 4);
  const std::uint64_t d = get_u64(bytes, 12);
  const std::uint64_t payload = bytes.size() - kHeaderBytes;
  if (d != 0 && n > payload / 8 / d) {
    std::ostringstream os;
    os << "truncated payload at byte " << bytes.size() << ": header declares n=" << n
       << ", d=" << d << " (" << kHeaderBytes + n * d * 8 << " bytes)";
    throw FormatError(os.str());
  }
  if (payload != n * d * 8) {
    std::ostringstream os;
    os << "trailing data at byte " << kHeaderBytes + n * d * 8;
    throw FormatError(os.str());
  }
  std::vector<double> coords(n * d);
  for (std::size_t i = 0; i < coords.size(); ++i)
    coords[i] = std::bit_cast<double>(get_u64(bytes, kHeaderBytes + 8 * i));
  return PointSet(n, d, std::move(coords));
}

std::string encode_points_csv(const PointSet& ps) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (std::size_t k = 0; k < ps.dim(); ++k) {
      if (k) out.push_back(',');
      auto res = std::to_chars(buf, buf + sizeof buf, ps(i, k));
      out.append(buf, res.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

PointSet parse_points_csv(const std::string& text) {
  std::vector<double> coords;
  std::size_t d = 0;
  std::size_t n = 0;
  std::size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::size_t fields = 0;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      const std::size_t end = comma == std::string::npos ? line.size() : comma;
      std::size_t b = pos;
      std::size_t e = end;
      while (b < e && (line[b] == ' ' || line[b] == '\t')) ++b;
      while (e > b && (line[e - 1] == ' ' || line[e - 1] == '\t')) --e;
      if (b < e && line[b] == '+') ++b;
      double value = 0.0;
      auto res = std::from_chars(line.data() + b, line.data() + e, value);
      if (b == e || res.ec != std::errc{} || res.ptr != line.data() + e) {
        std::ostringstream os;
        os << "non-numeric CSV cell at line " << line_no << ", column " << fields + 1 << ": '"
           << line.substr(pos, end - pos) << "'";
        throw FormatError(os.str());
      }
      coords.push_back(value);
      ++fields;
      if (comma == std::string::npos) break;
      pos = comma + 1;
    }
    if (d == 0) {
      d = fields;
    } else if (fields != d) {
      std::ostringstream os;
      os << "inconsistent CSV row width at line " << line_no << ": " << fields << " fields, expected "
         << d;
      throw FormatError(os.str());
    }
    ++n;
  }
  if (n == 0) throw FormatError("empty CSV input");
  return PointSet(n, d, std::move(coords));
}

PointSet load_points(const std::filesystem::path& path, FileFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path.string() + "'");
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (format == FileFormat::csv) return parse_points_csv(data);
  return parse_points_binary(
      std::span(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

void save_points(const PointSet& ps, const std::filesystem::path& path, FileFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write '" + path.string() + "'");
  if (format == FileFormat::csv) {
    out << encode_points_csv(ps);
  } else {
    const auto bytes = encode_points_binary(ps);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
  if (!out) throw FormatError("write failed for '" + path.string() + "'");
}

}  // namespace hikersolve
