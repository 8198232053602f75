#include "iterreg/data.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "iterreg/rng.hpp"

namespace iterreg {

namespace {

std::uint32_t read_be32(std::istream& in, std::size_t offset, const std::string& path) {
  std::array<unsigned char, 4> buf{};
  in.read(reinterpret_cast<char*>(buf.data()), 4);
  if (in.gcount() != 4) {
    throw std::runtime_error("IDX parse error in " + path + ": truncated at byte offset " +
                             std::to_string(offset));
  }
  return (std::uint32_t(buf[0]) << 24) | (std::uint32_t(buf[1]) << 16) |
         (std::uint32_t(buf[2]) << 8) | std::uint32_t(buf[3]);
}

void write_be32(std::ostream& out, std::uint32_t v) {
  const std::array<unsigned char, 4> buf = {
      static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
      static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(buf.data()), 4);
}

constexpr std::uint64_t kIdxPayloadLimit = 1ull << 30;  // 1 GiB guard

}  // namespace

std::vector<GridImage> read_idx_images(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_idx_images: cannot open " + path);

  const std::uint32_t magic = read_be32(in, 0, path);
  if (magic != kIdxImagesMagic) {
    char hex[16];
    std::snprintf(hex, sizeof hex, "0x%08x", magic);
    throw std::runtime_error("IDX parse error in " + path + ": bad image magic " + hex +
                             " at byte offset 0");
  }
  const std::uint32_t count = read_be32(in, 4, path);
  const std::uint32_t rows = read_be32(in, 8, path);
  const std::uint32_t cols = read_be32(in, 12, path);
  const std::uint64_t payload = std::uint64_t(count) * rows * cols;
  if (rows == 0 || cols == 0 || payload > kIdxPayloadLimit) {
    throw std::runtime_error("IDX parse error in " + path +
                             ": dimension overflow at byte offset 4 (count=" +
                             std::to_string(count) + ", rows=" + std::to_string(rows) +
                             ", cols=" + std::to_string(cols) + ")");
  }

  std::vector<unsigned char> bytes(payload);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(payload));
  if (static_cast<std::uint64_t>(in.gcount()) != payload) {
    throw std::runtime_error("IDX parse error in " + path + ": truncated payload at byte offset " +
                             std::to_string(16 + in.gcount()));
  }

  std::vector<GridImage> images;
  images.reserve(count);
  std::size_t pos = 0;
  for (std::uint32_t i = 0; i < count; ++i) {
    GridImage img(static_cast<int>(cols), static_cast<int>(rows));
    for (Eigen::Index p = 0; p < img.values.size(); ++p) {
      img.values[p] = bytes[pos++] / 255.0;
    }
    images.push_back(std::move(img));
  }
  return images;
}

std::vector<int> read_idx_labels(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("read_idx_labels: cannot open " + path);

  const std::uint32_t magic = read_be32(in, 0, path);
  if (magic != kIdxLabelsMagic) {
    char hex[16];
    std::snprintf(hex, sizeof hex, "0x%08x", magic);
    throw std::runtime_error("IDX parse error in " + path + ": bad label magic " + hex +
                             " at byte offset 0");
  }
  const std::uint32_t count = read_be32(in, 4, path);
  if (count > kIdxPayloadLimit) {
    throw std::runtime_error("IDX parse error in " + path + ": dimension overflow at byte offset 4");
  }
  std::vector<unsigned char> bytes(count);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(count));
  if (static_cast<std::uint64_t>(in.gcount()) != count) {
    throw std::runtime_error("IDX parse error in " + path + ": truncated payload at byte offset " +
                             std::to_string(8 + in.gcount()));
  }
  return std::vector<int>(bytes.begin(), bytes.end());
}

void write_idx_images(const std::string& path, const std::vector<GridImage>& images) {
  if (images.empty()) throw std::invalid_argument("write_idx_images: empty image list");
  for (const auto& img : images) require_same_geometry(images[0], img, "write_idx_images");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_idx_images: cannot open " + path);
  write_be32(out, kIdxImagesMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, static_cast<std::uint32_t>(images[0].height));
  write_be32(out, static_cast<std::uint32_t>(images[0].width));
  for (const auto& img : images) {
    for (Eigen::Index p = 0; p < img.values.size(); ++p) {
      const double v = std::clamp(img.values[p], 0.0, 1.0);
      out.put(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0))));
    }
  }
  if (!out) throw std::runtime_error("write_idx_images: write failed for " + path);
}

void write_idx_labels(const std::string& path, const std::vector<int>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_idx_labels: cannot open " + path);
  write_be32(out, kIdxLabelsMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  for (int l : labels) out.put(static_cast<char>(static_cast<unsigned char>(l)));
  if (!out) throw std::runtime_error("write_idx_labels: write failed for " + path);
}

// --- Phantoms ----------------------------------------------------------------

namespace {

struct Seg {
  double x0, y0, x1, y1;
};

// Stroke templates on the unit square, y axis pointing down (image rows).
std::vector<Seg> class_template(int digit) {
  auto ring = [](double cx, double cy, double rx, double ry) {
    std::vector<Seg> segs;
    const int n = 12;
    const double two_pi = 2.0 * std::acos(-1.0);
    for (int i = 0; i < n; ++i) {
      const double a0 = two_pi * i / n;
      const double a1 = two_pi * (i + 1) / n;
      segs.push_back({cx + rx * std::cos(a0), cy + ry * std::sin(a0), cx + rx * std::cos(a1),
                      cy + ry * std::sin(a1)});
    }
    return segs;
  };
  switch (digit % 10) {
    case 0:
      return ring(0.5, 0.5, 0.22, 0.30);
    case 1:
      return {{0.42, 0.28, 0.52, 0.20}, {0.52, 0.20, 0.52, 0.80}};
    case 2:
      return {{0.32, 0.30, 0.50, 0.20}, {0.50, 0.20, 0.66, 0.32}, {0.66, 0.32, 0.34, 0.78},
              {0.34, 0.78, 0.70, 0.78}};
    case 3:
      return {{0.34, 0.22, 0.64, 0.22}, {0.64, 0.22, 0.50, 0.48}, {0.50, 0.48, 0.66, 0.64},
              {0.66, 0.64, 0.52, 0.80}, {0.52, 0.80, 0.32, 0.74}};
    case 4:
      return {{0.58, 0.20, 0.34, 0.58}, {0.34, 0.58, 0.70, 0.58}, {0.58, 0.20, 0.58, 0.82}};
    case 5:
      return {{0.66, 0.20, 0.36, 0.20}, {0.36, 0.20, 0.36, 0.48}, {0.36, 0.48, 0.60, 0.48},
              {0.60, 0.48, 0.64, 0.70}, {0.64, 0.70, 0.36, 0.80}};
    case 6: {
      auto segs = ring(0.50, 0.62, 0.17, 0.18);
      segs.push_back({0.60, 0.20, 0.42, 0.50});
      return segs;
    }
    case 7:
      return {{0.32, 0.22, 0.68, 0.22}, {0.68, 0.22, 0.44, 0.80}};
    case 8: {
      auto segs = ring(0.50, 0.34, 0.15, 0.14);
      auto lower = ring(0.50, 0.66, 0.18, 0.16);
      segs.insert(segs.end(), lower.begin(), lower.end());
      return segs;
    }
    default: {  // 9
      auto segs = ring(0.50, 0.38, 0.17, 0.18);
      segs.push_back({0.66, 0.44, 0.52, 0.82});
      return segs;
    }
  }
}

double segment_distance(double px, double py, const Seg& s) {
  const double vx = s.x1 - s.x0;
  const double vy = s.y1 - s.y0;
  const double wx = px - s.x0;
  const double wy = py - s.y0;
  const double vv = vx * vx + vy * vy;
  double t = vv > 0.0 ? (wx * vx + wy * vy) / vv : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  const double dx = px - (s.x0 + t * vx);
  const double dy = py - (s.y0 + t * vy);
  return std::sqrt(dx * dx + dy * dy);
}

GridImage rasterize_phantom(const PhantomSpec& spec, int digit, Rng& rng) {
  const double shift_x = rng.uniform(-spec.jitter_shift, spec.jitter_shift);
  const double shift_y = rng.uniform(-spec.jitter_shift, spec.jitter_shift);
  const double angle = rng.uniform(-spec.jitter_rotate, spec.jitter_rotate);
  const double scale = 1.0 + rng.uniform(-spec.jitter_scale, spec.jitter_scale);
  const double thickness = spec.stroke_width * (1.0 + rng.uniform(-0.15, 0.15));

  const double ca = std::cos(angle);
  const double sa = std::sin(angle);
  auto transform = [&](double& x, double& y) {
    const double tx = (x - 0.5) * scale;
    const double ty = (y - 0.5) * scale;
    x = 0.5 + ca * tx - sa * ty + shift_x;
    y = 0.5 + sa * tx + ca * ty + shift_y;
  };

  std::vector<Seg> segs = class_template(digit);
  for (auto& s : segs) {
    transform(s.x0, s.y0);
    transform(s.x1, s.y1);
  }

  GridImage img(spec.width, spec.height);
  const double r_core = 0.5 * thickness;          // full intensity inside
  const double r_soft = r_core + 0.8;             // exact zero outside
  for (int r = 0; r < spec.height; ++r) {
    for (int c = 0; c < spec.width; ++c) {
      const double px = (c + 0.5) / spec.width;
      const double py = (r + 0.5) / spec.height;
      double best = std::numeric_limits<double>::infinity();
      for (const auto& s : segs) {
        best = std::min(best, segment_distance(px, py, s));
      }
      const double d_pixels = best * std::min(spec.width, spec.height);
      double v = 0.0;
      if (d_pixels <= r_core) {
        v = 1.0;
      } else if (d_pixels < r_soft) {
        v = (r_soft - d_pixels) / (r_soft - r_core);
      }
      img.at(r, c) = v;
    }
  }
  return img;
}

}  // namespace

Dataset generate_phantoms(const PhantomSpec& spec, std::uint64_t seed) {
  if (spec.classes < 1) throw std::invalid_argument("generate_phantoms: class count must be >= 1");
  if (spec.train_per_class < 1) {
    throw std::invalid_argument("generate_phantoms: per-class count must be >= 1");
  }
  if (spec.width < 8 || spec.height < 8) {
    throw std::invalid_argument("generate_phantoms: grid too small for stroke templates (min 8)");
  }

  Dataset ds;
  ds.source = "phantom(seed=" + std::to_string(seed) + ")";
  Rng rng(seed);
  for (int cls = 0; cls < spec.classes; ++cls) {
    for (int i = 0; i < spec.train_per_class; ++i) {
      ds.train.push_back(rasterize_phantom(spec, cls, rng));
      ds.train_labels.push_back(cls);
    }
    for (int i = 0; i < spec.validation_per_class; ++i) {
      ds.validation.push_back(rasterize_phantom(spec, cls, rng));
      ds.validation_labels.push_back(cls);
    }
  }
  return ds;
}

NoisyData add_noise(const Sinogram& y, const NoiseSpec& spec) {
  if (spec.sigma2 < 0.0) throw std::invalid_argument("add_noise: sigma2 must be >= 0");
  NoisyData out{y, 0.0};
  if (spec.sigma2 == 0.0) return out;
  const double sigma = std::sqrt(spec.sigma2);
  Rng rng(spec.seed);
  for (Eigen::Index i = 0; i < out.sinogram.values.size(); ++i) {
    out.sinogram.values[i] += sigma * rng.gaussian();
  }
  out.delta = (out.sinogram.values - y.values).norm();
  return out;
}

double relative_error(const GridImage& truth, const GridImage& rec) {
  require_same_geometry(truth, rec, "relative_error");
  const double truth_norm = truth.values.norm();
  if (truth_norm == 0.0) {
    throw std::invalid_argument("relative_error: truth image has zero norm");
  }
  return (truth.values - rec.values).norm() / truth_norm;
}

}  // namespace iterreg
