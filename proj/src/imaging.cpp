#include "saa/imaging.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>

#include "saa/errors.hpp"

namespace saa::imaging {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void require_transform_dims(int width, int height, int levels) {
  if (levels < 1) {
    throw std::invalid_argument("haar: levels must be >= 1");
  }
  const int factor = 1 << levels;
  if (width < factor || height < factor || width % factor != 0 ||
      height % factor != 0) {
    throw std::invalid_argument(
        "haar: dimensions must be divisible by 2^levels (" +
        std::to_string(width) + "x" + std::to_string(height) + ", levels " +
        std::to_string(levels) + ")");
  }
}

// One orthonormal Haar split of the first n entries (n even) of a strided
// sequence: first half averages, second half differences.
void haar_split(double* data, int n, int stride, std::vector<double>& tmp) {
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    const double a = data[(2 * i) * stride];
    const double b = data[(2 * i + 1) * stride];
    tmp[i] = (a + b) * kInvSqrt2;
    tmp[half + i] = (a - b) * kInvSqrt2;
  }
  for (int i = 0; i < n; ++i) data[i * stride] = tmp[i];
}

void haar_merge(double* data, int n, int stride, std::vector<double>& tmp) {
  const int half = n / 2;
  for (int i = 0; i < half; ++i) {
    const double s = data[i * stride];
    const double d = data[(half + i) * stride];
    tmp[2 * i] = (s + d) * kInvSqrt2;
    tmp[2 * i + 1] = (s - d) * kInvSqrt2;
  }
  for (int i = 0; i < n; ++i) data[i * stride] = tmp[i];
}

// Copies one band between the in-place quadrant buffer and the packed
// vector. Band layout in the packed vector: approximation band first, then
// per level (coarsest first) the horizontal, vertical, diagonal bands.
void copy_band(double* quad, double* packed, int quad_width, int w, int h,
               int col0, int row0, bool to_packed) {
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double& q = quad[(row0 + r) * quad_width + (col0 + c)];
      double& b = packed[r * w + c];
      if (to_packed) {
        b = q;
      } else {
        q = b;
      }
    }
  }
}

void pack_or_unpack(Eigen::VectorXd& quad, Eigen::VectorXd& packed, int width,
                    int height, int levels, bool to_packed) {
  int offset = 0;
  const int wa = width >> levels;
  const int ha = height >> levels;
  copy_band(quad.data(), packed.data() + offset, width, wa, ha, 0, 0, to_packed);
  offset += wa * ha;
  for (int level = levels; level >= 1; --level) {
    const int w = width >> level;  // detail band size at this level
    const int h = height >> level;
    copy_band(quad.data(), packed.data() + offset, width, w, h, w, 0, to_packed);
    offset += w * h;  // horizontal: detail along rows
    copy_band(quad.data(), packed.data() + offset, width, w, h, 0, h, to_packed);
    offset += w * h;  // vertical: detail along columns
    copy_band(quad.data(), packed.data() + offset, width, w, h, w, h, to_packed);
    offset += w * h;  // diagonal
  }
}

}  // namespace

WaveletCoeffs haar_analysis(const GrayImage& img, int levels) {
  require_transform_dims(img.width, img.height, levels);
  Eigen::VectorXd work = img.pixels;
  std::vector<double> tmp(std::max(img.width, img.height));
  for (int level = 0; level < levels; ++level) {
    const int w = img.width >> level;
    const int h = img.height >> level;
    for (int r = 0; r < h; ++r) {
      haar_split(work.data() + r * img.width, w, 1, tmp);
    }
    for (int c = 0; c < w; ++c) {
      haar_split(work.data() + c, h, img.width, tmp);
    }
  }
  WaveletCoeffs coeffs;
  coeffs.width = img.width;
  coeffs.height = img.height;
  coeffs.levels = levels;
  coeffs.values.resize(img.width * img.height);
  pack_or_unpack(work, coeffs.values, img.width, img.height, levels, true);
  return coeffs;
}

GrayImage haar_synthesis(const WaveletCoeffs& coeffs) {
  require_transform_dims(coeffs.width, coeffs.height, coeffs.levels);
  if (coeffs.values.size() !=
      static_cast<Eigen::Index>(coeffs.width) * coeffs.height) {
    throw std::invalid_argument("haar_synthesis: coefficient length mismatch");
  }
  Eigen::VectorXd work(coeffs.width * coeffs.height);
  Eigen::VectorXd packed = coeffs.values;
  work.setZero();
  pack_or_unpack(work, packed, coeffs.width, coeffs.height, coeffs.levels,
                 false);
  std::vector<double> tmp(std::max(coeffs.width, coeffs.height));
  for (int level = coeffs.levels - 1; level >= 0; --level) {
    const int w = coeffs.width >> level;
    const int h = coeffs.height >> level;
    for (int c = 0; c < w; ++c) {
      haar_merge(work.data() + c, h, coeffs.width, tmp);
    }
    for (int r = 0; r < h; ++r) {
      haar_merge(work.data() + r * coeffs.width, w, 1, tmp);
    }
  }
  GrayImage img;
  img.width = coeffs.width;
  img.height = coeffs.height;
  img.pixels = std::move(work);
  return img;
}

double psnr(const GrayImage& original, const GrayImage& reconstructed) {
  if (original.width != reconstructed.width ||
      original.height != reconstructed.height) {
    throw std::invalid_argument("psnr: image dimensions differ");
  }
  const double mse = (original.pixels - reconstructed.pixels).squaredNorm() /
                     (static_cast<double>(original.width) * original.height);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

GrayImage make_phantom(int width, int height) {
  if (width < 2 || height < 2) {
    throw std::invalid_argument("make_phantom: image too small");
  }
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(width * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) / (width - 1);
      const double fy = static_cast<double>(y) / (height - 1);
      double value = 30.0 + 60.0 * fx + 25.0 * fy;  // smooth background
      const double dx = fx - 0.35;
      const double dy = fy - 0.38;
      if (dx * dx + dy * dy <= 0.18 * 0.18) value = 220.0;  // bright disk
      if (fx >= 0.55 && fx <= 0.85 && fy >= 0.55 && fy <= 0.80) value = 160.0;
      if (fx >= 0.12 && fx <= 0.24 && fy >= 0.62 && fy <= 0.86) value = 90.0;
      img.at(x, y) = value;
    }
  }
  return img;
}

GrayImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::invalid_argument("read_pgm: cannot open " + path);
  }
  std::string magic;
  in >> magic;
  if (magic != "P5") {
    throw std::invalid_argument("read_pgm: not a binary PGM (P5): " + path);
  }
  auto next_int = [&in, &path]() {
    // Skip whitespace and '#' comment lines between header fields.
    int c = in.get();
    while (c != EOF && (std::isspace(c) || c == '#')) {
      if (c == '#') {
        while (c != EOF && c != '\n') c = in.get();
      }
      c = in.get();
    }
    int value = 0;
    bool any = false;
    while (c != EOF && std::isdigit(c)) {
      value = value * 10 + (c - '0');
      any = true;
      c = in.get();
    }
    if (!any) throw std::invalid_argument("read_pgm: malformed header in " + path);
    return value;
  };
  const int width = next_int();
  const int height = next_int();
  const int maxval = next_int();
  if (width < 1 || height < 1 || maxval != 255) {
    throw std::invalid_argument("read_pgm: unsupported header in " + path);
  }
  // next_int already consumed the single separator byte after maxval, so the
  // stream sits at the first pixel.
  std::vector<unsigned char> raw(static_cast<std::size_t>(width) * height);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (!in) {
    throw std::invalid_argument("read_pgm: truncated pixel data in " + path);
  }
  GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.resize(width * height);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    img.pixels[static_cast<Eigen::Index>(i)] = raw[i];
  }
  return img;
}

void write_pgm(const GrayImage& img, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::invalid_argument("write_pgm: cannot open " + path);
  }
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  std::vector<unsigned char> raw(static_cast<std::size_t>(img.width) *
                                 img.height);
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double v =
        std::clamp(img.pixels[static_cast<Eigen::Index>(i)], 0.0, 255.0);
    raw[i] = static_cast<unsigned char>(std::lround(v));
  }
  out.write(reinterpret_cast<const char*>(raw.data()),
            static_cast<std::streamsize>(raw.size()));
  if (!out) {
    throw numerical_error("write_pgm: write failed for " + path);
  }
}

ReconstructionReport reconstruct_image(const GrayImage& img,
                                       const BlockDictionary& a,
                                       const SolverConfig& cfg,
                                       const std::vector<int>& record_iters,
                                       SolverKind solver, int levels) {
  require_transform_dims(img.width, img.height, levels);
  const Eigen::Index n = static_cast<Eigen::Index>(img.width) * img.height;
  if (a.block_count() != 2 || a.cols() != n) {
    throw std::invalid_argument(
        "reconstruct_image: dictionary must have p = 2 and pm = width*height");
  }
  if (record_iters.empty()) {
    throw std::invalid_argument("reconstruct_image: no iterations requested");
  }
  for (int it : record_iters) {
    if (it < 1) {
      throw std::invalid_argument("reconstruct_image: iterations must be >= 1");
    }
  }
  if (solver != SolverKind::Tsaa && solver != SolverKind::Iht) {
    throw std::invalid_argument("reconstruct_image: solver must be TSAA or IHT");
  }

  const int m = a.block_dim();
  SolverConfig run_cfg = cfg;
  run_cfg.sparsity = cfg.sparsity > 0 ? cfg.sparsity : m / 3;
  run_cfg.tau = run_cfg.tau < 0 ? -1 : run_cfg.tau;
  run_cfg.validate();

  const WaveletCoeffs coeffs = haar_analysis(img, levels);
  const Eigen::VectorXd y = a.apply(coeffs.values);
  const int last = *std::max_element(record_iters.begin(), record_iters.end());

  ReconstructionReport report;
  report.sparsity = run_cfg.sparsity;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a.cols());
  SolverState state;
  if (solver == SolverKind::Tsaa) state = tsaa_init(a, y);

  WaveletCoeffs current = coeffs;
  for (int it = 1; it <= last; ++it) {
    if (solver == SolverKind::Tsaa) {
      state = tsaa_step(std::move(state), a, y, run_cfg);
      x = state.x;
    } else {
      x = hard_threshold(x + a.adjoint(y - a.apply(x)), run_cfg.sparsity);
    }
    if (std::find(record_iters.begin(), record_iters.end(), it) !=
        record_iters.end()) {
      current.values = x;
      report.psnr_trace.emplace_back(it, psnr(img, haar_synthesis(current)));
    }
  }
  current.values = x;
  report.image = haar_synthesis(current);
  return report;
}

std::string psnr_trace_csv(const std::vector<std::pair<int, double>>& trace) {
  std::string out = "iteration,psnr_db\n";
  for (const auto& [iteration, value] : trace) {
    out += std::to_string(iteration);
    out += ',';
    if (std::isinf(value)) {
      out += "inf";
    } else {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%.6f", value);
      out += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace saa::imaging
