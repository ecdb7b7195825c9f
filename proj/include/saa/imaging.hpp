#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "saa/block_dictionary.hpp"
#include "saa/solvers.hpp"

namespace saa::imaging {

// Row-major grayscale image; pixel values live in [0, 255] but are only
// clamped when written to disk.
struct GrayImage {
  int width = 0;
  int height = 0;
  Eigen::VectorXd pixels;  // width * height, row-major

  double at(int x, int y) const { return pixels[y * width + x]; }
  double& at(int x, int y) { return pixels[y * width + x]; }
};

// Flat coefficient layout: coarsest approximation band first, then per
// level from coarsest to finest the (horizontal, vertical, diagonal)
// detail bands, each row-major. Horizontal = detail along rows,
// vertical = detail along columns, diagonal = both.
struct WaveletCoeffs {
  int width = 0;
  int height = 0;
  int levels = 0;
  Eigen::VectorXd values;
};

// Separable orthonormal Haar analysis with filters (1,1)/sqrt(2) and
// (1,-1)/sqrt(2); both dimensions must be divisible by 2^levels.
WaveletCoeffs haar_analysis(const GrayImage& img, int levels);

// Exact inverse of haar_analysis (orthonormal adjoint).
GrayImage haar_synthesis(const WaveletCoeffs& coeffs);

// 10 log10(255^2 / MSE); +infinity when MSE is exactly zero.
double psnr(const GrayImage& original, const GrayImage& reconstructed);

// Deterministic piecewise-constant shapes over a smooth gradient.
GrayImage make_phantom(int width, int height);

// Binary 8-bit PGM (P5).
GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

struct ReconstructionReport {
  GrayImage image;  // synthesis of the final iterate, unclamped
  std::vector<std::pair<int, double>> psnr_trace;  // (iteration, dB)
  int sparsity = 0;
};

// Wavelet-domain compressive reconstruction: c = W(img), y = A c, then the
// requested solver (TSAA or IHT) with K = floor(m/3) unless cfg.sparsity > 0.
// PSNR is recorded exactly at the requested iteration counts; the run stops
// at max(record_iters). A must have p = 2 and 2m = width * height.
ReconstructionReport reconstruct_image(const GrayImage& img,
                                       const BlockDictionary& a,
                                       const SolverConfig& cfg,
                                       const std::vector<int>& record_iters,
                                       SolverKind solver = SolverKind::Tsaa,
                                       int levels = 6);

// iteration,psnr_db rows; +infinity rendered as "inf".
std::string psnr_trace_csv(const std::vector<std::pair<int, double>>& trace);

}  // namespace saa::imaging
