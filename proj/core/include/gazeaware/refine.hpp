#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "gazeaware/gaze.hpp"
#include "gazeaware/heatmap.hpp"

namespace gazeaware {

/// Spatially-varying additive Gaussian noise: per coordinate
/// sigma = max(sigma_n, w * |x - x0|).
struct NoiseModel {
  double sigma_n = 0.03;
  double w = 0.1;
  double center_x = 0.5;
  double center_y = 0.5;
  std::uint64_t seed = 0;
};

/// Noisy copies of the gaze frames, clamped to [0,1]; bit-reproducible for a
/// fixed seed. Invalid slots pass through untouched.
std::vector<GazeFrame> apply_noise(const std::vector<GazeFrame>& true_gaze,
                                   const NoiseModel& model);

struct Affine2D {
  double a11 = 1.0, a12 = 0.0, a21 = 0.0, a22 = 1.0;
  double bx = 0.0, by = 0.0;

  GazePoint apply(GazePoint p) const {
    return {a11 * p.x + a12 * p.y + bx, a21 * p.x + a22 * p.y + by};
  }
  double det() const { return a11 * a22 - a12 * a21; }
  Affine2D inverse() const;  // throws on a singular matrix
};

struct AffineCorruption {
  std::vector<GazeFrame> gaze;
  Affine2D transform;
};

/// Miscalibration as an affine map: identity plus N(0, sigma_n^2) drawn once
/// per sequence on every matrix and vector element. Points are not clamped
/// so the transform stays exactly recoverable.
AffineCorruption apply_affine_corruption(const std::vector<GazeFrame>& gaze, double sigma_n,
                                         std::uint64_t seed);

std::vector<GazeFrame> apply_affine(const std::vector<GazeFrame>& gaze, const Affine2D& t);

struct MeanShiftConfig {
  double bandwidth_px = 1.0;
  int max_iterations = 100;
  double epsilon_px = 0.01;

  /// Paper rule: bandwidth = sigma_n * sqrt(W^2 + H^2), floored to keep the
  /// config valid for tiny noise levels.
  static MeanShiftConfig for_noise(double sigma_n, int width, int height);
};

struct PixelPoint {
  double x = 0.0;
  double y = 0.0;
};

/// One kernel-weighted mean update of the meanshift iteration.
PixelPoint meanshift_step(PixelPoint at, const Heatmap& density, double bandwidth_px);

/// Gaussian-kernel meanshift mode seeking on a density grid. Throws when the
/// kernel-weighted mass at the start point is zero.
PixelPoint meanshift(PixelPoint start, const Heatmap& density, const MeanShiftConfig& config);

/// One-hidden-layer correction network with an affine pass-through:
/// out = A0 x + b + W2 * tanh(W1 x + b1).
struct CorrectionNet {
  int hidden = 16;
  std::array<double, 4> a0{1.0, 0.0, 0.0, 1.0};  // row-major 2x2 pass-through
  std::array<double, 2> b{0.0, 0.0};
  std::vector<double> w1;  // hidden x 2
  std::vector<double> b1;  // hidden
  std::vector<double> w2;  // 2 x hidden

  GazePoint apply(GazePoint p) const;

  /// Identity pass-through plus small output noise on the hidden path.
  static CorrectionNet near_identity(int hidden, double noise_scale, std::uint64_t seed);
};

enum class FitMode { kSelfSupervised, kSupervised };

struct CorrectionFitConfig {
  int hidden = 16;
  double learning_rate = 1e-2;  // initial; backtracking halves on increase
  int iterations = 1500;
  double init_noise = 1e-3;
  double supervised_sigma = 0.0347;  // width of the Gaussian around true gaze
  std::uint64_t seed = 0;
};

struct CorrectionFitResult {
  CorrectionNet net;
  double initial_loss = 0.0;
  double final_loss = 0.0;
  int iterations = 0;
};

/// Fits the correction net by gradient descent on the mean NLL of corrected
/// points under a per-frame density: the supplied maps (self-supervised) or
/// a Gaussian around the true gaze (supervised). Needs >= 50 valid samples.
CorrectionFitResult fit_correction(const std::vector<GazeFrame>& corrupted, FitMode mode,
                                   const std::vector<DensityMap>* frame_densities,
                                   const std::vector<GazeFrame>* true_gaze,
                                   const CorrectionFitConfig& config);

/// Least-squares affine restriction of the net on a 16x16 grid of [0,1]^2,
/// compared element-wise against corrupt^-1: sum of squared differences over
/// the 6 affine elements.
double calibration_error(const CorrectionNet& net, const Affine2D& corrupt);

}  // namespace gazeaware
