#pragma once

#include <filesystem>

#include "gazeaware/gaze.hpp"
#include "gazeaware/heatmap.hpp"

namespace gazeaware {

struct SaliencyParams {
  double center_prior_weight = 0.2;
  int surround_small_radius = 2;   // box blur radii, pixels
  int surround_large_radius = 9;
  double prior_sigma_frac = 0.25;  // of the map diagonal
};

/// Center-surround contrast (difference of two box-blur scales) blended with
/// a centered Gaussian prior. A constant frame degenerates to the pure prior.
/// Requires at least a 16x16 frame.
DensityMap compute_saliency(const Heatmap& frame, const SaliencyParams& params = {});

/// (1-lambda) * saliency + lambda * gaussian_splat(noisy_gaze, kernel_sigma).
/// Returns the saliency untouched when no gaze point is valid.
DensityMap gaze_conditioned_density(const DensityMap& saliency, const GazeFrame& noisy_gaze,
                                    double lambda, double kernel_sigma);

/// Emits per-frame saliency densities, either computed from the frame or
/// loaded from sal_{frame:06}.pgm files (renormalized on load).
class SaliencyProvider {
 public:
  static SaliencyProvider computed(const SaliencyParams& params = {});
  static SaliencyProvider file_backed(std::filesystem::path directory);

  DensityMap get(int frame_index, const Heatmap& frame) const;

 private:
  SaliencyProvider() = default;
  bool file_backed_ = false;
  SaliencyParams params_;
  std::filesystem::path directory_;
};

}  // namespace gazeaware
