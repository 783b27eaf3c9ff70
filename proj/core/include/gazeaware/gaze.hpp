#pragma once

#include <array>
#include <cstddef>

#include "gazeaware/heatmap.hpp"

namespace gazeaware {

struct GazePoint {
  double x = 0.0;  // normalized [0,1]
  double y = 0.0;
};

/// Per-frame gaze measurement: exactly 3 point slots, invalid slots allowed
/// (blinks and tracker dropouts).
struct GazeFrame {
  static constexpr int kSlots = 3;

  int frame_index = 0;
  std::array<GazePoint, kSlots> points{};
  std::array<bool, kSlots> valid{};

  int valid_count() const {
    int n = 0;
    for (bool v : valid) n += v ? 1 : 0;
    return n;
  }
};

/// 8 feature channels per pixel describing the offset to the nearest valid,
/// non-dropped gaze point: dx, dy, dx^2, dy^2, dx*dy, sqrt(dx^2+dy^2),
/// dropout bit, validity bit. Offsets are in normalized coordinates.
struct VoronoiEncoding {
  enum Channel { kDx = 0, kDy, kDx2, kDy2, kDxDy, kDist, kDropped, kValid, kChannels };

  int width = 0;
  int height = 0;
  std::array<std::vector<double>, kChannels> channels;

  double at(int channel, int x, int y) const {
    return channels[channel][static_cast<std::size_t>(y) * width + x];
  }
};

/// Sum of isotropic Gaussians (one per valid point, truncated at 4 sigma)
/// renormalized to a density. sigma is in normalized units and converts to
/// pixels via the map diagonal. Throws without a valid point or sigma <= 0.
DensityMap gaussian_splat(const GazeFrame& gaze, double sigma, int width, int height);

VoronoiEncoding voronoi_encode(const GazeFrame& gaze,
                               const std::array<bool, GazeFrame::kSlots>& dropout_mask,
                               int width, int height);

}  // namespace gazeaware
