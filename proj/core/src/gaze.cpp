#include "gazeaware/gaze.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gazeaware {

DensityMap gaussian_splat(const GazeFrame& gaze, double sigma, int width, int height) {
  if (sigma <= 0.0) {
    throw std::invalid_argument("gaussian_splat: sigma must be positive");
  }
  if (gaze.valid_count() == 0) {
    throw std::invalid_argument("gaussian_splat: no valid gaze point");
  }
  Heatmap acc(width, height);
  const double sigma_px = sigma * map_diag(width, height);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma_px * sigma_px);
  const double reach = 4.0 * sigma_px;
  for (int s = 0; s < GazeFrame::kSlots; ++s) {
    if (!gaze.valid[s]) continue;
    const double cx = norm_to_px(gaze.points[s].x, width);
    const double cy = norm_to_px(gaze.points[s].y, height);
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        acc.at(x, y) += std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
      }
    }
  }
  return normalize(acc);
}

VoronoiEncoding voronoi_encode(const GazeFrame& gaze,
                               const std::array<bool, GazeFrame::kSlots>& dropout_mask,
                               int width, int height) {
  VoronoiEncoding enc;
  enc.width = width;
  enc.height = height;
  const std::size_t n = static_cast<std::size_t>(width) * height;
  for (auto& ch : enc.channels) ch.assign(n, 0.0);

  bool any_active = false;  // valid and not dropped
  bool any_valid = false;
  for (int s = 0; s < GazeFrame::kSlots; ++s) {
    any_valid = any_valid || gaze.valid[s];
    any_active = any_active || (gaze.valid[s] && !dropout_mask[s]);
  }

  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      const double px = px_to_norm(x, width);
      const double py = px_to_norm(y, height);

      // dropout bit: the nearest valid point (dropped or not) owns the cell
      if (any_valid) {
        double best = std::numeric_limits<double>::max();
        int owner = -1;
        for (int s = 0; s < GazeFrame::kSlots; ++s) {
          if (!gaze.valid[s]) continue;
          const double dx = px - gaze.points[s].x;
          const double dy = py - gaze.points[s].y;
          const double d2 = dx * dx + dy * dy;
          if (d2 < best) {
            best = d2;
            owner = s;
          }
        }
        if (owner >= 0 && dropout_mask[owner]) enc.channels[VoronoiEncoding::kDropped][i] = 1.0;
      }

      if (!any_active) continue;  // validity stays 0, distances stay 0

      double best = std::numeric_limits<double>::max();
      double bdx = 0.0, bdy = 0.0;
      for (int s = 0; s < GazeFrame::kSlots; ++s) {
        if (!gaze.valid[s] || dropout_mask[s]) continue;
        const double dx = px - gaze.points[s].x;
        const double dy = py - gaze.points[s].y;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best) {
          best = d2;
          bdx = dx;
          bdy = dy;
        }
      }
      enc.channels[VoronoiEncoding::kDx][i] = bdx;
      enc.channels[VoronoiEncoding::kDy][i] = bdy;
      enc.channels[VoronoiEncoding::kDx2][i] = bdx * bdx;
      enc.channels[VoronoiEncoding::kDy2][i] = bdy * bdy;
      enc.channels[VoronoiEncoding::kDxDy][i] = bdx * bdy;
      enc.channels[VoronoiEncoding::kDist][i] = std::sqrt(best);
      enc.channels[VoronoiEncoding::kValid][i] = 1.0;
    }
  }
  return enc;
}

}  // namespace gazeaware
