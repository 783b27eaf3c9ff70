#pragma once

#include <cmath>
#include <vector>

namespace gazeaware {

/// Row-major scalar grid; the shared carrier for scene frames, saliency,
/// gaze density and awareness maps. Minimum size 2x2.
struct Heatmap {
  int width = 0;
  int height = 0;
  std::vector<double> values;  // values[y * width + x]

  Heatmap() = default;
  Heatmap(int w, int h, double fill = 0.0)
      : width(w), height(h), values(static_cast<std::size_t>(w) * h, fill) {}

  static Heatmap zeros(int w, int h) { return Heatmap(w, h, 0.0); }
  static Heatmap constant(int w, int h, double v) { return Heatmap(w, h, v); }

  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }
  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }

  std::size_t size() const { return values.size(); }

  double sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }

  bool finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  bool same_size(const Heatmap& o) const { return width == o.width && height == o.height; }
};

/// Heatmap that is nonnegative and sums to 1. The constructing operations
/// (normalize, gaussian_splat, saliency providers) enforce the invariants.
struct DensityMap {
  Heatmap map;
};

/// Per-pixel displacement in pixels/frame linking frame t to t+1.
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<double> u;  // horizontal, row-major
  std::vector<double> v;  // vertical

  FlowField() = default;
  FlowField(int w, int h)
      : width(w),
        height(h),
        u(static_cast<std::size_t>(w) * h, 0.0),
        v(static_cast<std::size_t>(w) * h, 0.0) {}

  static FlowField zero(int w, int h) { return FlowField(w, h); }

  double u_at(int x, int y) const { return u[static_cast<std::size_t>(y) * width + x]; }
  double v_at(int x, int y) const { return v[static_cast<std::size_t>(y) * width + x]; }
};

FlowField negated(const FlowField& f);

// Normalized [0,1] coordinates map to pixels via px = x * (W - 1).
inline double norm_to_px(double coord, int extent) { return coord * (extent - 1); }
inline double px_to_norm(double px, int extent) { return px / (extent - 1); }

// Pixel diagonal sqrt(W^2 + H^2); converts normalized sigmas to pixels.
inline double map_diag(int width, int height) {
  return std::hypot(static_cast<double>(width), static_cast<double>(height));
}

/// Four-tap footprint of a clamped bilinear lookup; shared by the sampling
/// and the gradient code paths.
struct BilinearTaps {
  int x0, y0, x1, y1;
  double w00, w10, w01, w11;
};

BilinearTaps bilinear_taps(int width, int height, double px, double py);

/// Bilinear interpolation at continuous pixel coordinates, clamp-to-edge.
double bilinear_sample(const Heatmap& map, double px, double py);

double bilinear_sample_plane(const std::vector<double>& plane, int width, int height,
                             double px, double py);

/// out(x) = map(x + flow(x)); the backward lookup that aligns frame t+1 onto
/// frame t coordinates. Throws on dimension mismatch.
Heatmap warp_by_flow(const Heatmap& map, const FlowField& flow);

/// Forward advection: content rides along with the flow. Equivalent to
/// warping with the negated field.
Heatmap advect_forward(const Heatmap& map, const FlowField& flow);

/// Clip negatives to zero and divide by the sum. Throws if nothing positive
/// remains.
DensityMap normalize(const Heatmap& map);

}  // namespace gazeaware
