#include "gazeaware/heatmap.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace gazeaware {

FlowField negated(const FlowField& f) {
  FlowField out(f.width, f.height);
  for (std::size_t i = 0; i < f.u.size(); ++i) {
    out.u[i] = -f.u[i];
    out.v[i] = -f.v[i];
  }
  return out;
}

BilinearTaps bilinear_taps(int width, int height, double px, double py) {
  px = std::clamp(px, 0.0, static_cast<double>(width - 1));
  py = std::clamp(py, 0.0, static_cast<double>(height - 1));
  int x0 = static_cast<int>(std::floor(px));
  int y0 = static_cast<int>(std::floor(py));
  if (x0 >= width - 1) x0 = width - 2;
  if (y0 >= height - 1) y0 = height - 2;
  const double dx = px - x0;
  const double dy = py - y0;
  BilinearTaps t;
  t.x0 = x0;
  t.y0 = y0;
  t.x1 = x0 + 1;
  t.y1 = y0 + 1;
  t.w00 = (1.0 - dx) * (1.0 - dy);
  t.w10 = dx * (1.0 - dy);
  t.w01 = (1.0 - dx) * dy;
  t.w11 = dx * dy;
  return t;
}

double bilinear_sample(const Heatmap& map, double px, double py) {
  const BilinearTaps t = bilinear_taps(map.width, map.height, px, py);
  return t.w00 * map.at(t.x0, t.y0) + t.w10 * map.at(t.x1, t.y0) +
         t.w01 * map.at(t.x0, t.y1) + t.w11 * map.at(t.x1, t.y1);
}

double bilinear_sample_plane(const std::vector<double>& plane, int width, int height,
                             double px, double py) {
  const BilinearTaps t = bilinear_taps(width, height, px, py);
  const auto idx = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };
  return t.w00 * plane[idx(t.x0, t.y0)] + t.w10 * plane[idx(t.x1, t.y0)] +
         t.w01 * plane[idx(t.x0, t.y1)] + t.w11 * plane[idx(t.x1, t.y1)];
}

Heatmap warp_by_flow(const Heatmap& map, const FlowField& flow) {
  if (map.width != flow.width || map.height != flow.height) {
    throw std::invalid_argument("warp_by_flow: flow " + std::to_string(flow.width) + "x" +
                                std::to_string(flow.height) + " does not match map " +
                                std::to_string(map.width) + "x" + std::to_string(map.height));
  }
  Heatmap out(map.width, map.height);
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      const double sx = x + flow.u_at(x, y);
      const double sy = y + flow.v_at(x, y);
      out.at(x, y) = bilinear_sample(map, sx, sy);
    }
  }
  return out;
}

Heatmap advect_forward(const Heatmap& map, const FlowField& flow) {
  return warp_by_flow(map, negated(flow));
}

DensityMap normalize(const Heatmap& map) {
  Heatmap out = map;
  double sum = 0.0;
  for (double& v : out.values) {
    if (v < 0.0) v = 0.0;
    sum += v;
  }
  if (sum <= 0.0) {
    throw std::invalid_argument("normalize: map has no positive mass");
  }
  const double inv = 1.0 / sum;
  for (double& v : out.values) v *= inv;
  return DensityMap{std::move(out)};
}

}  // namespace gazeaware
