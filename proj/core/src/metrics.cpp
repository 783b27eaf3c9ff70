#include "gazeaware/metrics.hpp"

#include <cmath>
#include <stdexcept>

namespace gazeaware {

double kl_divergence(const DensityMap& truth, const DensityMap& pred) {
  if (!truth.map.same_size(pred.map)) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  double kl = 0.0;
  for (std::size_t i = 0; i < truth.map.values.size(); ++i) {
    const double t = truth.map.values[i];
    const double p = pred.map.values[i];
    kl += t * std::log((t + kMetricEps) / (p + kMetricEps));
  }
  return kl;
}

double cross_correlation(const Heatmap& a, const Heatmap& b) {
  if (!a.same_size(b)) {
    throw std::invalid_argument("cross_correlation: dimension mismatch");
  }
  const std::size_t n = a.values.size();
  const double mean_a = a.sum() / n;
  const double mean_b = b.sum() / n;
  double cov = 0.0, var_a = 0.0, var_b = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a.values[i] - mean_a;
    const double db = b.values[i] - mean_b;
    cov += da * db;
    var_a += da * da;
    var_b += db * db;
  }
  if (var_a <= 0.0 || var_b <= 0.0) {
    throw std::invalid_argument("cross_correlation: zero-variance input");
  }
  return cov / std::sqrt(var_a * var_b);
}

DensityMap center_prior(int width, int height, double sigma_frac) {
  Heatmap g(width, height);
  const double cx = 0.5 * (width - 1);
  const double cy = 0.5 * (height - 1);
  const double sigma_px = sigma_frac * map_diag(width, height);
  const double inv = 1.0 / (2.0 * sigma_px * sigma_px);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx, dy = y - cy;
      g.at(x, y) = std::exp(-(dx * dx + dy * dy) * inv);
    }
  return normalize(g);
}

double information_gain(const DensityMap& pred, const FixationSet& fixations,
                        const DensityMap& baseline) {
  if (fixations.fixations.empty()) {
    throw std::invalid_argument("information_gain: empty fixation set");
  }
  if (!pred.map.same_size(baseline.map)) {
    throw std::invalid_argument("information_gain: dimension mismatch");
  }
  const double log2e = 1.0 / std::log(2.0);
  double total = 0.0;
  for (const Fixation& f : fixations.fixations) {
    const int px = static_cast<int>(std::lround(norm_to_px(f.x, pred.map.width)));
    const int py = static_cast<int>(std::lround(norm_to_px(f.y, pred.map.height)));
    const double p = pred.map.at(px, py);
    const double q = baseline.map.at(px, py);
    total += (std::log(p + kMetricEps) - std::log(q + kMetricEps)) * log2e;
  }
  return total / static_cast<double>(fixations.fixations.size());
}

}  // namespace gazeaware
