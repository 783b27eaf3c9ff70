#include "gazeaware/saliency.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include "gazeaware/io.hpp"

namespace gazeaware {

namespace {

// Clamped box mean via a summed-area table; windows shrink at the borders.
Heatmap box_mean(const Heatmap& in, int radius) {
  const int w = in.width, h = in.height;
  std::vector<double> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0.0);
  const auto sat_at = [&](int x, int y) -> double& {
    return sat[static_cast<std::size_t>(y) * (w + 1) + x];
  };
  for (int y = 1; y <= h; ++y) {
    double row = 0.0;
    for (int x = 1; x <= w; ++x) {
      row += in.at(x - 1, y - 1);
      sat_at(x, y) = sat_at(x, y - 1) + row;
    }
  }
  Heatmap out(w, h);
  for (int y = 0; y < h; ++y) {
    const int y0 = std::max(0, y - radius);
    const int y1 = std::min(h - 1, y + radius);
    for (int x = 0; x < w; ++x) {
      const int x0 = std::max(0, x - radius);
      const int x1 = std::min(w - 1, x + radius);
      const double total = sat_at(x1 + 1, y1 + 1) - sat_at(x0, y1 + 1) -
                           sat_at(x1 + 1, y0) + sat_at(x0, y0);
      out.at(x, y) = total / ((x1 - x0 + 1) * (y1 - y0 + 1));
    }
  }
  return out;
}

Heatmap center_gaussian(int width, int height, double sigma_px) {
  Heatmap g(width, height);
  const double cx = 0.5 * (width - 1);
  const double cy = 0.5 * (height - 1);
  const double inv = 1.0 / (2.0 * sigma_px * sigma_px);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx, dy = y - cy;
      g.at(x, y) = std::exp(-(dx * dx + dy * dy) * inv);
    }
  return g;
}

}  // namespace

DensityMap compute_saliency(const Heatmap& frame, const SaliencyParams& params) {
  if (frame.width < 16 || frame.height < 16) {
    throw std::invalid_argument("compute_saliency: frame must be at least 16x16");
  }
  const Heatmap fine = box_mean(frame, params.surround_small_radius);
  const Heatmap coarse = box_mean(frame, params.surround_large_radius);
  Heatmap contrast(frame.width, frame.height);
  double contrast_sum = 0.0;
  for (std::size_t i = 0; i < contrast.values.size(); ++i) {
    contrast.values[i] = std::abs(fine.values[i] - coarse.values[i]);
    contrast_sum += contrast.values[i];
  }
  const DensityMap prior =
      normalize(center_gaussian(frame.width, frame.height,
                                params.prior_sigma_frac * map_diag(frame.width, frame.height)));
  if (contrast_sum <= 0.0) {
    return prior;  // no contrast signal
  }
  const DensityMap contrast_density = normalize(contrast);
  Heatmap blend(frame.width, frame.height);
  const double w = params.center_prior_weight;
  for (std::size_t i = 0; i < blend.values.size(); ++i) {
    blend.values[i] = (1.0 - w) * contrast_density.map.values[i] + w * prior.map.values[i];
  }
  return DensityMap{std::move(blend)};
}

DensityMap gaze_conditioned_density(const DensityMap& saliency, const GazeFrame& noisy_gaze,
                                    double lambda, double kernel_sigma) {
  if (noisy_gaze.valid_count() == 0 || lambda == 0.0) {
    return saliency;
  }
  const DensityMap splat =
      gaussian_splat(noisy_gaze, kernel_sigma, saliency.map.width, saliency.map.height);
  if (lambda == 1.0) {
    return splat;
  }
  Heatmap blend(saliency.map.width, saliency.map.height);
  for (std::size_t i = 0; i < blend.values.size(); ++i) {
    blend.values[i] = (1.0 - lambda) * saliency.map.values[i] + lambda * splat.map.values[i];
  }
  return DensityMap{std::move(blend)};
}

SaliencyProvider SaliencyProvider::computed(const SaliencyParams& params) {
  SaliencyProvider p;
  p.params_ = params;
  return p;
}

SaliencyProvider SaliencyProvider::file_backed(std::filesystem::path directory) {
  SaliencyProvider p;
  p.file_backed_ = true;
  p.directory_ = std::move(directory);
  return p;
}

DensityMap SaliencyProvider::get(int frame_index, const Heatmap& frame) const {
  if (!file_backed_) {
    return compute_saliency(frame, params_);
  }
  char name[32];
  std::snprintf(name, sizeof(name), "sal_%06d.pgm", frame_index);
  return normalize(read_heatmap_pgm(directory_ / name));
}

}  // namespace gazeaware
