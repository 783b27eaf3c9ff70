#pragma once

#include <vector>

#include "gazeaware/heatmap.hpp"

namespace gazeaware {

struct Fixation {
  int frame_index = 0;
  double x = 0.0;  // normalized [0,1]
  double y = 0.0;
};

struct FixationSet {
  std::vector<Fixation> fixations;
};

// Epsilon used inside all log-based metrics.
inline constexpr double kMetricEps = 1e-8;

/// KL(truth || pred) = sum truth * log((truth+eps)/(pred+eps)).
double kl_divergence(const DensityMap& truth, const DensityMap& pred);

/// Pearson correlation of pixel values; throws on zero-variance input.
double cross_correlation(const Heatmap& a, const Heatmap& b);

/// Centered Gaussian density, sigma = sigma_frac of the map diagonal. The
/// default is the information-gain baseline.
DensityMap center_prior(int width, int height, double sigma_frac = 0.25);

/// Mean over fixations of log2(pred+eps) - log2(baseline+eps) at the fixated
/// pixel (nearest pixel). Throws on an empty fixation set.
double information_gain(const DensityMap& pred, const FixationSet& fixations,
                        const DensityMap& baseline);

}  // namespace gazeaware
