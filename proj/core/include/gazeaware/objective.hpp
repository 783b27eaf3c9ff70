#pragma once

#include <string>
#include <vector>

#include "gazeaware/gaze.hpp"
#include "gazeaware/heatmap.hpp"

namespace gazeaware {

/// Coefficients of the weighted objective. Defaults are the training-scale
/// values; desk-scale benches override them from config.
struct LossWeights {
  double alpha_g = 1.2;
  double alpha_att = 12.0;
  double alpha_aa = 1.0;
  double alpha_s_a = 100.0;
  double alpha_s_g = 5e10;
  double alpha_t = 600.0;
  double alpha_dec = 1.5e6;
  double alpha_cap = 0.01;
  double alpha_con_g = 1e7;
  double alpha_con_a = 10.0;
  double w_of = 0.5;
  double eps_dec = 0.2;
  double c1 = 0.1;  // linear penalty on awareness increase
  double c2 = 1.0;  // quadratic penalty on forgetting

  bool valid() const;
};

struct AnnotationRecord {
  int frame_index = 0;
  double x = 0.0;  // normalized
  double y = 0.0;
  double label = 0.0;  // awareness in [0,1]
};

/// A scored snippet: scene frames, awareness maps M_A, gaze density maps p_G,
/// flow between consecutive frames, gaze samples, optional annotations.
/// flows[t] links frame t to t+1 (size T-1).
struct SequenceBatch {
  int start_frame = 0;
  std::vector<Heatmap> images;
  std::vector<Heatmap> awareness;
  std::vector<Heatmap> gaze_density;
  std::vector<FlowField> flows;
  std::vector<GazeFrame> gaze;
  std::vector<AnnotationRecord> annotations;

  int frames() const { return static_cast<int>(images.size()); }
  int width() const { return images.empty() ? 0 : images.front().width; }
  int height() const { return images.empty() ? 0 : images.front().height; }
  int valid_gaze_points() const;

  /// Throws on inconsistent dimensions or sequence lengths.
  void validate() const;
};

// Epsilon in the denominator of the edge-weighted spatial term.
inline constexpr double kSpatialEps = 1e-4;
// Floor inside the gaze NLL log.
inline constexpr double kNllFloor = 1e-12;

enum class LossTerm {
  kGazeNll,
  kAtt,
  kAa,
  kSpatialAwareness,
  kSpatialGaze,
  kTemporal,
  kDecay,
  kCapacity,
};

const char* loss_term_name(LossTerm term);

// ---- individual terms ----

/// -sum log p_G at every valid gaze point (bilinear sampled, floored at
/// kNllFloor). Throws when the batch has no valid gaze point.
double loss_gaze_nll(const SequenceBatch& batch);

/// Squared error between M_A and annotated awareness labels; 0 when the
/// batch carries no in-range annotation.
double loss_att(const SequenceBatch& batch);

/// (M_A - 1)^2 at every valid gaze point.
double loss_aa(const SequenceBatch& batch);

/// Edge-weighted smoothness of one map against one image:
/// sum |grad phi|^2 / sqrt(|grad I|^2 + eps), forward differences with
/// one-sided boundary handling.
double loss_spatial(const Heatmap& phi, const Heatmap& image);

double loss_spatial_awareness(const SequenceBatch& batch);
double loss_spatial_gaze(const SequenceBatch& batch);

/// Flow-aligned asymmetric temporal term: per pixel
/// c1*(a - w_of*b)_+ + c2*((a - w_of*b)_-)^2 with a the advected next-frame
/// value and b the current value. Requires T >= 2.
double loss_temporal(const SequenceBatch& batch, const LossWeights& weights);

/// ((1 - eps_dec)*M_A(t) - M_A(t+1))^2 summed over pixels and frame pairs.
double loss_decay(const SequenceBatch& batch, const LossWeights& weights);

/// Squared change of total awareness mass between consecutive frames.
double loss_capacity(const SequenceBatch& batch);

enum class ConsistencyTarget { kGaze, kAwareness };

/// Squared difference of two runs' maps over their shared frame range.
/// Throws when the ranges do not overlap.
double loss_consistency(const SequenceBatch& run_a, const SequenceBatch& run_b,
                        ConsistencyTarget target);

// ---- weighted total ----

struct TermReport {
  std::string term;
  double value = 0.0;
  double weighted = 0.0;
  bool skipped = false;
};

struct LossBreakdown {
  double total = 0.0;
  std::vector<TermReport> terms;
};

/// Weighted sum of all terms with a per-term report; terms with unmet
/// preconditions are reported as skipped. Consistency terms are evaluated
/// against consistency_run when provided.
LossBreakdown total_loss(const SequenceBatch& batch, const LossWeights& weights,
                         const SequenceBatch* consistency_run = nullptr);

// ---- gradients ----

/// Per-frame gradient grids; d_awareness w.r.t. M_A, d_gaze_density w.r.t.
/// p_G. Terms fill only the grids they touch.
struct BatchGradient {
  std::vector<Heatmap> d_awareness;
  std::vector<Heatmap> d_gaze_density;
};

BatchGradient zero_gradient(const SequenceBatch& batch);

/// Analytic gradient of one (unweighted) term. Subgradient 0 at the hinge of
/// the temporal term.
BatchGradient grad(const SequenceBatch& batch, const LossWeights& weights, LossTerm term);

/// Gradient of loss_consistency w.r.t. run_a's maps.
BatchGradient grad_consistency(const SequenceBatch& run_a, const SequenceBatch& run_b,
                               ConsistencyTarget target);

}  // namespace gazeaware
