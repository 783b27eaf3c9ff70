#pragma once

#include <vector>

#include "gazeaware/gaze.hpp"
#include "gazeaware/heatmap.hpp"
#include "gazeaware/objective.hpp"

namespace gazeaware {

/// Per-frame awareness maps with values in [0,1].
using AwarenessSequence = std::vector<Heatmap>;

struct EstimatorConfig {
  double deposit_sigma = 0.0347;      // normalized; foveal + tracker uncertainty
  double fg_sigma0 = 0.0347;          // normalized
  double fg_sigma_growth = 0.01;      // normalized units per frame of age
  double fg_amplitude_decay = 0.8;    // per frame of age
  double capacity_budget = 0.05;      // fraction of W*H
  double step_size = 1e-2;            // initial projected-gradient step
  int max_iterations = 500;
  double tolerance = 1e-7;            // relative loss improvement

  bool valid() const {
    return deposit_sigma > 0.0 && fg_sigma0 > 0.0 && fg_sigma_growth >= 0.0 &&
           fg_amplitude_decay > 0.0 && fg_amplitude_decay <= 1.0 && capacity_budget > 0.0 &&
           capacity_budget <= 1.0 && step_size > 0.0 && max_iterations > 0 && tolerance >= 0.0;
  }
};

/// Filtered-gaze baseline: every past valid gaze sample contributes a
/// Gaussian whose width grows and amplitude decays with age, advected to the
/// current frame by composing per-frame flow; per-pixel max aggregation.
AwarenessSequence fg_estimate(const std::vector<GazeFrame>& gaze,
                              const std::vector<FlowField>& flows, int width, int height,
                              const EstimatorConfig& config);

/// One frame of the axiomatic update:
/// clamp((1-eps_dec) * advect(prev) + deposit(gaze), 0, 1), rescaled to the
/// capacity budget when the total mass exceeds it.
Heatmap recursive_step(const Heatmap& prev, const GazeFrame& gaze, const FlowField& flow,
                       const EstimatorConfig& config, const LossWeights& weights);

/// Fold of recursive_step over the sequence, starting from initial (all
/// zeros when not provided).
AwarenessSequence recursive_run(const std::vector<GazeFrame>& gaze,
                                const std::vector<FlowField>& flows, int width, int height,
                                const EstimatorConfig& config, const LossWeights& weights,
                                const Heatmap* initial = nullptr);

struct VariationalResult {
  AwarenessSequence awareness;
  double final_loss = 0.0;
  int iterations = 0;
  std::vector<double> loss_trace;  // accepted losses, non-increasing
};

/// Projected gradient descent on the awareness sequence minimizing
/// alpha_aa*L_AA + alpha_t*L_T + alpha_dec*L_DEC + alpha_cap*L_CAP +
/// alpha_s_a*L_S_A (+ alpha_att*L_ATT when annotations are present), with
/// backtracking line search and clamping to [0,1]. batch.awareness is used
/// as the starting point when non-empty, otherwise recursive_run seeds it.
VariationalResult variational_fit(const SequenceBatch& batch, const LossWeights& weights,
                                  const EstimatorConfig& config);

/// Mean squared error of an awareness estimate against annotation labels.
/// Throws when no annotation falls inside the sequence.
double eval_awareness(const AwarenessSequence& estimate,
                      const std::vector<AnnotationRecord>& annotations, int start_frame = 0);

}  // namespace gazeaware
