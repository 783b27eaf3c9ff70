#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gazeaware/awareness.hpp"
#include "gazeaware/gaze.hpp"
#include "gazeaware/heatmap.hpp"
#include "gazeaware/objective.hpp"
#include "gazeaware/refine.hpp"

namespace gazeaware {

struct RectObject {
  double x = 0.0;  // top-left corner, pixels, at t = 0
  double y = 0.0;
  double w = 10.0;
  double h = 10.0;
  double vx = 0.0;  // pixels/frame
  double vy = 0.0;
  double intensity = 1.0;
};

struct SceneSpec {
  int width = 240;
  int height = 135;
  int frames = 20;  // 4 s at 5 Hz
  double background = 0.1;
  std::vector<RectObject> objects;
  std::uint64_t seed = 0;
};

/// Randomized desk-scale scene: compact bright rectangles drifting over a
/// dark background, speeds at most ~1 px/frame so flow advection of the
/// masks stays within rasterization error.
SceneSpec random_scene(int width, int height, int frames, int num_objects, std::uint64_t seed);

struct GroundTruth {
  SceneSpec spec;
  std::vector<Heatmap> frames;       // grayscale [0,1]
  std::vector<Heatmap> object_mask;  // union of object masks, 0/1
  std::vector<FlowField> flow;       // exact, size T-1
  std::vector<GazeFrame> scanpath;   // filled by gen_scanpath
  AwarenessSequence awareness;       // filled by gen_awareness_gt
  std::vector<AnnotationRecord> annotations;
  std::vector<std::string> warnings;

  /// Centroid of one object's rectangle at frame t (pixels).
  PixelPoint object_centroid(int object, int t) const;
};

/// Rasterizes the scene: frames, union object masks and exact flow (object
/// velocity inside its time-t mask, later-listed object wins overlaps).
/// Objects leaving the canvas are clipped and flagged in warnings.
GroundTruth gen_scene(const SceneSpec& spec);

struct ScanpathConfig {
  int duration_min = 3;  // frames per fixation
  int duration_max = 6;
  double background_prob = 0.2;
  double blink_prob = 0.05;
};

/// Alternating fixations on object centroids (tracking their motion) and
/// background points; all 3 slots carry the fixation target, blink frames
/// invalidate every slot.
std::vector<GazeFrame> gen_scanpath(const GroundTruth& gt, const ScanpathConfig& config,
                                    std::uint64_t seed);

/// Oracle awareness: the recursive deposit/advect/decay dynamics driven by
/// the noiseless scanpath and the exact flow.
AwarenessSequence gen_awareness_gt(const GroundTruth& gt, const EstimatorConfig& config,
                                   const LossWeights& weights);

struct AnnotationMix {
  double object = 1.0 / 3.0;
  double edge = 1.0 / 3.0;
  double background = 1.0 / 3.0;
};

/// Samples annotation locations per the mix and labels them with the oracle
/// awareness quantized to the 5-level scale.
std::vector<AnnotationRecord> gen_annotations(const GroundTruth& gt, int count,
                                              const AnnotationMix& mix, std::uint64_t seed);

}  // namespace gazeaware
