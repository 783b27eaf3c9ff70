#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "gazeaware/awareness.hpp"
#include "gazeaware/gaze.hpp"
#include "gazeaware/heatmap.hpp"
#include "gazeaware/objective.hpp"
#include "gazeaware/refine.hpp"
#include "gazeaware/saliency.hpp"
#include "gazeaware/synth.hpp"

namespace gazeaware {

// ---- gaze JSONL ----
// One object per line: {"frame": int, "points": [[x,y]*3], "valid": [bool*3]}.

/// Reads a gaze sequence; malformed lines are reported with their line
/// number. An empty file yields an empty sequence plus a warning.
std::vector<GazeFrame> read_gaze_jsonl(const std::filesystem::path& path,
                                       std::vector<std::string>* warnings = nullptr);

void write_gaze_jsonl(const std::filesystem::path& path, const std::vector<GazeFrame>& gaze);

// ---- flow (MFLO) ----
// Per frame: magic "MFLO", u32le width, u32le height, then the u-plane and
// v-plane as row-major f32le, units px/frame.

std::vector<FlowField> read_flow(const std::filesystem::path& path);
void write_flow(const std::filesystem::path& path, const std::vector<FlowField>& flows);

// ---- heatmap PGM ----
// Binary P5, maxval 65535, big-endian 16-bit samples, value = round(v*65535).

void write_heatmap_pgm(const Heatmap& map, const std::filesystem::path& path);
Heatmap read_heatmap_pgm(const std::filesystem::path& path);

// ---- annotations JSON ----

std::vector<AnnotationRecord> read_annotations_json(const std::filesystem::path& path);
void write_annotations_json(const std::filesystem::path& path,
                            const std::vector<AnnotationRecord>& annotations);

// ---- configuration ----

struct DenoiseBenchConfig {
  std::vector<double> sigmas{0.05, 0.10, 0.15, 0.20};
  int scenes = 3;
  double lambda = 0.5;      // saliency/gaze mixing weight
  double cond_sigma = 0.06; // splat width of the gaze-conditioned density
  int ms_max_iterations = 100;
  double ms_epsilon_px = 0.01;
};

struct RecalibrateBenchConfig {
  std::vector<double> sigmas{0.1, 0.2, 0.3, 0.5};
  int runs = 8;
  int frames = 40;  // 3 samples/frame; >= 50 samples needed for the fit
  CorrectionFitConfig fit;
};

/// Weight profile for the variational fit at desk scale; the training-scale
/// table sums over vastly larger batches, so the regularizer magnitudes are
/// rebalanced here (ratios follow the same ordering).
LossWeights desk_scale_weights();

struct AwarenessBenchConfig {
  int width = 120;
  int height = 68;
  int frames = 20;
  int scenes = 5;
  int objects = 3;
  std::vector<double> sigmas{0.01, 0.05, 0.10, 0.15};
  int train_annotations = 150;
  int eval_annotations = 300;
  double ablate_sigma = 0.1;
  LossWeights weights = desk_scale_weights();
};

struct Config {
  std::uint64_t seed = 1;
  // default scene package shape
  int width = 240;
  int height = 135;
  int frames = 20;
  int objects = 3;
  int annotations = 300;

  LossWeights weights;  // training-scale table
  EstimatorConfig estimator;
  NoiseModel noise;
  SaliencyParams saliency;
  ScanpathConfig scanpath;
  AnnotationMix annotation_mix;
  DenoiseBenchConfig denoise;
  RecalibrateBenchConfig recalibrate;
  AwarenessBenchConfig bench;
};

/// Strict parse: every key must be recognized and well-typed, otherwise the
/// error names the offending key. Missing keys keep their defaults.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& json_text);

/// Canonical JSON rendering of every field (sorted keys).
std::string config_to_json(const Config& config);

std::uint64_t config_hash(const Config& config);

}  // namespace gazeaware
