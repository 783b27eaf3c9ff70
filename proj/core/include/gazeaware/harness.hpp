#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "gazeaware/io.hpp"

namespace gazeaware {

/// Thread cap from GAZE_AWARE_THREADS (0 or unset = hardware concurrency).
int thread_cap();

/// Runs fn(0..n-1), statically partitioned over at most thread_cap()
/// workers. Cells must be independent; results keyed by index stay
/// deterministic regardless of the worker count.
void parallel_for(int n, const std::function<void(int)>& fn);

// ---- Table 1 analog: gaze denoising ----

struct DenoiseRow {
  double sigma_n = 0.0;
  double raw_mae = 0.0;  // pixels at working resolution
  double obj_mae = 0.0;
  double sal_mae = 0.0;
  double cond_mae = 0.0;
};

std::vector<DenoiseRow> run_denoise_bench(const Config& config);
std::string denoise_csv(const std::vector<DenoiseRow>& rows);

// ---- Table 2 analog: recalibration ----

struct RecalibrateRow {
  double sigma_n = 0.0;
  double before = 0.0;  // calibration error of the uncorrected identity
  double after = 0.0;   // after the supervised fit, averaged over runs
};

std::vector<RecalibrateRow> run_recalibrate_bench(const Config& config);
std::string recalibrate_csv(const std::vector<RecalibrateRow>& rows);

// ---- Table 3 analog: awareness estimation ----

struct AwarenessRow {
  double sigma_n = 0.0;
  double mse_fg = 0.0;
  double mse_var = 0.0;
};

std::vector<AwarenessRow> run_awareness_bench(const Config& config);
std::string awareness_csv(const std::vector<AwarenessRow>& rows);

// ---- leave-one-out ablation of the variational objective ----

struct AblationRow {
  std::string ablation;  // "full", "no_att", ...
  double mse = 0.0;
};

std::vector<AblationRow> run_ablation(const Config& config);
std::string ablation_csv(const std::vector<AblationRow>& rows);

// ---- gradient check ----

struct GradCheckRow {
  std::string term;
  double max_rel_error = 0.0;
};

/// Analytic vs central finite differences (h = 1e-4) for every objective
/// term on random 16x9x4 batches; hinge-adjacent coordinates of the temporal
/// term are excluded.
std::vector<GradCheckRow> run_gradcheck(std::uint64_t seed, int num_seeds = 5);
std::string gradcheck_csv(const std::vector<GradCheckRow>& rows);

/// Random batch with smooth positive densities, used by the gradient check.
SequenceBatch make_random_batch(int width, int height, int frames, std::uint64_t seed);

// ---- saliency evaluation ----

struct SaliencyEval {
  double kl = 0.0;
  double cc = 0.0;
  double ig = 0.0;
  int frames = 0;
};

/// Scores predicted per-frame densities against splatted true-gaze densities
/// (KL, CC) and fixations against the center-prior baseline (IG).
SaliencyEval eval_saliency_frames(const std::vector<DensityMap>& predictions,
                                  const std::vector<GazeFrame>& true_gaze, double truth_sigma);
std::string saliency_csv(const SaliencyEval& eval);

// ---- scene packages on disk ----

/// Writes frames/, masks/, awareness_gt/ (PGM), flow.mflo, gaze_true.jsonl,
/// annotations.json and scene.json under dir.
void write_scene_package(const std::filesystem::path& dir, const GroundTruth& gt);

/// Reads everything write_scene_package produced.
GroundTruth read_scene_package(const std::filesystem::path& dir);

/// Fully generated scene: gen_scene + gen_scanpath + gen_awareness_gt +
/// gen_annotations, seeded from config.seed.
GroundTruth make_default_ground_truth(const Config& config);

}  // namespace gazeaware
