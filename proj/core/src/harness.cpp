#include "gazeaware/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "gazeaware/errors.hpp"
#include "gazeaware/metrics.hpp"
#include "gazeaware/rng.hpp"

namespace gazeaware {

using nlohmann::json;

namespace {

// seed-stream tags, one per benchmark family
constexpr std::uint64_t kDenoiseTag = 0x64656e6fULL;
constexpr std::uint64_t kRecalTag = 0x726563616cULL;
constexpr std::uint64_t kAwareTag = 0x6177617265ULL;
constexpr std::uint64_t kAblateTag = 0x61626c61ULL;
constexpr std::uint64_t kSynthTag = 0x73796e74ULL;

std::string format(const char* fmt, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, v);
  return buf;
}

}  // namespace

int thread_cap() {
  int cap = 0;
  if (const char* env = std::getenv("GAZE_AWARE_THREADS")) {
    cap = std::atoi(env);
  }
  if (cap <= 0) {
    cap = static_cast<int>(std::thread::hardware_concurrency());
  }
  return std::max(cap, 1);
}

void parallel_for(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(thread_cap(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---- denoise bench ----

namespace {

struct DenoiseScene {
  GroundTruth gt;
  std::vector<GazeFrame> scanpath;
  std::vector<DensityMap> saliency;
};

double px_error(const GazePoint& a, const GazePoint& b, int width, int height) {
  const double dx = (a.x - b.x) * (width - 1);
  const double dy = (a.y - b.y) * (height - 1);
  return std::hypot(dx, dy);
}

}  // namespace

std::vector<DenoiseRow> run_denoise_bench(const Config& config) {
  const std::uint64_t bench_seed = config.seed ^ kDenoiseTag;
  // scenes and their saliency are shared across noise rows
  std::vector<DenoiseScene> scenes(config.denoise.scenes);
  parallel_for(config.denoise.scenes, [&](int s) {
    const std::uint64_t scene_seed = derive_seed(bench_seed, s);
    DenoiseScene& sc = scenes[s];
    sc.gt = gen_scene(
        random_scene(config.width, config.height, config.frames, config.objects, scene_seed));
    sc.scanpath = gen_scanpath(sc.gt, config.scanpath, derive_seed(scene_seed, 1));
    sc.saliency.reserve(sc.gt.frames.size());
    for (const Heatmap& frame : sc.gt.frames) {
      sc.saliency.push_back(compute_saliency(frame, config.saliency));
    }
  });

  const int rows = static_cast<int>(config.denoise.sigmas.size());
  std::vector<DenoiseRow> out(rows);
  parallel_for(rows, [&](int r) {
    const double sigma = config.denoise.sigmas[r];
    MeanShiftConfig ms = MeanShiftConfig::for_noise(sigma, config.width, config.height);
    ms.max_iterations = config.denoise.ms_max_iterations;
    ms.epsilon_px = config.denoise.ms_epsilon_px;

    double raw = 0.0, obj = 0.0, sal = 0.0, cond = 0.0;
    long count = 0;
    for (int s = 0; s < config.denoise.scenes; ++s) {
      const DenoiseScene& sc = scenes[s];
      NoiseModel noise = config.noise;
      noise.sigma_n = sigma;
      noise.seed = derive_seed(bench_seed, 1000 + r * 100 + s);
      const std::vector<GazeFrame> noisy = apply_noise(sc.scanpath, noise);

      const int w = config.width, h = config.height;
      for (std::size_t t = 0; t < noisy.size(); ++t) {
        const DensityMap conditioned = gaze_conditioned_density(
            sc.saliency[t], noisy[t], config.denoise.lambda, config.denoise.cond_sigma);
        for (int slot = 0; slot < GazeFrame::kSlots; ++slot) {
          if (!noisy[t].valid[slot]) continue;
          const GazePoint truth = sc.scanpath[t].points[slot];
          const GazePoint start = noisy[t].points[slot];
          raw += px_error(start, truth, w, h);

          const PixelPoint start_px{norm_to_px(start.x, w), norm_to_px(start.y, h)};
          const auto recover = [&](const Heatmap& density) {
            PixelPoint rec = start_px;
            try {
              rec = meanshift(start_px, density, ms);
            } catch (const std::invalid_argument&) {
              // no reachable mass: the point stays put
            }
            return GazePoint{px_to_norm(rec.x, w), px_to_norm(rec.y, h)};
          };
          obj += px_error(recover(sc.gt.object_mask[t]), truth, w, h);
          sal += px_error(recover(sc.saliency[t].map), truth, w, h);
          cond += px_error(recover(conditioned.map), truth, w, h);
          ++count;
        }
      }
    }
    out[r] = {sigma, raw / count, obj / count, sal / count, cond / count};
  });
  return out;
}

std::string denoise_csv(const std::vector<DenoiseRow>& rows) {
  std::string csv = "sigma_n,raw_mae,obj_mae,sal_mae,cond_mae\n";
  for (const DenoiseRow& r : rows) {
    csv += format("%.2f", r.sigma_n) + "," + format("%.1f", r.raw_mae) + "," +
           format("%.1f", r.obj_mae) + "," + format("%.1f", r.sal_mae) + "," +
           format("%.1f", r.cond_mae) + "\n";
  }
  return csv;
}

// ---- recalibration bench ----

std::vector<RecalibrateRow> run_recalibrate_bench(const Config& config) {
  const std::uint64_t bench_seed = config.seed ^ kRecalTag;
  const int rows = static_cast<int>(config.recalibrate.sigmas.size());
  const int runs = config.recalibrate.runs;

  std::vector<double> before(rows * runs, 0.0), after(rows * runs, 0.0);
  parallel_for(rows * runs, [&](int cell) {
    const int r = cell / runs;
    const int k = cell % runs;
    const double sigma = config.recalibrate.sigmas[r];
    const std::uint64_t run_seed = derive_seed(bench_seed, cell);

    const SceneSpec spec = random_scene(config.width, config.height, config.recalibrate.frames,
                                        config.objects, derive_seed(run_seed, 0));
    const GroundTruth gt = gen_scene(spec);
    const std::vector<GazeFrame> path = gen_scanpath(gt, config.scanpath, derive_seed(run_seed, 1));

    // redraw near-singular corruptions; they are not recoverable by any method
    AffineCorruption corr;
    for (int attempt = 0;; ++attempt) {
      corr = apply_affine_corruption(path, sigma, derive_seed(run_seed, 2 + attempt));
      if (std::abs(corr.transform.det()) > 0.05) break;
      if (attempt > 32) throw NumericalError("recalibrate bench: no invertible corruption found");
    }

    CorrectionFitConfig fit = config.recalibrate.fit;
    fit.seed = derive_seed(run_seed, 64);
    const CorrectionFitResult result =
        fit_correction(corr.gaze, FitMode::kSupervised, nullptr, &path, fit);

    const CorrectionNet identity = CorrectionNet::near_identity(fit.hidden, 0.0, 1);
    before[cell] = calibration_error(identity, corr.transform);
    after[cell] = calibration_error(result.net, corr.transform);
  });

  std::vector<RecalibrateRow> out(rows);
  for (int r = 0; r < rows; ++r) {
    RecalibrateRow& row = out[r];
    row.sigma_n = config.recalibrate.sigmas[r];
    for (int k = 0; k < runs; ++k) {
      row.before += before[r * runs + k];
      row.after += after[r * runs + k];
    }
    row.before /= runs;
    row.after /= runs;
  }
  return out;
}

std::string recalibrate_csv(const std::vector<RecalibrateRow>& rows) {
  std::string csv = "sigma_n,before,after\n";
  for (const RecalibrateRow& r : rows) {
    csv += format("%.2f", r.sigma_n) + "," + format("%.4f", r.before) + "," +
           format("%.4f", r.after) + "\n";
  }
  return csv;
}

// ---- awareness bench + ablation ----

namespace {

struct AwarenessFixture {
  GroundTruth gt;
  std::vector<AnnotationRecord> train;
  std::vector<AnnotationRecord> eval;
};

std::vector<AwarenessFixture> make_awareness_fixtures(const Config& config,
                                                      std::uint64_t bench_seed) {
  std::vector<AwarenessFixture> fixtures(config.bench.scenes);
  parallel_for(config.bench.scenes, [&](int s) {
    const std::uint64_t scene_seed = derive_seed(bench_seed, s);
    AwarenessFixture& fx = fixtures[s];
    fx.gt = gen_scene(random_scene(config.bench.width, config.bench.height, config.bench.frames,
                                   config.bench.objects, scene_seed));
    fx.gt.scanpath = gen_scanpath(fx.gt, config.scanpath, derive_seed(scene_seed, 1));
    fx.gt.awareness = gen_awareness_gt(fx.gt, config.estimator, config.weights);
    fx.train = gen_annotations(fx.gt, config.bench.train_annotations, config.annotation_mix,
                               derive_seed(scene_seed, 2));
    fx.eval = gen_annotations(fx.gt, config.bench.eval_annotations, config.annotation_mix,
                              derive_seed(scene_seed, 3));
  });
  return fixtures;
}

SequenceBatch make_variational_batch(const AwarenessFixture& fx,
                                     const std::vector<GazeFrame>& noisy,
                                     const std::vector<AnnotationRecord>& train) {
  SequenceBatch batch;
  batch.start_frame = 0;
  batch.images = fx.gt.frames;
  batch.flows = fx.gt.flow;
  batch.gaze = noisy;
  batch.annotations = train;
  const int w = fx.gt.spec.width, h = fx.gt.spec.height;
  batch.gaze_density.assign(fx.gt.frames.size(),
                            Heatmap::constant(w, h, 1.0 / (static_cast<double>(w) * h)));
  return batch;
}

}  // namespace

std::vector<AwarenessRow> run_awareness_bench(const Config& config) {
  const std::uint64_t bench_seed = config.seed ^ kAwareTag;
  const std::vector<AwarenessFixture> fixtures = make_awareness_fixtures(config, bench_seed);

  const int rows = static_cast<int>(config.bench.sigmas.size());
  const int scenes = config.bench.scenes;
  std::vector<double> fg_mse(rows * scenes, 0.0), var_mse(rows * scenes, 0.0);

  parallel_for(rows * scenes, [&](int cell) {
    const int r = cell / scenes;
    const int s = cell % scenes;
    const AwarenessFixture& fx = fixtures[s];
    NoiseModel noise = config.noise;
    noise.sigma_n = config.bench.sigmas[r];
    noise.seed = derive_seed(bench_seed, 1000 + cell);
    const std::vector<GazeFrame> noisy = apply_noise(fx.gt.scanpath, noise);

    const AwarenessSequence fg = fg_estimate(noisy, fx.gt.flow, fx.gt.spec.width,
                                             fx.gt.spec.height, config.estimator);
    fg_mse[cell] = eval_awareness(fg, fx.eval);

    const SequenceBatch batch = make_variational_batch(fx, noisy, fx.train);
    const VariationalResult var = variational_fit(batch, config.bench.weights, config.estimator);
    var_mse[cell] = eval_awareness(var.awareness, fx.eval);
  });

  std::vector<AwarenessRow> out(rows);
  for (int r = 0; r < rows; ++r) {
    out[r].sigma_n = config.bench.sigmas[r];
    for (int s = 0; s < scenes; ++s) {
      out[r].mse_fg += fg_mse[r * scenes + s];
      out[r].mse_var += var_mse[r * scenes + s];
    }
    out[r].mse_fg /= scenes;
    out[r].mse_var /= scenes;
  }
  return out;
}

std::string awareness_csv(const std::vector<AwarenessRow>& rows) {
  std::string csv = "sigma_n,mse_fg,mse_var\n";
  for (const AwarenessRow& r : rows) {
    csv += format("%.2f", r.sigma_n) + "," + format("%.6f", r.mse_fg) + "," +
           format("%.6f", r.mse_var) + "\n";
  }
  return csv;
}

std::vector<AblationRow> run_ablation(const Config& config) {
  const std::uint64_t bench_seed = config.seed ^ kAblateTag;
  const std::vector<AwarenessFixture> fixtures = make_awareness_fixtures(config, bench_seed);
  const int scenes = config.bench.scenes;

  struct Variant {
    const char* name;
    std::function<void(LossWeights&)> tweak;
  };
  const std::vector<Variant> variants = {
      {"full", [](LossWeights&) {}},
      {"no_att", [](LossWeights& w) { w.alpha_att = 0.0; }},
      {"no_aa", [](LossWeights& w) { w.alpha_aa = 0.0; }},
      {"no_temporal", [](LossWeights& w) { w.alpha_t = 0.0; }},
      {"no_decay", [](LossWeights& w) { w.alpha_dec = 0.0; }},
      {"no_capacity", [](LossWeights& w) { w.alpha_cap = 0.0; }},
      {"no_spatial", [](LossWeights& w) { w.alpha_s_a = 0.0; }},
  };

  // one noisy scanpath per scene, shared by every variant
  std::vector<std::vector<GazeFrame>> noisy(scenes);
  for (int s = 0; s < scenes; ++s) {
    NoiseModel noise = config.noise;
    noise.sigma_n = config.bench.ablate_sigma;
    noise.seed = derive_seed(bench_seed, 500 + s);
    noisy[s] = apply_noise(fixtures[s].gt.scanpath, noise);
  }

  const int cells = static_cast<int>(variants.size()) * scenes;
  std::vector<double> mse(cells, 0.0);
  parallel_for(cells, [&](int cell) {
    const int v = cell / scenes;
    const int s = cell % scenes;
    LossWeights weights = config.bench.weights;
    variants[v].tweak(weights);
    const SequenceBatch batch = make_variational_batch(fixtures[s], noisy[s], fixtures[s].train);
    const VariationalResult fit = variational_fit(batch, weights, config.estimator);
    mse[cell] = eval_awareness(fit.awareness, fixtures[s].eval);
  });

  std::vector<AblationRow> out;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    AblationRow row;
    row.ablation = variants[v].name;
    for (int s = 0; s < scenes; ++s) row.mse += mse[v * scenes + s];
    row.mse /= scenes;
    out.push_back(std::move(row));
  }
  return out;
}

std::string ablation_csv(const std::vector<AblationRow>& rows) {
  std::string csv = "ablation,mse\n";
  for (const AblationRow& r : rows) {
    csv += r.ablation + "," + format("%.6f", r.mse) + "\n";
  }
  return csv;
}

// ---- gradient check ----

SequenceBatch make_random_batch(int width, int height, int frames, std::uint64_t seed) {
  Rng rng(seed);
  SequenceBatch batch;
  batch.start_frame = 0;
  for (int t = 0; t < frames; ++t) {
    Heatmap image(width, height);
    for (double& v : image.values) v = rng.uniform();
    batch.images.push_back(std::move(image));

    Heatmap ma(width, height);
    for (double& v : ma.values) v = rng.uniform(0.05, 0.95);
    batch.awareness.push_back(std::move(ma));

    GazeFrame gaze;
    gaze.frame_index = t;
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      gaze.points[s] = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      gaze.valid[s] = rng.bernoulli(0.8);
    }
    batch.gaze.push_back(gaze);

    // density with mass concentrated at the gaze points keeps the NLL
    // well-conditioned for finite differences
    Heatmap noise_floor(width, height);
    for (double& v : noise_floor.values) v = rng.uniform(0.5, 1.5);
    Heatmap pg = normalize(noise_floor).map;
    if (batch.gaze[t].valid_count() > 0) {
      const DensityMap splat = gaussian_splat(batch.gaze[t], 0.05, width, height);
      for (std::size_t i = 0; i < pg.values.size(); ++i) {
        pg.values[i] = 0.3 * pg.values[i] + 0.7 * splat.map.values[i];
      }
    }
    batch.gaze_density.push_back(std::move(pg));

    if (t + 1 < frames) {
      FlowField flow(width, height);
      for (double& v : flow.u) v = rng.uniform(-1.5, 1.5);
      for (double& v : flow.v) v = rng.uniform(-1.5, 1.5);
      batch.flows.push_back(std::move(flow));
    }
  }
  if (batch.valid_gaze_points() == 0) {
    batch.gaze[0].valid[0] = true;
  }
  for (int i = 0; i < 6; ++i) {
    batch.annotations.push_back({rng.uniform_int(0, frames - 1),
                                 rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95),
                                 rng.uniform(0.0, 1.0)});
  }
  return batch;
}

namespace {

enum class GradTarget { kAwareness, kGazeDensity };

// Marks coordinates whose temporal-term argument sits within margin of the
// hinge; finite differences are meaningless across the kink.
std::vector<std::vector<bool>> hinge_mask(const SequenceBatch& batch, const LossWeights& weights,
                                          double margin) {
  std::vector<std::vector<bool>> unsafe(batch.frames());
  for (int t = 0; t < batch.frames(); ++t) {
    unsafe[t].assign(batch.awareness[t].values.size(), false);
  }
  for (int t = 0; t + 1 < batch.frames(); ++t) {
    const FlowField& flow = batch.flows[t];
    const Heatmap& cur = batch.awareness[t];
    const Heatmap& next = batch.awareness[t + 1];
    for (int y = 0; y < cur.height; ++y) {
      for (int x = 0; x < cur.width; ++x) {
        const BilinearTaps taps =
            bilinear_taps(cur.width, cur.height, x + flow.u_at(x, y), y + flow.v_at(x, y));
        const double a = taps.w00 * next.at(taps.x0, taps.y0) +
                         taps.w10 * next.at(taps.x1, taps.y0) +
                         taps.w01 * next.at(taps.x0, taps.y1) +
                         taps.w11 * next.at(taps.x1, taps.y1);
        const double d = a - weights.w_of * cur.at(x, y);
        if (std::abs(d) < margin) {
          unsafe[t][static_cast<std::size_t>(y) * cur.width + x] = true;
          unsafe[t + 1][static_cast<std::size_t>(taps.y0) * cur.width + taps.x0] = true;
          unsafe[t + 1][static_cast<std::size_t>(taps.y0) * cur.width + taps.x1] = true;
          unsafe[t + 1][static_cast<std::size_t>(taps.y1) * cur.width + taps.x0] = true;
          unsafe[t + 1][static_cast<std::size_t>(taps.y1) * cur.width + taps.x1] = true;
        }
      }
    }
  }
  return unsafe;
}

double max_rel_error(const std::function<double()>& value, SequenceBatch& batch,
                     const BatchGradient& analytic, GradTarget target,
                     const std::vector<std::vector<bool>>* skip) {
  constexpr double kStep = 1e-4;
  double worst = 0.0;
  auto& maps = target == GradTarget::kAwareness ? batch.awareness : batch.gaze_density;
  const auto& grads =
      target == GradTarget::kAwareness ? analytic.d_awareness : analytic.d_gaze_density;
  for (int t = 0; t < batch.frames(); ++t) {
    for (std::size_t i = 0; i < maps[t].values.size(); ++i) {
      if (skip && (*skip)[t][i]) continue;
      double& cell = maps[t].values[i];
      const double saved = cell;
      cell = saved + kStep;
      const double up = value();
      cell = saved - kStep;
      const double down = value();
      cell = saved;
      const double fd = (up - down) / (2.0 * kStep);
      const double a = grads[t].values[i];
      if (std::abs(a) < 1e-8 && std::abs(fd) < 1e-8) continue;
      const double rel = std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-4});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace

std::vector<GradCheckRow> run_gradcheck(std::uint64_t seed, int num_seeds) {
  const LossWeights weights;  // training-scale defaults carry c1, c2, w_of, eps_dec
  struct TermSpec {
    const char* name;
    LossTerm term;
    GradTarget target;
    bool needs_hinge_mask;
  };
  const TermSpec specs[] = {
      {"gaze_nll", LossTerm::kGazeNll, GradTarget::kGazeDensity, false},
      {"att", LossTerm::kAtt, GradTarget::kAwareness, false},
      {"aa", LossTerm::kAa, GradTarget::kAwareness, false},
      {"spatial_awareness", LossTerm::kSpatialAwareness, GradTarget::kAwareness, false},
      {"spatial_gaze", LossTerm::kSpatialGaze, GradTarget::kGazeDensity, false},
      {"temporal", LossTerm::kTemporal, GradTarget::kAwareness, true},
      {"decay", LossTerm::kDecay, GradTarget::kAwareness, false},
      {"capacity", LossTerm::kCapacity, GradTarget::kAwareness, false},
  };

  std::vector<GradCheckRow> rows;
  for (const TermSpec& spec : specs) rows.push_back({spec.name, 0.0});
  rows.push_back({"consistency_gaze", 0.0});
  rows.push_back({"consistency_awareness", 0.0});

  for (int k = 0; k < num_seeds; ++k) {
    SequenceBatch batch = make_random_batch(16, 9, 4, derive_seed(seed, k));
    SequenceBatch other = make_random_batch(16, 9, 4, derive_seed(seed, 1000 + k));

    const auto unsafe = hinge_mask(batch, weights, 1e-3);
    for (std::size_t i = 0; i < std::size(specs); ++i) {
      const TermSpec& spec = specs[i];
      const BatchGradient analytic = grad(batch, weights, spec.term);
      const auto value = [&]() -> double {
        switch (spec.term) {
          case LossTerm::kGazeNll: return loss_gaze_nll(batch);
          case LossTerm::kAtt: return loss_att(batch);
          case LossTerm::kAa: return loss_aa(batch);
          case LossTerm::kSpatialAwareness: return loss_spatial_awareness(batch);
          case LossTerm::kSpatialGaze: return loss_spatial_gaze(batch);
          case LossTerm::kTemporal: return loss_temporal(batch, weights);
          case LossTerm::kDecay: return loss_decay(batch, weights);
          case LossTerm::kCapacity: return loss_capacity(batch);
        }
        return 0.0;
      };
      const double err = max_rel_error(value, batch, analytic, spec.target,
                                       spec.needs_hinge_mask ? &unsafe : nullptr);
      rows[i].max_rel_error = std::max(rows[i].max_rel_error, err);
    }

    for (int which = 0; which < 2; ++which) {
      const ConsistencyTarget target =
          which == 0 ? ConsistencyTarget::kGaze : ConsistencyTarget::kAwareness;
      const BatchGradient analytic = grad_consistency(batch, other, target);
      const auto value = [&]() { return loss_consistency(batch, other, target); };
      const double err = max_rel_error(
          value, batch, analytic,
          which == 0 ? GradTarget::kGazeDensity : GradTarget::kAwareness, nullptr);
      rows[std::size(specs) + which].max_rel_error =
          std::max(rows[std::size(specs) + which].max_rel_error, err);
    }
  }
  return rows;
}

std::string gradcheck_csv(const std::vector<GradCheckRow>& rows) {
  std::string csv = "term,max_rel_error\n";
  for (const GradCheckRow& r : rows) {
    csv += r.term + "," + format("%.3e", r.max_rel_error) + "\n";
  }
  return csv;
}

// ---- saliency evaluation ----

SaliencyEval eval_saliency_frames(const std::vector<DensityMap>& predictions,
                                  const std::vector<GazeFrame>& true_gaze, double truth_sigma) {
  if (predictions.size() != true_gaze.size()) {
    throw std::invalid_argument("eval_saliency_frames: prediction/gaze length mismatch");
  }
  SaliencyEval eval;
  DensityMap baseline;
  for (std::size_t t = 0; t < predictions.size(); ++t) {
    if (true_gaze[t].valid_count() == 0) continue;
    const DensityMap& pred = predictions[t];
    if (baseline.map.values.empty()) {
      baseline = center_prior(pred.map.width, pred.map.height);
    }
    const DensityMap truth =
        gaussian_splat(true_gaze[t], truth_sigma, pred.map.width, pred.map.height);
    FixationSet fixations;
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!true_gaze[t].valid[s]) continue;
      fixations.fixations.push_back(
          {true_gaze[t].frame_index, true_gaze[t].points[s].x, true_gaze[t].points[s].y});
    }
    eval.kl += kl_divergence(truth, pred);
    eval.cc += cross_correlation(truth.map, pred.map);
    eval.ig += information_gain(pred, fixations, baseline);
    eval.frames += 1;
  }
  if (eval.frames == 0) {
    throw std::invalid_argument("eval_saliency_frames: no frame with valid gaze");
  }
  eval.kl /= eval.frames;
  eval.cc /= eval.frames;
  eval.ig /= eval.frames;
  return eval;
}

std::string saliency_csv(const SaliencyEval& eval) {
  std::string csv = "# kl_direction=truth||pred\nmetric,value\n";
  csv += "kl," + format("%.6f", eval.kl) + "\n";
  csv += "cc," + format("%.6f", eval.cc) + "\n";
  csv += "ig," + format("%.6f", eval.ig) + "\n";
  return csv;
}

// ---- scene packages ----

namespace {

std::string frame_name(const char* prefix, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.pgm", prefix, index);
  return buf;
}

}  // namespace

void write_scene_package(const std::filesystem::path& dir, const GroundTruth& gt) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "frames");
  fs::create_directories(dir / "masks");
  if (!gt.awareness.empty()) fs::create_directories(dir / "awareness_gt");

  json spec;
  spec["width"] = gt.spec.width;
  spec["height"] = gt.spec.height;
  spec["frames"] = gt.spec.frames;
  spec["background"] = gt.spec.background;
  spec["seed"] = gt.spec.seed;
  json objects = json::array();
  for (const RectObject& o : gt.spec.objects) {
    objects.push_back({{"x", o.x},
                       {"y", o.y},
                       {"w", o.w},
                       {"h", o.h},
                       {"vx", o.vx},
                       {"vy", o.vy},
                       {"intensity", o.intensity}});
  }
  spec["objects"] = objects;
  spec["warnings"] = gt.warnings;
  {
    std::ofstream out(dir / "scene.json");
    out << spec.dump(2) << '\n';
  }

  for (int t = 0; t < gt.spec.frames; ++t) {
    write_heatmap_pgm(gt.frames[t], dir / "frames" / frame_name("frame", t));
    write_heatmap_pgm(gt.object_mask[t], dir / "masks" / frame_name("mask", t));
    if (!gt.awareness.empty()) {
      write_heatmap_pgm(gt.awareness[t], dir / "awareness_gt" / frame_name("aw", t));
    }
  }
  write_flow(dir / "flow.mflo", gt.flow);
  if (!gt.scanpath.empty()) write_gaze_jsonl(dir / "gaze_true.jsonl", gt.scanpath);
  if (!gt.annotations.empty()) write_annotations_json(dir / "annotations.json", gt.annotations);
}

GroundTruth read_scene_package(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  std::ifstream in(dir / "scene.json");
  if (!in) throw std::runtime_error("cannot open " + (dir / "scene.json").string());
  json spec;
  try {
    in >> spec;
  } catch (const json::exception&) {
    throw std::runtime_error((dir / "scene.json").string() + ": malformed JSON");
  }
  GroundTruth gt;
  try {
    gt.spec.width = spec.at("width").get<int>();
    gt.spec.height = spec.at("height").get<int>();
    gt.spec.frames = spec.at("frames").get<int>();
    gt.spec.background = spec.at("background").get<double>();
    gt.spec.seed = spec.at("seed").get<std::uint64_t>();
    for (const auto& o : spec.at("objects")) {
      gt.spec.objects.push_back({o.at("x").get<double>(), o.at("y").get<double>(),
                                 o.at("w").get<double>(), o.at("h").get<double>(),
                                 o.at("vx").get<double>(), o.at("vy").get<double>(),
                                 o.at("intensity").get<double>()});
    }
    if (spec.contains("warnings")) {
      gt.warnings = spec.at("warnings").get<std::vector<std::string>>();
    }
  } catch (const json::exception&) {
    throw std::runtime_error((dir / "scene.json").string() + ": missing or bad fields");
  }

  for (int t = 0; t < gt.spec.frames; ++t) {
    gt.frames.push_back(read_heatmap_pgm(dir / "frames" / frame_name("frame", t)));
    gt.object_mask.push_back(read_heatmap_pgm(dir / "masks" / frame_name("mask", t)));
    const fs::path aw = dir / "awareness_gt" / frame_name("aw", t);
    if (fs::exists(aw)) gt.awareness.push_back(read_heatmap_pgm(aw));
  }
  gt.flow = read_flow(dir / "flow.mflo");
  if (fs::exists(dir / "gaze_true.jsonl")) {
    gt.scanpath = read_gaze_jsonl(dir / "gaze_true.jsonl");
  }
  if (fs::exists(dir / "annotations.json")) {
    gt.annotations = read_annotations_json(dir / "annotations.json");
  }
  return gt;
}

GroundTruth make_default_ground_truth(const Config& config) {
  const std::uint64_t seed = config.seed ^ kSynthTag;
  GroundTruth gt = gen_scene(
      random_scene(config.width, config.height, config.frames, config.objects, derive_seed(seed, 0)));
  gt.scanpath = gen_scanpath(gt, config.scanpath, derive_seed(seed, 1));
  gt.awareness = gen_awareness_gt(gt, config.estimator, config.weights);
  gt.annotations =
      gen_annotations(gt, config.annotations, config.annotation_mix, derive_seed(seed, 2));
  return gt;
}

}  // namespace gazeaware
