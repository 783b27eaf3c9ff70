#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gazeaware/errors.hpp"
#include "gazeaware/harness.hpp"
#include "gazeaware/io.hpp"

namespace gazeaware::cli {

namespace fs = std::filesystem;

namespace {

constexpr double kGradCheckThreshold = 1e-4;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

Config load_effective_config(const GlobalOptions& opts) {
  Config config = opts.config_path.empty() ? Config{} : load_config(opts.config_path);
  if (opts.seed_set) config.seed = opts.seed;
  return config;
}

fs::path require_out(const GlobalOptions& opts, const char* command) {
  if (opts.out_dir.empty()) {
    throw std::invalid_argument(std::string(command) + ": --out <dir> is required");
  }
  fs::create_directories(opts.out_dir);
  return opts.out_dir;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

class Report {
 public:
  Report(std::string command, const Config& config)
      : command_(std::move(command)),
        hash_(config_hash(config)),
        seed_(config.seed),
        start_(std::chrono::steady_clock::now()) {}

  void add_output(const fs::path& p) { outputs_.push_back(p.string()); }

  void write(const fs::path& dir) const {
    const auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start_);
    char hash[32];
    std::snprintf(hash, sizeof(hash), "%016llx", static_cast<unsigned long long>(hash_));
    nlohmann::json j = {{"command", command_},
                        {"config_hash", hash},
                        {"seed", seed_},
                        {"wall_ms", wall.count()},
                        {"outputs", outputs_}};
    write_text(dir / "report.json", j.dump(2) + "\n");
  }

 private:
  std::string command_;
  std::uint64_t hash_;
  std::uint64_t seed_;
  std::vector<std::string> outputs_;
  std::chrono::steady_clock::time_point start_;
};

std::string frame_file(const char* prefix, int index) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_%06d.pgm", prefix, index);
  return buf;
}

void write_estimate(const fs::path& dir, const AwarenessSequence& estimate, Report& report) {
  std::string mass_csv = "frame,total_mass\n";
  for (std::size_t t = 0; t < estimate.size(); ++t) {
    const fs::path p = dir / frame_file("aw", static_cast<int>(t));
    write_heatmap_pgm(estimate[t], p);
    char row[64];
    std::snprintf(row, sizeof(row), "%zu,%.6f\n", t, estimate[t].sum());
    mass_csv += row;
  }
  write_text(dir / "mass.csv", mass_csv);
  report.add_output(dir / "mass.csv");
}

std::vector<GazeFrame> package_gaze(const GroundTruth& gt, const std::string& gaze_override) {
  if (!gaze_override.empty()) return read_gaze_jsonl(gaze_override);
  if (gt.scanpath.empty()) {
    throw std::invalid_argument("scene package has no gaze_true.jsonl; pass --gaze");
  }
  return gt.scanpath;
}

int dispatch(const std::string& command, const GlobalOptions& opts, const std::string& scene_dir,
             const std::string& gaze_override, const std::string& mode,
             const std::string& maps_dir, const std::string& pg_dir,
             const std::string& pred_dir) {
  const Config config = load_effective_config(opts);

  if (command == "synth") {
    const fs::path out = require_out(opts, "synth");
    Report report("synth", config);
    const GroundTruth gt = make_default_ground_truth(config);
    write_scene_package(out, gt);
    report.add_output(out / "scene.json");
    report.write(out);
    for (const std::string& w : gt.warnings) std::cerr << "warning: " << w << "\n";
    return 0;
  }

  if (command == "fg" || command == "estimate") {
    const fs::path out = require_out(opts, command.c_str());
    const GroundTruth gt = read_scene_package(scene_dir);
    const std::vector<GazeFrame> gaze = package_gaze(gt, gaze_override);
    const int w = gt.spec.width, h = gt.spec.height;

    Report report(command, config);
    if (command == "fg") {
      write_estimate(out, fg_estimate(gaze, gt.flow, w, h, config.estimator), report);
    } else if (mode == "recursive") {
      write_estimate(out, recursive_run(gaze, gt.flow, w, h, config.estimator, config.weights),
                     report);
    } else if (mode == "variational") {
      SequenceBatch batch;
      batch.images = gt.frames;
      batch.flows = gt.flow;
      batch.gaze = gaze;
      batch.annotations = gt.annotations;
      batch.gaze_density.assign(gt.frames.size(),
                                Heatmap::constant(w, h, 1.0 / (static_cast<double>(w) * h)));
      // desk-scale profile; the training-scale table is tuned for far larger sums
      const VariationalResult fit = variational_fit(batch, config.bench.weights, config.estimator);
      write_estimate(out, fit.awareness, report);
      std::printf("final_loss,%.9g\niterations,%d\n", fit.final_loss, fit.iterations);
    } else {
      throw std::invalid_argument("estimate: --mode must be recursive or variational");
    }
    report.write(out);
    return 0;
  }

  if (command == "denoise-bench") {
    const fs::path out = require_out(opts, "denoise-bench");
    Report report("denoise-bench", config);
    const std::string csv = denoise_csv(run_denoise_bench(config));
    write_text(out / "denoise.csv", csv);
    report.add_output(out / "denoise.csv");
    report.write(out);
    std::fputs(csv.c_str(), stdout);
    return 0;
  }

  if (command == "recalibrate-bench") {
    const fs::path out = require_out(opts, "recalibrate-bench");
    Report report("recalibrate-bench", config);
    const std::string csv = recalibrate_csv(run_recalibrate_bench(config));
    write_text(out / "recalibrate.csv", csv);
    report.add_output(out / "recalibrate.csv");
    report.write(out);
    std::fputs(csv.c_str(), stdout);
    return 0;
  }

  if (command == "awareness-bench") {
    const fs::path out = require_out(opts, "awareness-bench");
    Report report("awareness-bench", config);
    const std::string csv = awareness_csv(run_awareness_bench(config));
    write_text(out / "awareness.csv", csv);
    report.add_output(out / "awareness.csv");
    report.write(out);
    std::fputs(csv.c_str(), stdout);
    return 0;
  }

  if (command == "ablate") {
    const fs::path out = require_out(opts, "ablate");
    Report report("ablate", config);
    const std::string csv = ablation_csv(run_ablation(config));
    write_text(out / "ablation.csv", csv);
    report.add_output(out / "ablation.csv");
    report.write(out);
    std::fputs(csv.c_str(), stdout);
    return 0;
  }

  if (command == "objective") {
    const GroundTruth gt = read_scene_package(scene_dir);
    const int w = gt.spec.width, h = gt.spec.height;
    SequenceBatch batch;
    batch.images = gt.frames;
    batch.flows = gt.flow;
    batch.gaze = package_gaze(gt, gaze_override);
    batch.annotations = gt.annotations;
    batch.awareness.reserve(gt.frames.size());
    for (int t = 0; t < gt.spec.frames; ++t) {
      batch.awareness.push_back(read_heatmap_pgm(fs::path(maps_dir) / frame_file("aw", t)));
    }
    if (!pg_dir.empty()) {
      for (int t = 0; t < gt.spec.frames; ++t) {
        batch.gaze_density.push_back(
            normalize(read_heatmap_pgm(fs::path(pg_dir) / frame_file("pg", t))).map);
      }
    } else {
      batch.gaze_density.assign(gt.frames.size(),
                                Heatmap::constant(w, h, 1.0 / (static_cast<double>(w) * h)));
    }
    const LossBreakdown breakdown = total_loss(batch, config.weights);
    std::string csv = "term,value,weighted\n";
    std::string skipped;
    for (const TermReport& term : breakdown.terms) {
      char row[128];
      std::snprintf(row, sizeof(row), "%s,%.9g,%.9g\n", term.term.c_str(), term.value,
                    term.weighted);
      csv += row;
      if (term.skipped) skipped += (skipped.empty() ? "" : ",") + term.term;
    }
    if (!skipped.empty()) csv += "# skipped: " + skipped + "\n";
    char total[64];
    std::snprintf(total, sizeof(total), "# total,%.9g\n", breakdown.total);
    csv += total;
    if (!opts.out_dir.empty()) {
      const fs::path out = require_out(opts, "objective");
      Report report("objective", config);
      write_text(out / "objective.csv", csv);
      report.add_output(out / "objective.csv");
      report.write(out);
    }
    std::fputs(csv.c_str(), stdout);
    return 0;
  }

  if (command == "gradcheck") {
    const std::vector<GradCheckRow> rows = run_gradcheck(config.seed);
    const std::string csv = gradcheck_csv(rows);
    if (!opts.out_dir.empty()) {
      const fs::path out = require_out(opts, "gradcheck");
      Report report("gradcheck", config);
      write_text(out / "gradcheck.csv", csv);
      report.add_output(out / "gradcheck.csv");
      report.write(out);
    }
    std::fputs(csv.c_str(), stdout);
    for (const GradCheckRow& row : rows) {
      if (row.max_rel_error >= kGradCheckThreshold) {
        throw NumericalError("gradcheck: term '" + row.term + "' exceeds the " +
                             std::to_string(kGradCheckThreshold) + " tolerance");
      }
    }
    return 0;
  }

  if (command == "eval-saliency") {
    const GroundTruth gt = read_scene_package(scene_dir);
    const std::vector<GazeFrame> gaze = package_gaze(gt, gaze_override);
    const SaliencyProvider provider = SaliencyProvider::file_backed(pred_dir);
    std::vector<DensityMap> predictions;
    predictions.reserve(gt.frames.size());
    for (int t = 0; t < gt.spec.frames; ++t) {
      predictions.push_back(provider.get(t, gt.frames[t]));
    }
    const SaliencyEval eval =
        eval_saliency_frames(predictions, gaze, config.estimator.deposit_sigma);
    const std::string csv = saliency_csv(eval);
    if (!opts.out_dir.empty()) {
      const fs::path out = require_out(opts, "eval-saliency");
      Report report("eval-saliency", config);
      write_text(out / "saliency_metrics.csv", csv);
      report.add_output(out / "saliency_metrics.csv");
      report.write(out);
    }
    std::fputs(csv.c_str(), stdout);
    return 0;
  }

  throw std::invalid_argument("unknown subcommand '" + command + "'");
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Attended-awareness estimation from noisy gaze: synthetic harness"};
  app.name("gazeaware");
  app.require_subcommand(0, 1);
  app.fallthrough();

  GlobalOptions opts;
  app.add_option("--config", opts.config_path, "JSON configuration file");
  app.add_option("--seed", opts.seed, "Master seed override")->each([&](const std::string&) {
    opts.seed_set = true;
  });
  app.add_option("--out", opts.out_dir, "Output directory");

  std::string scene_dir, gaze_override, mode = "recursive", maps_dir, pg_dir, pred_dir;

  CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scene package");
  CLI::App* fg = app.add_subcommand("fg", "Filtered-gaze baseline estimate");
  fg->add_option("--scene", scene_dir, "Scene package directory")->required();
  fg->add_option("--gaze", gaze_override, "Gaze JSONL overriding the package scanpath");
  CLI::App* estimate = app.add_subcommand("estimate", "Recursive or variational estimate");
  estimate->add_option("--scene", scene_dir, "Scene package directory")->required();
  estimate->add_option("--mode", mode, "recursive|variational")->required();
  estimate->add_option("--gaze", gaze_override, "Gaze JSONL overriding the package scanpath");
  CLI::App* denoise = app.add_subcommand("denoise-bench", "Gaze denoising MAE table");
  CLI::App* recal = app.add_subcommand("recalibrate-bench", "Recalibration error table");
  CLI::App* aware = app.add_subcommand("awareness-bench", "FG vs variational MSE table");
  CLI::App* ablate = app.add_subcommand("ablate", "Leave-one-out objective ablation table");
  CLI::App* objective = app.add_subcommand("objective", "Score an awareness map package");
  objective->add_option("--scene", scene_dir, "Scene package directory")->required();
  objective->add_option("--maps", maps_dir, "Directory of aw_NNNNNN.pgm awareness maps")
      ->required();
  objective->add_option("--pg", pg_dir, "Directory of pg_NNNNNN.pgm gaze density maps");
  objective->add_option("--gaze", gaze_override, "Gaze JSONL overriding the package scanpath");
  CLI::App* gradcheck = app.add_subcommand("gradcheck", "Analytic vs finite-difference gradients");
  CLI::App* evalsal = app.add_subcommand("eval-saliency", "KL/CC/IG of predicted saliency");
  evalsal->add_option("--scene", scene_dir, "Scene package directory")->required();
  evalsal->add_option("--pred", pred_dir, "Directory of sal_NNNNNN.pgm predictions")->required();
  evalsal->add_option("--gaze", gaze_override, "Gaze JSONL overriding the package scanpath");
  (void)synth;
  (void)denoise;
  (void)recal;
  (void)aware;
  (void)ablate;
  (void)gradcheck;

  // CLI11's vector overload consumes the arguments back to front
  std::vector<std::string> argv(args.rbegin(), args.rend());
  try {
    app.parse(argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  if (app.get_subcommands().empty()) {
    std::cerr << app.help() << "\n";
    return 1;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    return dispatch(command, opts, scene_dir, gaze_override, mode, maps_dir, pg_dir, pred_dir);
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace gazeaware::cli
