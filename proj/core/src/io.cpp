#include "gazeaware/io.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace gazeaware {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::runtime_error(msg); }

std::ifstream open_in(const std::filesystem::path& path, bool binary) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) fail("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const std::filesystem::path& path, bool binary) {
  std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
  if (!out) fail("cannot write " + path.string());
  return out;
}

void put_u32le(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                              static_cast<unsigned char>((v >> 8) & 0xff),
                              static_cast<unsigned char>((v >> 16) & 0xff),
                              static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void put_f32le(std::ostream& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32le(out, bits);
}

}  // namespace

// ---- gaze JSONL ----

std::vector<GazeFrame> read_gaze_jsonl(const std::filesystem::path& path,
                                       std::vector<std::string>* warnings) {
  std::ifstream in = open_in(path, false);
  std::vector<GazeFrame> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      fail(path.string() + ": malformed JSON at line " + std::to_string(line_no));
    }
    if (!j.is_object() || !j.contains("frame") || !j.contains("points") || !j.contains("valid")) {
      fail(path.string() + ": line " + std::to_string(line_no) +
           " needs keys frame, points, valid");
    }
    GazeFrame frame;
    try {
      frame.frame_index = j.at("frame").get<int>();
      const auto& points = j.at("points");
      const auto& valid = j.at("valid");
      if (points.size() != GazeFrame::kSlots || valid.size() != GazeFrame::kSlots) {
        fail(path.string() + ": line " + std::to_string(line_no) + " must carry exactly " +
             std::to_string(GazeFrame::kSlots) + " point slots");
      }
      for (int s = 0; s < GazeFrame::kSlots; ++s) {
        if (points[s].size() != 2) {
          fail(path.string() + ": line " + std::to_string(line_no) + " point " +
               std::to_string(s) + " must be [x, y]");
        }
        frame.points[s] = {points[s][0].get<double>(), points[s][1].get<double>()};
        frame.valid[s] = valid[s].get<bool>();
      }
    } catch (const json::exception&) {
      fail(path.string() + ": bad field types at line " + std::to_string(line_no));
    }
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!frame.valid[s]) continue;
      const GazePoint& p = frame.points[s];
      if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0) {
        fail(path.string() + ": line " + std::to_string(line_no) +
             " valid point outside [0,1]^2");
      }
    }
    out.push_back(frame);
  }
  if (out.empty() && warnings) {
    warnings->push_back(path.string() + ": empty gaze file");
  }
  return out;
}

void write_gaze_jsonl(const std::filesystem::path& path, const std::vector<GazeFrame>& gaze) {
  std::ofstream out = open_out(path, false);
  for (const GazeFrame& frame : gaze) {
    json points = json::array();
    json valid = json::array();
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      points.push_back({frame.points[s].x, frame.points[s].y});
      valid.push_back(frame.valid[s]);
    }
    const json j = {{"frame", frame.frame_index}, {"points", points}, {"valid", valid}};
    out << j.dump() << '\n';
  }
}

// ---- flow (MFLO) ----

void write_flow(const std::filesystem::path& path, const std::vector<FlowField>& flows) {
  std::ofstream out = open_out(path, true);
  for (const FlowField& f : flows) {
    out.write("MFLO", 4);
    put_u32le(out, static_cast<std::uint32_t>(f.width));
    put_u32le(out, static_cast<std::uint32_t>(f.height));
    for (double v : f.u) put_f32le(out, static_cast<float>(v));
    for (double v : f.v) put_f32le(out, static_cast<float>(v));
  }
}

std::vector<FlowField> read_flow(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  std::vector<FlowField> out;
  std::size_t offset = 0;

  const auto read_bytes = [&](char* dst, std::size_t n, const char* what) -> bool {
    in.read(dst, static_cast<std::streamsize>(n));
    const std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got == 0 && in.eof()) return false;  // clean end between frames
    if (got != n) {
      fail(path.string() + ": truncated " + what + " at byte " + std::to_string(offset + got));
    }
    offset += n;
    return true;
  };

  const auto get_u32 = [&](const char* what) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (in.gcount() != 4) {
      fail(path.string() + ": truncated " + what + " at byte " +
           std::to_string(offset + static_cast<std::size_t>(in.gcount())));
    }
    offset += 4;
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
  };

  while (true) {
    char magic[4];
    if (!read_bytes(magic, 4, "magic")) break;
    if (std::memcmp(magic, "MFLO", 4) != 0) {
      fail(path.string() + ": bad magic at byte " + std::to_string(offset - 4));
    }
    const std::uint32_t w = get_u32("width");
    const std::uint32_t h = get_u32("height");
    if (w < 2 || h < 2 || w > 1u << 16 || h > 1u << 16) {
      fail(path.string() + ": implausible flow dimensions " + std::to_string(w) + "x" +
           std::to_string(h));
    }
    FlowField f(static_cast<int>(w), static_cast<int>(h));
    const std::size_t n = static_cast<std::size_t>(w) * h;
    std::vector<unsigned char> raw(n * 4);
    for (auto* plane : {&f.u, &f.v}) {
      if (!read_bytes(reinterpret_cast<char*>(raw.data()), raw.size(), "plane data")) {
        fail(path.string() + ": truncated plane data at byte " + std::to_string(offset));
      }
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t bits = static_cast<std::uint32_t>(raw[4 * i]) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 1]) << 8) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 2]) << 16) |
                                   (static_cast<std::uint32_t>(raw[4 * i + 3]) << 24);
        float v;
        std::memcpy(&v, &bits, 4);
        (*plane)[i] = static_cast<double>(v);
      }
    }
    out.push_back(std::move(f));
  }
  return out;
}

// ---- heatmap PGM ----

void write_heatmap_pgm(const Heatmap& map, const std::filesystem::path& path) {
  for (double v : map.values) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("write_heatmap_pgm: values must lie in [0,1]");
    }
  }
  std::ofstream out = open_out(path, true);
  out << "P5\n" << map.width << ' ' << map.height << "\n65535\n";
  std::vector<unsigned char> data;
  data.reserve(map.values.size() * 2);
  for (double v : map.values) {
    const unsigned sample = static_cast<unsigned>(std::lround(v * 65535.0));
    data.push_back(static_cast<unsigned char>(sample >> 8));
    data.push_back(static_cast<unsigned char>(sample & 0xff));
  }
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size()));
}

Heatmap read_heatmap_pgm(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, true);
  std::string magic;
  int w = 0, h = 0, maxval = 0;
  in >> magic >> w >> h >> maxval;
  if (!in || magic != "P5") fail(path.string() + ": not a binary PGM (P5) file");
  if (w < 2 || h < 2) fail(path.string() + ": implausible dimensions");
  if (maxval != 65535) fail(path.string() + ": expected 16-bit maxval 65535");
  in.get();  // single whitespace before the raster
  std::vector<unsigned char> data(static_cast<std::size_t>(w) * h * 2);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (static_cast<std::size_t>(in.gcount()) != data.size()) {
    fail(path.string() + ": truncated raster data");
  }
  Heatmap map(w, h);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const unsigned sample =
        (static_cast<unsigned>(data[2 * i]) << 8) | static_cast<unsigned>(data[2 * i + 1]);
    map.values[i] = sample / 65535.0;
  }
  return map;
}

// ---- annotations JSON ----

std::vector<AnnotationRecord> read_annotations_json(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, false);
  json j;
  try {
    in >> j;
  } catch (const json::exception&) {
    fail(path.string() + ": malformed JSON");
  }
  if (!j.is_array()) fail(path.string() + ": expected a JSON array of annotations");
  std::vector<AnnotationRecord> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& rec = j[i];
    try {
      AnnotationRecord a;
      a.frame_index = rec.at("frame").get<int>();
      a.x = rec.at("x").get<double>();
      a.y = rec.at("y").get<double>();
      a.label = rec.at("label").get<double>();
      if (a.label < 0.0 || a.label > 1.0) {
        fail(path.string() + ": annotation " + std::to_string(i) + " label outside [0,1]");
      }
      out.push_back(a);
    } catch (const json::exception&) {
      fail(path.string() + ": bad annotation record at index " + std::to_string(i));
    }
  }
  return out;
}

void write_annotations_json(const std::filesystem::path& path,
                            const std::vector<AnnotationRecord>& annotations) {
  json j = json::array();
  for (const AnnotationRecord& a : annotations) {
    j.push_back({{"frame", a.frame_index}, {"x", a.x}, {"y", a.y}, {"label", a.label}});
  }
  std::ofstream out = open_out(path, false);
  out << j.dump(2) << '\n';
}

// ---- configuration ----

LossWeights desk_scale_weights() {
  LossWeights w;
  w.alpha_g = 0.0;  // the variational fit has no gaze-density variable
  w.alpha_att = 12.0;
  w.alpha_aa = 1.0;
  w.alpha_s_a = 2e-3;
  w.alpha_s_g = 0.0;
  w.alpha_t = 0.05;
  w.alpha_dec = 0.3;
  w.alpha_cap = 1e-5;
  w.alpha_con_g = 0.0;
  w.alpha_con_a = 0.0;
  return w;
}

namespace {

void expect_keys(const json& obj, const std::string& section,
                 std::initializer_list<const char*> keys) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : keys) {
      if (item.key() == k) {
        known = true;
        break;
      }
    }
    if (!known) {
      fail("config: unknown key '" + (section.empty() ? item.key() : section + "." + item.key()) +
           "'");
    }
  }
}

template <typename T>
void get_if(const json& obj, const std::string& section, const char* key, T& out) {
  if (!obj.contains(key)) return;
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    fail("config: bad value for '" + (section.empty() ? std::string(key) : section + "." + key) +
         "'");
  }
}

void parse_weights(const json& obj, const std::string& section, LossWeights& w) {
  expect_keys(obj, section,
              {"alpha_g", "alpha_att", "alpha_aa", "alpha_s_a", "alpha_s_g", "alpha_t",
               "alpha_dec", "alpha_cap", "alpha_con_g", "alpha_con_a", "w_of", "eps_dec", "c1",
               "c2"});
  get_if(obj, section, "alpha_g", w.alpha_g);
  get_if(obj, section, "alpha_att", w.alpha_att);
  get_if(obj, section, "alpha_aa", w.alpha_aa);
  get_if(obj, section, "alpha_s_a", w.alpha_s_a);
  get_if(obj, section, "alpha_s_g", w.alpha_s_g);
  get_if(obj, section, "alpha_t", w.alpha_t);
  get_if(obj, section, "alpha_dec", w.alpha_dec);
  get_if(obj, section, "alpha_cap", w.alpha_cap);
  get_if(obj, section, "alpha_con_g", w.alpha_con_g);
  get_if(obj, section, "alpha_con_a", w.alpha_con_a);
  get_if(obj, section, "w_of", w.w_of);
  get_if(obj, section, "eps_dec", w.eps_dec);
  get_if(obj, section, "c1", w.c1);
  get_if(obj, section, "c2", w.c2);
  if (!w.valid()) fail("config: '" + section + "' violates the weight invariants");
}

json weights_to_json(const LossWeights& w) {
  return {{"alpha_g", w.alpha_g},     {"alpha_att", w.alpha_att},
          {"alpha_aa", w.alpha_aa},   {"alpha_s_a", w.alpha_s_a},
          {"alpha_s_g", w.alpha_s_g}, {"alpha_t", w.alpha_t},
          {"alpha_dec", w.alpha_dec}, {"alpha_cap", w.alpha_cap},
          {"alpha_con_g", w.alpha_con_g}, {"alpha_con_a", w.alpha_con_a},
          {"w_of", w.w_of},           {"eps_dec", w.eps_dec},
          {"c1", w.c1},               {"c2", w.c2}};
}

}  // namespace

Config parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) fail("config: top level must be an object");

  Config c;
  expect_keys(j, "",
              {"seed", "scene", "loss_weights", "estimator", "noise", "saliency", "scanpath",
               "annotation_mix", "denoise_bench", "recalibrate_bench", "awareness_bench"});
  get_if(j, "", "seed", c.seed);

  if (j.contains("scene")) {
    const json& s = j.at("scene");
    expect_keys(s, "scene", {"width", "height", "frames", "objects", "annotations"});
    get_if(s, "scene", "width", c.width);
    get_if(s, "scene", "height", c.height);
    get_if(s, "scene", "frames", c.frames);
    get_if(s, "scene", "objects", c.objects);
    get_if(s, "scene", "annotations", c.annotations);
  }
  if (j.contains("loss_weights")) parse_weights(j.at("loss_weights"), "loss_weights", c.weights);
  if (j.contains("estimator")) {
    const json& s = j.at("estimator");
    expect_keys(s, "estimator",
                {"deposit_sigma", "fg_sigma0", "fg_sigma_growth", "fg_amplitude_decay",
                 "capacity_budget", "step_size", "max_iterations", "tolerance"});
    get_if(s, "estimator", "deposit_sigma", c.estimator.deposit_sigma);
    get_if(s, "estimator", "fg_sigma0", c.estimator.fg_sigma0);
    get_if(s, "estimator", "fg_sigma_growth", c.estimator.fg_sigma_growth);
    get_if(s, "estimator", "fg_amplitude_decay", c.estimator.fg_amplitude_decay);
    get_if(s, "estimator", "capacity_budget", c.estimator.capacity_budget);
    get_if(s, "estimator", "step_size", c.estimator.step_size);
    get_if(s, "estimator", "max_iterations", c.estimator.max_iterations);
    get_if(s, "estimator", "tolerance", c.estimator.tolerance);
    if (!c.estimator.valid()) fail("config: 'estimator' violates its invariants");
  }
  if (j.contains("noise")) {
    const json& s = j.at("noise");
    expect_keys(s, "noise", {"sigma_n", "w", "center_x", "center_y"});
    get_if(s, "noise", "sigma_n", c.noise.sigma_n);
    get_if(s, "noise", "w", c.noise.w);
    get_if(s, "noise", "center_x", c.noise.center_x);
    get_if(s, "noise", "center_y", c.noise.center_y);
    if (c.noise.sigma_n < 0.0 || c.noise.w < 0.0) fail("config: 'noise' must be nonnegative");
  }
  if (j.contains("saliency")) {
    const json& s = j.at("saliency");
    expect_keys(s, "saliency",
                {"center_prior_weight", "surround_small_radius", "surround_large_radius",
                 "prior_sigma_frac"});
    get_if(s, "saliency", "center_prior_weight", c.saliency.center_prior_weight);
    get_if(s, "saliency", "surround_small_radius", c.saliency.surround_small_radius);
    get_if(s, "saliency", "surround_large_radius", c.saliency.surround_large_radius);
    get_if(s, "saliency", "prior_sigma_frac", c.saliency.prior_sigma_frac);
  }
  if (j.contains("scanpath")) {
    const json& s = j.at("scanpath");
    expect_keys(s, "scanpath", {"duration_min", "duration_max", "background_prob", "blink_prob"});
    get_if(s, "scanpath", "duration_min", c.scanpath.duration_min);
    get_if(s, "scanpath", "duration_max", c.scanpath.duration_max);
    get_if(s, "scanpath", "background_prob", c.scanpath.background_prob);
    get_if(s, "scanpath", "blink_prob", c.scanpath.blink_prob);
  }
  if (j.contains("annotation_mix")) {
    const json& s = j.at("annotation_mix");
    expect_keys(s, "annotation_mix", {"object", "edge", "background"});
    get_if(s, "annotation_mix", "object", c.annotation_mix.object);
    get_if(s, "annotation_mix", "edge", c.annotation_mix.edge);
    get_if(s, "annotation_mix", "background", c.annotation_mix.background);
  }
  if (j.contains("denoise_bench")) {
    const json& s = j.at("denoise_bench");
    expect_keys(s, "denoise_bench",
                {"sigmas", "scenes", "lambda", "cond_sigma", "ms_max_iterations",
                 "ms_epsilon_px"});
    get_if(s, "denoise_bench", "sigmas", c.denoise.sigmas);
    get_if(s, "denoise_bench", "scenes", c.denoise.scenes);
    get_if(s, "denoise_bench", "lambda", c.denoise.lambda);
    get_if(s, "denoise_bench", "cond_sigma", c.denoise.cond_sigma);
    get_if(s, "denoise_bench", "ms_max_iterations", c.denoise.ms_max_iterations);
    get_if(s, "denoise_bench", "ms_epsilon_px", c.denoise.ms_epsilon_px);
  }
  if (j.contains("recalibrate_bench")) {
    const json& s = j.at("recalibrate_bench");
    expect_keys(s, "recalibrate_bench", {"sigmas", "runs", "frames", "fit"});
    get_if(s, "recalibrate_bench", "sigmas", c.recalibrate.sigmas);
    get_if(s, "recalibrate_bench", "runs", c.recalibrate.runs);
    get_if(s, "recalibrate_bench", "frames", c.recalibrate.frames);
    if (s.contains("fit")) {
      const json& f = s.at("fit");
      expect_keys(f, "recalibrate_bench.fit",
                  {"hidden", "learning_rate", "iterations", "init_noise", "supervised_sigma"});
      get_if(f, "recalibrate_bench.fit", "hidden", c.recalibrate.fit.hidden);
      get_if(f, "recalibrate_bench.fit", "learning_rate", c.recalibrate.fit.learning_rate);
      get_if(f, "recalibrate_bench.fit", "iterations", c.recalibrate.fit.iterations);
      get_if(f, "recalibrate_bench.fit", "init_noise", c.recalibrate.fit.init_noise);
      get_if(f, "recalibrate_bench.fit", "supervised_sigma", c.recalibrate.fit.supervised_sigma);
    }
  }
  if (j.contains("awareness_bench")) {
    const json& s = j.at("awareness_bench");
    expect_keys(s, "awareness_bench",
                {"width", "height", "frames", "scenes", "objects", "sigmas", "train_annotations",
                 "eval_annotations", "ablate_sigma", "weights"});
    get_if(s, "awareness_bench", "width", c.bench.width);
    get_if(s, "awareness_bench", "height", c.bench.height);
    get_if(s, "awareness_bench", "frames", c.bench.frames);
    get_if(s, "awareness_bench", "scenes", c.bench.scenes);
    get_if(s, "awareness_bench", "objects", c.bench.objects);
    get_if(s, "awareness_bench", "sigmas", c.bench.sigmas);
    get_if(s, "awareness_bench", "train_annotations", c.bench.train_annotations);
    get_if(s, "awareness_bench", "eval_annotations", c.bench.eval_annotations);
    get_if(s, "awareness_bench", "ablate_sigma", c.bench.ablate_sigma);
    if (s.contains("weights")) parse_weights(s.at("weights"), "awareness_bench.weights", c.bench.weights);
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in = open_in(path, false);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string config_to_json(const Config& c) {
  json j;
  j["seed"] = c.seed;
  j["scene"] = {{"width", c.width},
                {"height", c.height},
                {"frames", c.frames},
                {"objects", c.objects},
                {"annotations", c.annotations}};
  j["loss_weights"] = weights_to_json(c.weights);
  j["estimator"] = {{"deposit_sigma", c.estimator.deposit_sigma},
                    {"fg_sigma0", c.estimator.fg_sigma0},
                    {"fg_sigma_growth", c.estimator.fg_sigma_growth},
                    {"fg_amplitude_decay", c.estimator.fg_amplitude_decay},
                    {"capacity_budget", c.estimator.capacity_budget},
                    {"step_size", c.estimator.step_size},
                    {"max_iterations", c.estimator.max_iterations},
                    {"tolerance", c.estimator.tolerance}};
  j["noise"] = {{"sigma_n", c.noise.sigma_n},
                {"w", c.noise.w},
                {"center_x", c.noise.center_x},
                {"center_y", c.noise.center_y}};
  j["saliency"] = {{"center_prior_weight", c.saliency.center_prior_weight},
                   {"surround_small_radius", c.saliency.surround_small_radius},
                   {"surround_large_radius", c.saliency.surround_large_radius},
                   {"prior_sigma_frac", c.saliency.prior_sigma_frac}};
  j["scanpath"] = {{"duration_min", c.scanpath.duration_min},
                   {"duration_max", c.scanpath.duration_max},
                   {"background_prob", c.scanpath.background_prob},
                   {"blink_prob", c.scanpath.blink_prob}};
  j["annotation_mix"] = {{"object", c.annotation_mix.object},
                         {"edge", c.annotation_mix.edge},
                         {"background", c.annotation_mix.background}};
  j["denoise_bench"] = {{"sigmas", c.denoise.sigmas},
                        {"scenes", c.denoise.scenes},
                        {"lambda", c.denoise.lambda},
                        {"cond_sigma", c.denoise.cond_sigma},
                        {"ms_max_iterations", c.denoise.ms_max_iterations},
                        {"ms_epsilon_px", c.denoise.ms_epsilon_px}};
  j["recalibrate_bench"] = {{"sigmas", c.recalibrate.sigmas},
                            {"runs", c.recalibrate.runs},
                            {"frames", c.recalibrate.frames},
                            {"fit",
                             {{"hidden", c.recalibrate.fit.hidden},
                              {"learning_rate", c.recalibrate.fit.learning_rate},
                              {"iterations", c.recalibrate.fit.iterations},
                              {"init_noise", c.recalibrate.fit.init_noise},
                              {"supervised_sigma", c.recalibrate.fit.supervised_sigma}}}};
  j["awareness_bench"] = {{"width", c.bench.width},
                          {"height", c.bench.height},
                          {"frames", c.bench.frames},
                          {"scenes", c.bench.scenes},
                          {"objects", c.bench.objects},
                          {"sigmas", c.bench.sigmas},
                          {"train_annotations", c.bench.train_annotations},
                          {"eval_annotations", c.bench.eval_annotations},
                          {"ablate_sigma", c.bench.ablate_sigma},
                          {"weights", weights_to_json(c.bench.weights)}};
  return j.dump(2);
}

std::uint64_t config_hash(const Config& config) {
  // FNV-1a over the canonical rendering
  const std::string text = config_to_json(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace gazeaware
