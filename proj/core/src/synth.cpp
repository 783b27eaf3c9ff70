#include "gazeaware/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gazeaware/rng.hpp"

namespace gazeaware {

namespace {

struct RectAt {
  double x0, y0, x1, y1;  // [x0, x1) x [y0, y1) in pixel coordinates
};

RectAt rect_at(const RectObject& obj, int t) {
  const double x = obj.x + obj.vx * t;
  const double y = obj.y + obj.vy * t;
  return {x, y, x + obj.w, y + obj.h};
}

bool rect_contains(const RectAt& r, int px, int py) {
  return px >= r.x0 && px < r.x1 && py >= r.y0 && py < r.y1;
}

}  // namespace

SceneSpec random_scene(int width, int height, int frames, int num_objects, std::uint64_t seed) {
  Rng rng(seed);
  SceneSpec spec;
  spec.width = width;
  spec.height = height;
  spec.frames = frames;
  spec.seed = seed;
  spec.background = 0.1;
  const double min_dim = std::min(width, height);
  for (int i = 0; i < num_objects; ++i) {
    RectObject obj;
    obj.w = std::floor(rng.uniform(0.10, 0.20) * min_dim);
    obj.h = std::floor(rng.uniform(0.10, 0.20) * min_dim);
    // keep the whole trajectory on the canvas
    const double speed_cap = 1.0;
    obj.vx = rng.uniform(-speed_cap, speed_cap);
    obj.vy = rng.uniform(-speed_cap, speed_cap);
    const double travel_x = obj.vx * (frames - 1);
    const double travel_y = obj.vy * (frames - 1);
    const double lo_x = std::max(1.0, 1.0 - travel_x);
    const double hi_x = std::min(width - 1.0 - obj.w, width - 1.0 - obj.w - travel_x);
    const double lo_y = std::max(1.0, 1.0 - travel_y);
    const double hi_y = std::min(height - 1.0 - obj.h, height - 1.0 - obj.h - travel_y);
    obj.x = std::floor(rng.uniform(lo_x, std::max(lo_x + 1.0, hi_x)));
    obj.y = std::floor(rng.uniform(lo_y, std::max(lo_y + 1.0, hi_y)));
    obj.intensity = rng.uniform(0.6, 1.0);
    spec.objects.push_back(obj);
  }
  return spec;
}

PixelPoint GroundTruth::object_centroid(int object, int t) const {
  const RectObject& obj = spec.objects.at(object);
  return {obj.x + obj.vx * t + 0.5 * (obj.w - 1.0), obj.y + obj.vy * t + 0.5 * (obj.h - 1.0)};
}

GroundTruth gen_scene(const SceneSpec& spec) {
  if (spec.width < 2 || spec.height < 2 || spec.frames < 2) {
    throw std::invalid_argument("gen_scene: scene must be at least 2x2 with 2 frames");
  }
  GroundTruth gt;
  gt.spec = spec;
  gt.frames.reserve(spec.frames);
  gt.object_mask.reserve(spec.frames);
  gt.flow.reserve(spec.frames - 1);

  std::vector<bool> flagged(spec.objects.size(), false);

  for (int t = 0; t < spec.frames; ++t) {
    Heatmap frame = Heatmap::constant(spec.width, spec.height, spec.background);
    Heatmap mask(spec.width, spec.height);
    FlowField flow(spec.width, spec.height);
    for (std::size_t k = 0; k < spec.objects.size(); ++k) {
      const RectAt r = rect_at(spec.objects[k], t);
      if (!flagged[k] &&
          (r.x0 < 0.0 || r.y0 < 0.0 || r.x1 > spec.width || r.y1 > spec.height)) {
        flagged[k] = true;
        gt.warnings.push_back("object " + std::to_string(k) + " clipped at frame " +
                              std::to_string(t));
      }
      const int x_lo = std::max(0, static_cast<int>(std::ceil(r.x0)));
      const int x_hi = std::min(spec.width - 1, static_cast<int>(std::ceil(r.x1)) - 1);
      const int y_lo = std::max(0, static_cast<int>(std::ceil(r.y0)));
      const int y_hi = std::min(spec.height - 1, static_cast<int>(std::ceil(r.y1)) - 1);
      for (int y = y_lo; y <= y_hi; ++y) {
        for (int x = x_lo; x <= x_hi; ++x) {
          if (!rect_contains(r, x, y)) continue;
          frame.at(x, y) = spec.objects[k].intensity;
          mask.at(x, y) = 1.0;
          // later-listed object wins in overlap
          flow.u[static_cast<std::size_t>(y) * spec.width + x] = spec.objects[k].vx;
          flow.v[static_cast<std::size_t>(y) * spec.width + x] = spec.objects[k].vy;
        }
      }
    }
    gt.frames.push_back(std::move(frame));
    gt.object_mask.push_back(std::move(mask));
    if (t < spec.frames - 1) gt.flow.push_back(std::move(flow));
  }
  return gt;
}

std::vector<GazeFrame> gen_scanpath(const GroundTruth& gt, const ScanpathConfig& config,
                                    std::uint64_t seed) {
  if (gt.spec.objects.empty()) {
    throw std::invalid_argument("gen_scanpath: scene has no objects to fixate");
  }
  if (config.duration_min < 1 || config.duration_max < config.duration_min) {
    throw std::invalid_argument("gen_scanpath: bad fixation duration range");
  }
  Rng rng(seed);
  const int w = gt.spec.width, h = gt.spec.height;
  std::vector<GazeFrame> out;
  out.reserve(gt.spec.frames);

  int remaining = 0;
  int target_object = -1;        // -1 = background fixation
  GazePoint background_target{};

  for (int t = 0; t < gt.spec.frames; ++t) {
    if (remaining == 0) {
      remaining = rng.uniform_int(config.duration_min, config.duration_max);
      if (rng.bernoulli(config.background_prob)) {
        target_object = -1;
        background_target = {rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
      } else {
        target_object = rng.uniform_int(0, static_cast<int>(gt.spec.objects.size()) - 1);
      }
    }
    GazePoint target;
    if (target_object >= 0) {
      const PixelPoint c = gt.object_centroid(target_object, t);
      target = {px_to_norm(std::clamp(c.x, 0.0, w - 1.0), w),
                px_to_norm(std::clamp(c.y, 0.0, h - 1.0), h)};
    } else {
      target = background_target;
    }
    GazeFrame frame;
    frame.frame_index = t;
    const bool blink = rng.bernoulli(config.blink_prob);
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      frame.points[s] = target;
      frame.valid[s] = !blink;
    }
    out.push_back(frame);
    --remaining;
  }
  return out;
}

AwarenessSequence gen_awareness_gt(const GroundTruth& gt, const EstimatorConfig& config,
                                   const LossWeights& weights) {
  if (gt.scanpath.empty()) {
    throw std::invalid_argument("gen_awareness_gt: scanpath not generated yet");
  }
  return recursive_run(gt.scanpath, gt.flow, gt.spec.width, gt.spec.height, config, weights);
}

std::vector<AnnotationRecord> gen_annotations(const GroundTruth& gt, int count,
                                              const AnnotationMix& mix, std::uint64_t seed) {
  if (count < 1) {
    throw std::invalid_argument("gen_annotations: count must be >= 1");
  }
  if (gt.awareness.empty()) {
    throw std::invalid_argument("gen_annotations: oracle awareness not generated yet");
  }
  Rng rng(seed);
  const int w = gt.spec.width, h = gt.spec.height;

  const auto is_edge = [&](const Heatmap& mask, int x, int y) {
    if (mask.at(x, y) == 0.0) return false;
    if (x > 0 && mask.at(x - 1, y) == 0.0) return true;
    if (x < w - 1 && mask.at(x + 1, y) == 0.0) return true;
    if (y > 0 && mask.at(x, y - 1) == 0.0) return true;
    if (y < h - 1 && mask.at(x, y + 1) == 0.0) return true;
    return false;
  };

  // per-frame pixel pools: [0]=object, [1]=edge, [2]=background
  std::vector<std::array<std::vector<int>, 3>> pools(gt.spec.frames);
  for (int t = 0; t < gt.spec.frames; ++t) {
    const Heatmap& mask = gt.object_mask[t];
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) {
        const int idx = y * w + x;
        if (mask.at(x, y) > 0.0) {
          pools[t][0].push_back(idx);
          if (is_edge(mask, x, y)) pools[t][1].push_back(idx);
        } else {
          pools[t][2].push_back(idx);
        }
      }
  }

  const double norm = std::max(mix.object + mix.edge + mix.background, 1e-12);
  std::vector<AnnotationRecord> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const int t = rng.uniform_int(0, gt.spec.frames - 1);
    const double pick = rng.uniform() * norm;
    int category = pick < mix.object ? 0 : (pick < mix.object + mix.edge ? 1 : 2);
    while (pools[t][category].empty()) category = (category + 1) % 3;
    const auto& pool = pools[t][category];
    const int idx = pool[rng.uniform_int(0, static_cast<int>(pool.size()) - 1)];
    const int px = idx % w;
    const int py = idx / w;
    AnnotationRecord rec;
    rec.frame_index = t;
    rec.x = px_to_norm(px, w);
    rec.y = px_to_norm(py, h);
    // 5-level annotation scale mapped back to [0,1]
    rec.label = std::round(gt.awareness[t].at(px, py) * 4.0) / 4.0;
    out.push_back(rec);
  }
  return out;
}

}  // namespace gazeaware
