#include "gazeaware/awareness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gazeaware/errors.hpp"

namespace gazeaware {

namespace {

// Adds a peak-1 Gaussian (truncated at 4 sigma) for every valid point.
void deposit_gaze(Heatmap& map, const GazeFrame& gaze, double sigma_norm) {
  const double sigma_px = sigma_norm * map_diag(map.width, map.height);
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma_px * sigma_px);
  const double reach = 4.0 * sigma_px;
  for (int s = 0; s < GazeFrame::kSlots; ++s) {
    if (!gaze.valid[s]) continue;
    const double cx = norm_to_px(gaze.points[s].x, map.width);
    const double cy = norm_to_px(gaze.points[s].y, map.height);
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - reach)));
    const int x_hi = std::min(map.width - 1, static_cast<int>(std::ceil(cx + reach)));
    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - reach)));
    const int y_hi = std::min(map.height - 1, static_cast<int>(std::ceil(cy + reach)));
    for (int y = y_lo; y <= y_hi; ++y)
      for (int x = x_lo; x <= x_hi; ++x) {
        const double dx = x - cx, dy = y - cy;
        map.at(x, y) += std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
      }
  }
}

void check_aligned(std::size_t gaze_frames, std::size_t flow_frames, const char* who) {
  if (gaze_frames == 0) {
    throw std::invalid_argument(std::string(who) + ": empty gaze sequence");
  }
  if (flow_frames + 1 != gaze_frames) {
    throw std::invalid_argument(std::string(who) + ": need exactly T-1 flow fields for T frames");
  }
}

}  // namespace

AwarenessSequence fg_estimate(const std::vector<GazeFrame>& gaze,
                              const std::vector<FlowField>& flows, int width, int height,
                              const EstimatorConfig& config) {
  check_aligned(gaze.size(), flows.size(), "fg_estimate");
  const double diag = map_diag(width, height);

  struct Sample {
    double cx, cy;  // pixels, advected to the current frame
    int age;
  };
  std::vector<Sample> samples;
  AwarenessSequence out;
  out.reserve(gaze.size());

  for (std::size_t t = 0; t < gaze.size(); ++t) {
    if (t > 0) {
      const FlowField& flow = flows[t - 1];
      for (Sample& s : samples) {
        const double u = bilinear_sample_plane(flow.u, width, height, s.cx, s.cy);
        const double v = bilinear_sample_plane(flow.v, width, height, s.cx, s.cy);
        s.cx += u;
        s.cy += v;
        s.age += 1;
      }
    }
    for (int slot = 0; slot < GazeFrame::kSlots; ++slot) {
      if (!gaze[t].valid[slot]) continue;
      samples.push_back({norm_to_px(gaze[t].points[slot].x, width),
                         norm_to_px(gaze[t].points[slot].y, height), 0});
    }

    Heatmap map(width, height);
    for (const Sample& s : samples) {
      const double sigma_px = (config.fg_sigma0 + config.fg_sigma_growth * s.age) * diag;
      const double amp = std::pow(config.fg_amplitude_decay, s.age);
      const double inv_two_sigma2 = 1.0 / (2.0 * sigma_px * sigma_px);
      const double reach = 4.0 * sigma_px;
      const int x_lo = std::max(0, static_cast<int>(std::floor(s.cx - reach)));
      const int x_hi = std::min(width - 1, static_cast<int>(std::ceil(s.cx + reach)));
      const int y_lo = std::max(0, static_cast<int>(std::floor(s.cy - reach)));
      const int y_hi = std::min(height - 1, static_cast<int>(std::ceil(s.cy + reach)));
      for (int y = y_lo; y <= y_hi; ++y)
        for (int x = x_lo; x <= x_hi; ++x) {
          const double dx = x - s.cx, dy = y - s.cy;
          const double v = amp * std::exp(-(dx * dx + dy * dy) * inv_two_sigma2);
          double& cell = map.at(x, y);
          if (v > cell) cell = v;
        }
    }
    for (double& v : map.values) v = std::clamp(v, 0.0, 1.0);
    out.push_back(std::move(map));
  }
  return out;
}

Heatmap recursive_step(const Heatmap& prev, const GazeFrame& gaze, const FlowField& flow,
                       const EstimatorConfig& config, const LossWeights& weights) {
  // Awareness rides along with the scene (A5): pull each pixel from upstream.
  Heatmap next = advect_forward(prev, flow);
  const double keep = 1.0 - weights.eps_dec;
  for (double& v : next.values) v *= keep;
  deposit_gaze(next, gaze, config.deposit_sigma);
  for (double& v : next.values) v = std::clamp(v, 0.0, 1.0);

  const double budget = config.capacity_budget * next.width * next.height;
  const double mass = next.sum();
  if (mass > budget) {
    const double scale = budget / mass;
    for (double& v : next.values) v *= scale;
  }
  return next;
}

AwarenessSequence recursive_run(const std::vector<GazeFrame>& gaze,
                                const std::vector<FlowField>& flows, int width, int height,
                                const EstimatorConfig& config, const LossWeights& weights,
                                const Heatmap* initial) {
  check_aligned(gaze.size(), flows.size(), "recursive_run");
  Heatmap state = initial ? *initial : Heatmap::zeros(width, height);
  const FlowField still = FlowField::zero(width, height);
  AwarenessSequence out;
  out.reserve(gaze.size());
  for (std::size_t t = 0; t < gaze.size(); ++t) {
    state = recursive_step(state, gaze[t], t == 0 ? still : flows[t - 1], config, weights);
    out.push_back(state);
  }
  return out;
}

namespace {

// Precomputed lookup structure for the variational objective: all bilinear
// taps and spatial denominators depend only on the fixed batch inputs.
struct FitWorkspace {
  int width = 0, height = 0, frames = 0;
  double alpha_att = 0.0, alpha_aa = 0.0, alpha_s_a = 0.0, alpha_t = 0.0, alpha_dec = 0.0,
         alpha_cap = 0.0;
  double w_of = 0.5, c1 = 0.1, c2 = 1.0, keep = 0.8;

  struct PointTap {
    int frame;
    BilinearTaps taps;
    double target;  // 1 for gaze, label for annotations
  };
  std::vector<PointTap> gaze_taps;
  std::vector<PointTap> annotation_taps;
  std::vector<std::vector<BilinearTaps>> flow_taps;   // [t][pixel], t -> t+1
  std::vector<std::vector<double>> spatial_inv_denom;  // [t][pixel]

  explicit FitWorkspace(const SequenceBatch& batch, const LossWeights& weights) {
    width = batch.width();
    height = batch.height();
    frames = batch.frames();
    alpha_att = batch.annotations.empty() ? 0.0 : weights.alpha_att;
    alpha_aa = weights.alpha_aa;
    alpha_s_a = weights.alpha_s_a;
    alpha_t = frames >= 2 ? weights.alpha_t : 0.0;
    alpha_dec = frames >= 2 ? weights.alpha_dec : 0.0;
    alpha_cap = frames >= 2 ? weights.alpha_cap : 0.0;
    w_of = weights.w_of;
    c1 = weights.c1;
    c2 = weights.c2;
    keep = 1.0 - weights.eps_dec;

    for (int t = 0; t < frames; ++t) {
      for (int s = 0; s < GazeFrame::kSlots; ++s) {
        if (!batch.gaze[t].valid[s]) continue;
        gaze_taps.push_back({t,
                             bilinear_taps(width, height, norm_to_px(batch.gaze[t].points[s].x, width),
                                           norm_to_px(batch.gaze[t].points[s].y, height)),
                             1.0});
      }
    }
    for (const AnnotationRecord& rec : batch.annotations) {
      const int t = rec.frame_index - batch.start_frame;
      if (t < 0 || t >= frames) continue;
      annotation_taps.push_back(
          {t, bilinear_taps(width, height, norm_to_px(rec.x, width), norm_to_px(rec.y, height)),
           rec.label});
    }

    if (alpha_t > 0.0) {
      flow_taps.resize(frames - 1);
      for (int t = 0; t + 1 < frames; ++t) {
        flow_taps[t].reserve(static_cast<std::size_t>(width) * height);
        for (int y = 0; y < height; ++y)
          for (int x = 0; x < width; ++x)
            flow_taps[t].push_back(bilinear_taps(width, height, x + batch.flows[t].u_at(x, y),
                                                 y + batch.flows[t].v_at(x, y)));
      }
    }

    if (alpha_s_a > 0.0) {
      spatial_inv_denom.resize(frames);
      for (int t = 0; t < frames; ++t) {
        const Heatmap& img = batch.images[t];
        auto& plane = spatial_inv_denom[t];
        plane.reserve(img.values.size());
        for (int y = 0; y < height; ++y)
          for (int x = 0; x < width; ++x) {
            const double ix =
                (x < width - 1) ? img.at(x + 1, y) - img.at(x, y) : img.at(x, y) - img.at(x - 1, y);
            const double iy = (y < height - 1) ? img.at(x, y + 1) - img.at(x, y)
                                               : img.at(x, y) - img.at(x, y - 1);
            plane.push_back(1.0 / std::sqrt(ix * ix + iy * iy + kSpatialEps));
          }
      }
    }
  }

  static double sample(const Heatmap& m, const BilinearTaps& t) {
    return t.w00 * m.at(t.x0, t.y0) + t.w10 * m.at(t.x1, t.y0) + t.w01 * m.at(t.x0, t.y1) +
           t.w11 * m.at(t.x1, t.y1);
  }

  static void scatter(Heatmap& m, const BilinearTaps& t, double v) {
    m.at(t.x0, t.y0) += v * t.w00;
    m.at(t.x1, t.y0) += v * t.w10;
    m.at(t.x0, t.y1) += v * t.w01;
    m.at(t.x1, t.y1) += v * t.w11;
  }

  double value(const AwarenessSequence& maps, AwarenessSequence* grad_out = nullptr) const {
    double loss = 0.0;
    if (grad_out) {
      grad_out->assign(frames, Heatmap(width, height));
    }

    for (const PointTap& p : gaze_taps) {
      const double m = sample(maps[p.frame], p.taps);
      loss += alpha_aa * (m - 1.0) * (m - 1.0);
      if (grad_out) scatter((*grad_out)[p.frame], p.taps, alpha_aa * 2.0 * (m - 1.0));
    }
    for (const PointTap& p : annotation_taps) {
      const double m = sample(maps[p.frame], p.taps);
      loss += alpha_att * (m - p.target) * (m - p.target);
      if (grad_out) scatter((*grad_out)[p.frame], p.taps, alpha_att * 2.0 * (m - p.target));
    }

    if (alpha_t > 0.0) {
      for (int t = 0; t + 1 < frames; ++t) {
        const Heatmap& cur = maps[t];
        const Heatmap& next = maps[t + 1];
        const auto& taps = flow_taps[t];
        for (std::size_t i = 0; i < cur.values.size(); ++i) {
          const double a = sample(next, taps[i]);
          const double d = a - w_of * cur.values[i];
          const double neg = std::min(d, 0.0);
          loss += alpha_t * (c1 * std::max(d, 0.0) + c2 * neg * neg);
          if (grad_out) {
            const double dfdd = (d > 0.0 ? c1 : 0.0) + 2.0 * c2 * neg;
            if (dfdd != 0.0) {
              scatter((*grad_out)[t + 1], taps[i], alpha_t * dfdd);
              (*grad_out)[t].values[i] -= alpha_t * dfdd * w_of;
            }
          }
        }
      }
    }

    if (alpha_dec > 0.0) {
      for (int t = 0; t + 1 < frames; ++t) {
        const Heatmap& cur = maps[t];
        const Heatmap& next = maps[t + 1];
        for (std::size_t i = 0; i < cur.values.size(); ++i) {
          const double e = keep * cur.values[i] - next.values[i];
          loss += alpha_dec * e * e;
          if (grad_out) {
            (*grad_out)[t].values[i] += alpha_dec * 2.0 * e * keep;
            (*grad_out)[t + 1].values[i] -= alpha_dec * 2.0 * e;
          }
        }
      }
    }

    if (alpha_cap > 0.0) {
      for (int t = 0; t + 1 < frames; ++t) {
        const double d = maps[t].sum() - maps[t + 1].sum();
        loss += alpha_cap * d * d;
        if (grad_out) {
          for (std::size_t i = 0; i < maps[t].values.size(); ++i) {
            (*grad_out)[t].values[i] += alpha_cap * 2.0 * d;
            (*grad_out)[t + 1].values[i] -= alpha_cap * 2.0 * d;
          }
        }
      }
    }

    if (alpha_s_a > 0.0) {
      for (int t = 0; t < frames; ++t) {
        const Heatmap& phi = maps[t];
        const auto& inv_denom = spatial_inv_denom[t];
        Heatmap* g = grad_out ? &(*grad_out)[t] : nullptr;
        for (int y = 0; y < height; ++y)
          for (int x = 0; x < width; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * width + x;
            const double gx = (x < width - 1) ? phi.at(x + 1, y) - phi.at(x, y)
                                              : phi.at(x, y) - phi.at(x - 1, y);
            const double gy = (y < height - 1) ? phi.at(x, y + 1) - phi.at(x, y)
                                               : phi.at(x, y) - phi.at(x, y - 1);
            loss += alpha_s_a * (gx * gx + gy * gy) * inv_denom[i];
            if (g) {
              const double cx = alpha_s_a * 2.0 * gx * inv_denom[i];
              const double cy = alpha_s_a * 2.0 * gy * inv_denom[i];
              if (x < width - 1) {
                g->at(x + 1, y) += cx;
                g->at(x, y) -= cx;
              } else {
                g->at(x, y) += cx;
                g->at(x - 1, y) -= cx;
              }
              if (y < height - 1) {
                g->at(x, y + 1) += cy;
                g->at(x, y) -= cy;
              } else {
                g->at(x, y) += cy;
                g->at(x, y - 1) -= cy;
              }
            }
          }
      }
    }
    return loss;
  }
};

}  // namespace

VariationalResult variational_fit(const SequenceBatch& batch, const LossWeights& weights,
                                  const EstimatorConfig& config) {
  if (!weights.valid() || !config.valid()) {
    throw std::invalid_argument("variational_fit: invalid weights or config");
  }
  const int t = batch.frames();
  if (t == 0 || batch.gaze.size() != static_cast<std::size_t>(t) ||
      batch.flows.size() + 1 != static_cast<std::size_t>(t)) {
    throw std::invalid_argument("variational_fit: gaze and flow sequences must cover T frames");
  }

  VariationalResult result;
  if (!batch.awareness.empty()) {
    if (static_cast<int>(batch.awareness.size()) != t) {
      throw std::invalid_argument("variational_fit: initial awareness must have T frames");
    }
    result.awareness = batch.awareness;
  } else {
    result.awareness =
        recursive_run(batch.gaze, batch.flows, batch.width(), batch.height(), config, weights);
  }

  const FitWorkspace ws(batch, weights);
  double loss = ws.value(result.awareness);
  if (!std::isfinite(loss)) {
    throw NumericalError("variational_fit: non-finite loss at initialization");
  }
  result.loss_trace.push_back(loss);

  AwarenessSequence gradient;
  AwarenessSequence trial(t, Heatmap(batch.width(), batch.height()));
  double step = config.step_size;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    ws.value(result.awareness, &gradient);
    double gmax = 0.0;
    for (const Heatmap& g : gradient)
      for (double v : g.values) gmax = std::max(gmax, std::abs(v));
    if (gmax == 0.0) break;  // stationary point

    bool accepted = false;
    double trial_loss = loss;
    while (step > 1e-14) {
      for (int f = 0; f < t; ++f) {
        const auto& m = result.awareness[f].values;
        const auto& g = gradient[f].values;
        auto& out = trial[f].values;
        for (std::size_t i = 0; i < m.size(); ++i) {
          out[i] = std::clamp(m[i] - step * g[i], 0.0, 1.0);
        }
      }
      trial_loss = ws.value(trial);
      if (!std::isfinite(trial_loss)) {
        throw NumericalError("variational_fit: non-finite loss during line search");
      }
      if (trial_loss < loss) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // projected-stationary

    const double improvement = (loss - trial_loss) / std::max(std::abs(loss), 1e-300);
    std::swap(result.awareness, trial);
    loss = trial_loss;
    result.loss_trace.push_back(loss);
    result.iterations = iter + 1;
    if (improvement < config.tolerance) break;
    step *= 2.0;
  }

  result.final_loss = loss;
  return result;
}

double eval_awareness(const AwarenessSequence& estimate,
                      const std::vector<AnnotationRecord>& annotations, int start_frame) {
  if (estimate.empty()) {
    throw std::invalid_argument("eval_awareness: empty estimate");
  }
  const int w = estimate.front().width, h = estimate.front().height;
  double total = 0.0;
  int count = 0;
  for (const AnnotationRecord& rec : annotations) {
    const int t = rec.frame_index - start_frame;
    if (t < 0 || t >= static_cast<int>(estimate.size())) continue;
    const double m = bilinear_sample(estimate[t], norm_to_px(rec.x, w), norm_to_px(rec.y, h));
    total += (m - rec.label) * (m - rec.label);
    ++count;
  }
  if (count == 0) {
    throw std::invalid_argument("eval_awareness: no annotation inside the sequence");
  }
  return total / count;
}

}  // namespace gazeaware
