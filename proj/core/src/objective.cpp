#include "gazeaware/objective.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazeaware {

bool LossWeights::valid() const {
  const double alphas[] = {alpha_g,   alpha_att, alpha_aa,  alpha_s_a,   alpha_s_g,
                           alpha_t,   alpha_dec, alpha_cap, alpha_con_g, alpha_con_a};
  for (double a : alphas)
    if (!(a >= 0.0) || !std::isfinite(a)) return false;
  return w_of > 0.0 && w_of <= 1.0 && eps_dec >= 0.0 && eps_dec < 1.0 && c1 >= 0.0 && c2 >= 0.0;
}

int SequenceBatch::valid_gaze_points() const {
  int n = 0;
  for (const GazeFrame& g : gaze) n += g.valid_count();
  return n;
}

void SequenceBatch::validate() const {
  const int t = frames();
  if (t == 0) throw std::invalid_argument("SequenceBatch: empty batch");
  if (static_cast<int>(awareness.size()) != t || static_cast<int>(gaze_density.size()) != t ||
      static_cast<int>(gaze.size()) != t) {
    throw std::invalid_argument("SequenceBatch: per-frame sequences must all have length T");
  }
  if (static_cast<int>(flows.size()) != t - 1) {
    throw std::invalid_argument("SequenceBatch: need exactly T-1 flow fields");
  }
  const int w = width(), h = height();
  for (int i = 0; i < t; ++i) {
    if (images[i].width != w || images[i].height != h || !awareness[i].same_size(images[i]) ||
        !gaze_density[i].same_size(images[i])) {
      throw std::invalid_argument("SequenceBatch: inconsistent frame dimensions at t=" +
                                  std::to_string(i));
    }
  }
  for (int i = 0; i < t - 1; ++i) {
    if (flows[i].width != w || flows[i].height != h) {
      throw std::invalid_argument("SequenceBatch: flow dimensions mismatch at t=" +
                                  std::to_string(i));
    }
  }
}

const char* loss_term_name(LossTerm term) {
  switch (term) {
    case LossTerm::kGazeNll: return "gaze_nll";
    case LossTerm::kAtt: return "att";
    case LossTerm::kAa: return "aa";
    case LossTerm::kSpatialAwareness: return "spatial_awareness";
    case LossTerm::kSpatialGaze: return "spatial_gaze";
    case LossTerm::kTemporal: return "temporal";
    case LossTerm::kDecay: return "decay";
    case LossTerm::kCapacity: return "capacity";
  }
  return "unknown";
}

namespace {

bool annotation_in_range(const SequenceBatch& batch, const AnnotationRecord& rec, int& t_out) {
  const int t = rec.frame_index - batch.start_frame;
  if (t < 0 || t >= batch.frames()) return false;
  t_out = t;
  return true;
}

int in_range_annotations(const SequenceBatch& batch) {
  int n = 0, t;
  for (const auto& rec : batch.annotations)
    if (annotation_in_range(batch, rec, t)) ++n;
  return n;
}

// Forward difference, backward at the far edge.
inline double grad_x(const Heatmap& m, int x, int y) {
  return (x < m.width - 1) ? m.at(x + 1, y) - m.at(x, y) : m.at(x, y) - m.at(x - 1, y);
}
inline double grad_y(const Heatmap& m, int x, int y) {
  return (y < m.height - 1) ? m.at(x, y + 1) - m.at(x, y) : m.at(x, y) - m.at(x, y - 1);
}

inline double diffusivity_denom(const Heatmap& image, int x, int y) {
  const double ix = grad_x(image, x, y);
  const double iy = grad_y(image, x, y);
  return std::sqrt(ix * ix + iy * iy + kSpatialEps);
}

}  // namespace

double loss_gaze_nll(const SequenceBatch& batch) {
  if (batch.valid_gaze_points() == 0) {
    throw std::invalid_argument("loss_gaze_nll: no valid gaze point in batch");
  }
  const int w = batch.width(), h = batch.height();
  double loss = 0.0;
  for (int t = 0; t < batch.frames(); ++t) {
    const GazeFrame& g = batch.gaze[t];
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!g.valid[s]) continue;
      const double p = bilinear_sample(batch.gaze_density[t], norm_to_px(g.points[s].x, w),
                                       norm_to_px(g.points[s].y, h));
      loss -= std::log(std::max(p, kNllFloor));
    }
  }
  return loss;
}

double loss_att(const SequenceBatch& batch) {
  const int w = batch.width(), h = batch.height();
  double loss = 0.0;
  int t;
  for (const AnnotationRecord& rec : batch.annotations) {
    if (!annotation_in_range(batch, rec, t)) continue;
    const double m =
        bilinear_sample(batch.awareness[t], norm_to_px(rec.x, w), norm_to_px(rec.y, h));
    loss += (m - rec.label) * (m - rec.label);
  }
  return loss;
}

double loss_aa(const SequenceBatch& batch) {
  const int w = batch.width(), h = batch.height();
  double loss = 0.0;
  for (int t = 0; t < batch.frames(); ++t) {
    const GazeFrame& g = batch.gaze[t];
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!g.valid[s]) continue;
      const double m = bilinear_sample(batch.awareness[t], norm_to_px(g.points[s].x, w),
                                       norm_to_px(g.points[s].y, h));
      loss += (m - 1.0) * (m - 1.0);
    }
  }
  return loss;
}

double loss_spatial(const Heatmap& phi, const Heatmap& image) {
  if (!phi.same_size(image)) {
    throw std::invalid_argument("loss_spatial: dimension mismatch");
  }
  double loss = 0.0;
  for (int y = 0; y < phi.height; ++y) {
    for (int x = 0; x < phi.width; ++x) {
      const double gx = grad_x(phi, x, y);
      const double gy = grad_y(phi, x, y);
      loss += (gx * gx + gy * gy) / diffusivity_denom(image, x, y);
    }
  }
  return loss;
}

double loss_spatial_awareness(const SequenceBatch& batch) {
  double loss = 0.0;
  for (int t = 0; t < batch.frames(); ++t) loss += loss_spatial(batch.awareness[t], batch.images[t]);
  return loss;
}

double loss_spatial_gaze(const SequenceBatch& batch) {
  double loss = 0.0;
  for (int t = 0; t < batch.frames(); ++t)
    loss += loss_spatial(batch.gaze_density[t], batch.images[t]);
  return loss;
}

double loss_temporal(const SequenceBatch& batch, const LossWeights& weights) {
  if (batch.frames() < 2) {
    throw std::invalid_argument("loss_temporal: need at least two frames");
  }
  double loss = 0.0;
  for (int t = 0; t + 1 < batch.frames(); ++t) {
    const FlowField& flow = batch.flows[t];
    const Heatmap& cur = batch.awareness[t];
    const Heatmap& next = batch.awareness[t + 1];
    for (int y = 0; y < cur.height; ++y) {
      for (int x = 0; x < cur.width; ++x) {
        const double a = bilinear_sample(next, x + flow.u_at(x, y), y + flow.v_at(x, y));
        const double d = a - weights.w_of * cur.at(x, y);
        const double neg = std::min(d, 0.0);
        loss += weights.c1 * std::max(d, 0.0) + weights.c2 * neg * neg;
      }
    }
  }
  return loss;
}

double loss_decay(const SequenceBatch& batch, const LossWeights& weights) {
  if (batch.frames() < 2) {
    throw std::invalid_argument("loss_decay: need at least two frames");
  }
  const double keep = 1.0 - weights.eps_dec;
  double loss = 0.0;
  for (int t = 0; t + 1 < batch.frames(); ++t) {
    const Heatmap& cur = batch.awareness[t];
    const Heatmap& next = batch.awareness[t + 1];
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
      const double e = keep * cur.values[i] - next.values[i];
      loss += e * e;
    }
  }
  return loss;
}

double loss_capacity(const SequenceBatch& batch) {
  if (batch.frames() < 2) {
    throw std::invalid_argument("loss_capacity: need at least two frames");
  }
  double loss = 0.0;
  for (int t = 0; t + 1 < batch.frames(); ++t) {
    const double d = batch.awareness[t].sum() - batch.awareness[t + 1].sum();
    loss += d * d;
  }
  return loss;
}

namespace {

struct Overlap {
  int begin;  // absolute frame index
  int end;    // exclusive
};

Overlap shared_range(const SequenceBatch& a, const SequenceBatch& b) {
  Overlap o;
  o.begin = std::max(a.start_frame, b.start_frame);
  o.end = std::min(a.start_frame + a.frames(), b.start_frame + b.frames());
  if (o.begin >= o.end) {
    throw std::invalid_argument("loss_consistency: runs share no frames");
  }
  return o;
}

const std::vector<Heatmap>& target_maps(const SequenceBatch& run, ConsistencyTarget target) {
  return target == ConsistencyTarget::kGaze ? run.gaze_density : run.awareness;
}

}  // namespace

double loss_consistency(const SequenceBatch& run_a, const SequenceBatch& run_b,
                        ConsistencyTarget target) {
  const Overlap o = shared_range(run_a, run_b);
  const auto& maps_a = target_maps(run_a, target);
  const auto& maps_b = target_maps(run_b, target);
  double loss = 0.0;
  for (int f = o.begin; f < o.end; ++f) {
    const Heatmap& ma = maps_a[f - run_a.start_frame];
    const Heatmap& mb = maps_b[f - run_b.start_frame];
    if (!ma.same_size(mb)) {
      throw std::invalid_argument("loss_consistency: dimension mismatch");
    }
    for (std::size_t i = 0; i < ma.values.size(); ++i) {
      const double d = ma.values[i] - mb.values[i];
      loss += d * d;
    }
  }
  return loss;
}

LossBreakdown total_loss(const SequenceBatch& batch, const LossWeights& weights,
                         const SequenceBatch* consistency_run) {
  batch.validate();
  if (!weights.valid()) {
    throw std::invalid_argument("total_loss: invalid loss weights");
  }
  LossBreakdown out;
  const bool has_gaze = batch.valid_gaze_points() > 0;
  const bool has_ann = in_range_annotations(batch) > 0;
  const bool has_pairs = batch.frames() >= 2;

  const auto add = [&out](const char* name, double alpha, double value, bool skipped) {
    TermReport r;
    r.term = name;
    r.skipped = skipped;
    r.value = skipped ? 0.0 : value;
    r.weighted = skipped ? 0.0 : alpha * value;
    out.total += r.weighted;
    out.terms.push_back(std::move(r));
  };

  add("gaze_nll", weights.alpha_g, has_gaze ? loss_gaze_nll(batch) : 0.0, !has_gaze);
  add("att", weights.alpha_att, has_ann ? loss_att(batch) : 0.0, !has_ann);
  add("aa", weights.alpha_aa, has_gaze ? loss_aa(batch) : 0.0, !has_gaze);
  add("spatial_awareness", weights.alpha_s_a, loss_spatial_awareness(batch), false);
  add("spatial_gaze", weights.alpha_s_g, loss_spatial_gaze(batch), false);
  add("temporal", weights.alpha_t, has_pairs ? loss_temporal(batch, weights) : 0.0, !has_pairs);
  add("decay", weights.alpha_dec, has_pairs ? loss_decay(batch, weights) : 0.0, !has_pairs);
  add("capacity", weights.alpha_cap, has_pairs ? loss_capacity(batch) : 0.0, !has_pairs);

  bool con_ok = consistency_run != nullptr;
  if (con_ok) {
    const int begin = std::max(batch.start_frame, consistency_run->start_frame);
    const int end = std::min(batch.start_frame + batch.frames(),
                             consistency_run->start_frame + consistency_run->frames());
    con_ok = begin < end;
  }
  add("consistency_gaze", weights.alpha_con_g,
      con_ok ? loss_consistency(batch, *consistency_run, ConsistencyTarget::kGaze) : 0.0,
      !con_ok);
  add("consistency_awareness", weights.alpha_con_a,
      con_ok ? loss_consistency(batch, *consistency_run, ConsistencyTarget::kAwareness) : 0.0,
      !con_ok);
  return out;
}

// ---- gradients ----

BatchGradient zero_gradient(const SequenceBatch& batch) {
  BatchGradient g;
  g.d_awareness.assign(batch.frames(), Heatmap(batch.width(), batch.height()));
  g.d_gaze_density.assign(batch.frames(), Heatmap(batch.width(), batch.height()));
  return g;
}

namespace {

// Scatter a scalar over the four taps of a bilinear lookup.
inline void scatter(Heatmap& grid, const BilinearTaps& t, double v) {
  grid.at(t.x0, t.y0) += v * t.w00;
  grid.at(t.x1, t.y0) += v * t.w10;
  grid.at(t.x0, t.y1) += v * t.w01;
  grid.at(t.x1, t.y1) += v * t.w11;
}

void grad_gaze_nll(const SequenceBatch& batch, BatchGradient& g) {
  const int w = batch.width(), h = batch.height();
  for (int t = 0; t < batch.frames(); ++t) {
    const GazeFrame& gf = batch.gaze[t];
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!gf.valid[s]) continue;
      const BilinearTaps taps =
          bilinear_taps(w, h, norm_to_px(gf.points[s].x, w), norm_to_px(gf.points[s].y, h));
      const Heatmap& pg = batch.gaze_density[t];
      const double p = taps.w00 * pg.at(taps.x0, taps.y0) + taps.w10 * pg.at(taps.x1, taps.y0) +
                       taps.w01 * pg.at(taps.x0, taps.y1) + taps.w11 * pg.at(taps.x1, taps.y1);
      if (p <= kNllFloor) continue;  // clamped region of the floored log
      scatter(g.d_gaze_density[t], taps, -1.0 / p);
    }
  }
}

void grad_att(const SequenceBatch& batch, BatchGradient& g) {
  const int w = batch.width(), h = batch.height();
  int t;
  for (const AnnotationRecord& rec : batch.annotations) {
    if (!annotation_in_range(batch, rec, t)) continue;
    const BilinearTaps taps = bilinear_taps(w, h, norm_to_px(rec.x, w), norm_to_px(rec.y, h));
    const double m = bilinear_sample(batch.awareness[t], norm_to_px(rec.x, w), norm_to_px(rec.y, h));
    scatter(g.d_awareness[t], taps, 2.0 * (m - rec.label));
  }
}

void grad_aa(const SequenceBatch& batch, BatchGradient& g) {
  const int w = batch.width(), h = batch.height();
  for (int t = 0; t < batch.frames(); ++t) {
    const GazeFrame& gf = batch.gaze[t];
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!gf.valid[s]) continue;
      const BilinearTaps taps =
          bilinear_taps(w, h, norm_to_px(gf.points[s].x, w), norm_to_px(gf.points[s].y, h));
      const double m = bilinear_sample(batch.awareness[t], norm_to_px(gf.points[s].x, w),
                                       norm_to_px(gf.points[s].y, h));
      scatter(g.d_awareness[t], taps, 2.0 * (m - 1.0));
    }
  }
}

// d/dphi of sum |grad phi|^2 / denom(image)
void grad_spatial(const Heatmap& phi, const Heatmap& image, Heatmap& out) {
  const int w = phi.width, h = phi.height;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double inv_d = 1.0 / diffusivity_denom(image, x, y);
      const double cx = 2.0 * grad_x(phi, x, y) * inv_d;
      const double cy = 2.0 * grad_y(phi, x, y) * inv_d;
      if (x < w - 1) {
        out.at(x + 1, y) += cx;
        out.at(x, y) -= cx;
      } else {
        out.at(x, y) += cx;
        out.at(x - 1, y) -= cx;
      }
      if (y < h - 1) {
        out.at(x, y + 1) += cy;
        out.at(x, y) -= cy;
      } else {
        out.at(x, y) += cy;
        out.at(x, y - 1) -= cy;
      }
    }
  }
}

void grad_temporal(const SequenceBatch& batch, const LossWeights& weights, BatchGradient& g) {
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
        // subgradient 0 at the hinge
        const double dfdd = (d > 0.0 ? weights.c1 : 0.0) + 2.0 * weights.c2 * std::min(d, 0.0);
        if (dfdd == 0.0) continue;
        scatter(g.d_awareness[t + 1], taps, dfdd);
        g.d_awareness[t].at(x, y) -= dfdd * weights.w_of;
      }
    }
  }
}

void grad_decay(const SequenceBatch& batch, const LossWeights& weights, BatchGradient& g) {
  const double keep = 1.0 - weights.eps_dec;
  for (int t = 0; t + 1 < batch.frames(); ++t) {
    const Heatmap& cur = batch.awareness[t];
    const Heatmap& next = batch.awareness[t + 1];
    for (std::size_t i = 0; i < cur.values.size(); ++i) {
      const double e = keep * cur.values[i] - next.values[i];
      g.d_awareness[t].values[i] += 2.0 * e * keep;
      g.d_awareness[t + 1].values[i] -= 2.0 * e;
    }
  }
}

void grad_capacity(const SequenceBatch& batch, BatchGradient& g) {
  for (int t = 0; t + 1 < batch.frames(); ++t) {
    const double d = batch.awareness[t].sum() - batch.awareness[t + 1].sum();
    for (std::size_t i = 0; i < g.d_awareness[t].values.size(); ++i) {
      g.d_awareness[t].values[i] += 2.0 * d;
      g.d_awareness[t + 1].values[i] -= 2.0 * d;
    }
  }
}

}  // namespace

BatchGradient grad(const SequenceBatch& batch, const LossWeights& weights, LossTerm term) {
  BatchGradient g = zero_gradient(batch);
  switch (term) {
    case LossTerm::kGazeNll:
      grad_gaze_nll(batch, g);
      break;
    case LossTerm::kAtt:
      grad_att(batch, g);
      break;
    case LossTerm::kAa:
      grad_aa(batch, g);
      break;
    case LossTerm::kSpatialAwareness:
      for (int t = 0; t < batch.frames(); ++t)
        grad_spatial(batch.awareness[t], batch.images[t], g.d_awareness[t]);
      break;
    case LossTerm::kSpatialGaze:
      for (int t = 0; t < batch.frames(); ++t)
        grad_spatial(batch.gaze_density[t], batch.images[t], g.d_gaze_density[t]);
      break;
    case LossTerm::kTemporal:
      grad_temporal(batch, weights, g);
      break;
    case LossTerm::kDecay:
      grad_decay(batch, weights, g);
      break;
    case LossTerm::kCapacity:
      grad_capacity(batch, g);
      break;
  }
  return g;
}

BatchGradient grad_consistency(const SequenceBatch& run_a, const SequenceBatch& run_b,
                               ConsistencyTarget target) {
  const Overlap o = shared_range(run_a, run_b);
  BatchGradient g = zero_gradient(run_a);
  const auto& maps_a = target_maps(run_a, target);
  const auto& maps_b = target_maps(run_b, target);
  auto& out = target == ConsistencyTarget::kGaze ? g.d_gaze_density : g.d_awareness;
  for (int f = o.begin; f < o.end; ++f) {
    const Heatmap& ma = maps_a[f - run_a.start_frame];
    const Heatmap& mb = maps_b[f - run_b.start_frame];
    Heatmap& dst = out[f - run_a.start_frame];
    for (std::size_t i = 0; i < ma.values.size(); ++i) {
      dst.values[i] += 2.0 * (ma.values[i] - mb.values[i]);
    }
  }
  return g;
}

}  // namespace gazeaware
