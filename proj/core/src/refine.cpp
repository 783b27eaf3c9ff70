#include "gazeaware/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gazeaware/errors.hpp"
#include "gazeaware/rng.hpp"

namespace gazeaware {

std::vector<GazeFrame> apply_noise(const std::vector<GazeFrame>& true_gaze,
                                   const NoiseModel& model) {
  if (model.sigma_n < 0.0 || model.w < 0.0) {
    throw std::invalid_argument("apply_noise: sigma_n and w must be nonnegative");
  }
  Rng rng(model.seed);
  std::vector<GazeFrame> out = true_gaze;
  for (GazeFrame& frame : out) {
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!frame.valid[s]) continue;
      GazePoint& p = frame.points[s];
      const double sx = std::max(model.sigma_n, model.w * std::abs(p.x - model.center_x));
      const double sy = std::max(model.sigma_n, model.w * std::abs(p.y - model.center_y));
      p.x = std::clamp(p.x + (sx > 0.0 ? rng.normal(0.0, sx) : 0.0), 0.0, 1.0);
      p.y = std::clamp(p.y + (sy > 0.0 ? rng.normal(0.0, sy) : 0.0), 0.0, 1.0);
    }
  }
  return out;
}

Affine2D Affine2D::inverse() const {
  const double d = det();
  if (std::abs(d) < 1e-12) {
    throw std::invalid_argument("Affine2D::inverse: singular matrix");
  }
  Affine2D inv;
  inv.a11 = a22 / d;
  inv.a12 = -a12 / d;
  inv.a21 = -a21 / d;
  inv.a22 = a11 / d;
  inv.bx = -(inv.a11 * bx + inv.a12 * by);
  inv.by = -(inv.a21 * bx + inv.a22 * by);
  return inv;
}

AffineCorruption apply_affine_corruption(const std::vector<GazeFrame>& gaze, double sigma_n,
                                         std::uint64_t seed) {
  if (sigma_n < 0.0) {
    throw std::invalid_argument("apply_affine_corruption: sigma_n must be nonnegative");
  }
  Rng rng(seed);
  Affine2D t;
  if (sigma_n > 0.0) {
    t.a11 = 1.0 + rng.normal(0.0, sigma_n);
    t.a12 = rng.normal(0.0, sigma_n);
    t.a21 = rng.normal(0.0, sigma_n);
    t.a22 = 1.0 + rng.normal(0.0, sigma_n);
    t.bx = rng.normal(0.0, sigma_n);
    t.by = rng.normal(0.0, sigma_n);
  }
  return {apply_affine(gaze, t), t};
}

std::vector<GazeFrame> apply_affine(const std::vector<GazeFrame>& gaze, const Affine2D& t) {
  std::vector<GazeFrame> out = gaze;
  for (GazeFrame& frame : out) {
    for (int s = 0; s < GazeFrame::kSlots; ++s) {
      if (!frame.valid[s]) continue;
      frame.points[s] = t.apply(frame.points[s]);
    }
  }
  return out;
}

MeanShiftConfig MeanShiftConfig::for_noise(double sigma_n, int width, int height) {
  MeanShiftConfig c;
  c.bandwidth_px = std::max(sigma_n, 1e-3) * map_diag(width, height);
  return c;
}

PixelPoint meanshift_step(PixelPoint at, const Heatmap& density, double bandwidth_px) {
  const double inv_two_h2 = 1.0 / (2.0 * bandwidth_px * bandwidth_px);
  // the kernel is negligible past a few bandwidths
  const double reach = 4.0 * bandwidth_px;
  const int x_lo = std::max(0, static_cast<int>(std::floor(at.x - reach)));
  const int x_hi = std::min(density.width - 1, static_cast<int>(std::ceil(at.x + reach)));
  const int y_lo = std::max(0, static_cast<int>(std::floor(at.y - reach)));
  const int y_hi = std::min(density.height - 1, static_cast<int>(std::ceil(at.y + reach)));
  double mass = 0.0, mx = 0.0, my = 0.0;
  for (int y = y_lo; y <= y_hi; ++y) {
    for (int x = x_lo; x <= x_hi; ++x) {
      const double d = density.at(x, y);
      if (d <= 0.0) continue;
      const double dx = x - at.x, dy = y - at.y;
      const double w = d * std::exp(-(dx * dx + dy * dy) * inv_two_h2);
      mass += w;
      mx += w * x;
      my += w * y;
    }
  }
  if (mass <= 0.0) {
    throw std::invalid_argument("meanshift: zero kernel-weighted mass at the start point");
  }
  return {mx / mass, my / mass};
}

PixelPoint meanshift(PixelPoint start, const Heatmap& density, const MeanShiftConfig& config) {
  if (config.bandwidth_px <= 0.0) {
    throw std::invalid_argument("meanshift: bandwidth must be positive");
  }
  PixelPoint at = start;
  for (int i = 0; i < config.max_iterations; ++i) {
    const PixelPoint next = meanshift_step(at, density, config.bandwidth_px);
    const double move = std::hypot(next.x - at.x, next.y - at.y);
    at = next;
    if (move < config.epsilon_px) break;
  }
  return at;
}

GazePoint CorrectionNet::apply(GazePoint p) const {
  double ox = a0[0] * p.x + a0[1] * p.y + b[0];
  double oy = a0[2] * p.x + a0[3] * p.y + b[1];
  for (int j = 0; j < hidden; ++j) {
    const double h = std::tanh(w1[2 * j] * p.x + w1[2 * j + 1] * p.y + b1[j]);
    ox += w2[j] * h;
    oy += w2[hidden + j] * h;
  }
  return {ox, oy};
}

CorrectionNet CorrectionNet::near_identity(int hidden, double noise_scale, std::uint64_t seed) {
  Rng rng(seed);
  CorrectionNet net;
  net.hidden = hidden;
  net.w1.resize(2 * static_cast<std::size_t>(hidden));
  net.b1.assign(hidden, 0.0);
  net.w2.resize(2 * static_cast<std::size_t>(hidden));
  for (double& v : net.w1) v = rng.normal(0.0, 0.5);
  for (double& v : net.w2) v = rng.normal(0.0, noise_scale);
  return net;
}

namespace {

struct NetGrad {
  std::array<double, 4> a0{};
  std::array<double, 2> b{};
  std::vector<double> w1, b1, w2;

  explicit NetGrad(int hidden)
      : w1(2 * static_cast<std::size_t>(hidden), 0.0),
        b1(hidden, 0.0),
        w2(2 * static_cast<std::size_t>(hidden), 0.0) {}

  void clear() {
    a0.fill(0.0);
    b.fill(0.0);
    std::fill(w1.begin(), w1.end(), 0.0);
    std::fill(b1.begin(), b1.end(), 0.0);
    std::fill(w2.begin(), w2.end(), 0.0);
  }
};

// Backpropagates dL/dy through the net for one input point.
void accumulate_net_grad(const CorrectionNet& net, GazePoint in, double dlx, double dly,
                         NetGrad& g) {
  g.a0[0] += dlx * in.x;
  g.a0[1] += dlx * in.y;
  g.a0[2] += dly * in.x;
  g.a0[3] += dly * in.y;
  g.b[0] += dlx;
  g.b[1] += dly;
  for (int j = 0; j < net.hidden; ++j) {
    const double z = net.w1[2 * j] * in.x + net.w1[2 * j + 1] * in.y + net.b1[j];
    const double h = std::tanh(z);
    g.w2[j] += dlx * h;
    g.w2[net.hidden + j] += dly * h;
    const double dh = (dlx * net.w2[j] + dly * net.w2[net.hidden + j]) * (1.0 - h * h);
    g.w1[2 * j] += dh * in.x;
    g.w1[2 * j + 1] += dh * in.y;
    g.b1[j] += dh;
  }
}

void apply_step(CorrectionNet& net, const NetGrad& g, double lr) {
  for (int i = 0; i < 4; ++i) net.a0[i] -= lr * g.a0[i];
  for (int i = 0; i < 2; ++i) net.b[i] -= lr * g.b[i];
  for (std::size_t i = 0; i < net.w1.size(); ++i) net.w1[i] -= lr * g.w1[i];
  for (std::size_t i = 0; i < net.b1.size(); ++i) net.b1[i] -= lr * g.b1[i];
  for (std::size_t i = 0; i < net.w2.size(); ++i) net.w2[i] -= lr * g.w2[i];
}

// log density and its spatial gradient at a continuous pixel position
struct LogDensitySample {
  double logp;
  double ddx, ddy;  // w.r.t. pixel coordinates
};

LogDensitySample sample_log_density(const Heatmap& density, double px, double py) {
  const BilinearTaps t = bilinear_taps(density.width, density.height, px, py);
  const double v00 = density.at(t.x0, t.y0), v10 = density.at(t.x1, t.y0);
  const double v01 = density.at(t.x0, t.y1), v11 = density.at(t.x1, t.y1);
  const double p = t.w00 * v00 + t.w10 * v10 + t.w01 * v01 + t.w11 * v11;
  const double dy_frac = t.w01 + t.w11;
  const double dx_frac = t.w10 + t.w11;
  const double dpdx = (1.0 - dy_frac) * (v10 - v00) + dy_frac * (v11 - v01);
  const double dpdy = (1.0 - dx_frac) * (v01 - v00) + dx_frac * (v11 - v10);
  const double denom = std::max(p, 1e-12);
  return {std::log(denom), dpdx / denom, dpdy / denom};
}

}  // namespace

CorrectionFitResult fit_correction(const std::vector<GazeFrame>& corrupted, FitMode mode,
                                   const std::vector<DensityMap>* frame_densities,
                                   const std::vector<GazeFrame>* true_gaze,
                                   const CorrectionFitConfig& config) {
  int samples = 0;
  for (const GazeFrame& f : corrupted) samples += f.valid_count();
  if (samples < 50) {
    throw std::invalid_argument("fit_correction: need at least 50 valid gaze samples");
  }
  if (mode == FitMode::kSelfSupervised) {
    if (!frame_densities || frame_densities->size() != corrupted.size()) {
      throw std::invalid_argument("fit_correction: self-supervised mode needs per-frame densities");
    }
  } else {
    if (!true_gaze || true_gaze->size() != corrupted.size()) {
      throw std::invalid_argument("fit_correction: supervised mode needs the true gaze sequence");
    }
  }

  CorrectionFitResult result;
  result.net = CorrectionNet::near_identity(config.hidden, config.init_noise, config.seed);

  const double inv_sigma2 = 1.0 / (config.supervised_sigma * config.supervised_sigma);

  // mean NLL over samples; also fills the parameter gradient when given
  const auto evaluate = [&](const CorrectionNet& net, NetGrad* grad) -> double {
    double loss = 0.0;
    if (grad) grad->clear();
    for (std::size_t t = 0; t < corrupted.size(); ++t) {
      for (int s = 0; s < GazeFrame::kSlots; ++s) {
        if (!corrupted[t].valid[s]) continue;
        const GazePoint in = corrupted[t].points[s];
        const GazePoint out = net.apply(in);
        double dlx = 0.0, dly = 0.0;
        if (mode == FitMode::kSupervised) {
          const GazePoint target = (*true_gaze)[t].points[s];
          const double ex = out.x - target.x;
          const double ey = out.y - target.y;
          loss += 0.5 * (ex * ex + ey * ey) * inv_sigma2;
          dlx = ex * inv_sigma2;
          dly = ey * inv_sigma2;
        } else {
          const Heatmap& density = (*frame_densities)[t].map;
          const double px = norm_to_px(out.x, density.width);
          const double py = norm_to_px(out.y, density.height);
          const LogDensitySample ls = sample_log_density(density, px, py);
          loss -= ls.logp;
          dlx = -ls.ddx * (density.width - 1);
          dly = -ls.ddy * (density.height - 1);
        }
        if (grad) accumulate_net_grad(net, in, dlx / samples, dly / samples, *grad);
      }
    }
    return loss / samples;
  };

  NetGrad grad(config.hidden);
  double loss = evaluate(result.net, nullptr);
  if (!std::isfinite(loss)) {
    throw NumericalError("fit_correction: non-finite loss at initialization");
  }
  result.initial_loss = loss;

  double lr = config.learning_rate;
  for (int iter = 0; iter < config.iterations; ++iter) {
    evaluate(result.net, &grad);
    bool accepted = false;
    while (lr > 1e-12) {
      CorrectionNet trial = result.net;
      apply_step(trial, grad, lr);
      const double trial_loss = evaluate(trial, nullptr);
      if (!std::isfinite(trial_loss)) {
        throw NumericalError("fit_correction: loss diverged");
      }
      if (trial_loss < loss) {
        result.net = std::move(trial);
        loss = trial_loss;
        accepted = true;
        break;
      }
      lr *= 0.5;
    }
    if (!accepted) break;
    result.iterations = iter + 1;
    lr *= 2.0;
  }
  result.final_loss = loss;
  return result;
}

double calibration_error(const CorrectionNet& net, const Affine2D& corrupt) {
  const Affine2D target = corrupt.inverse();

  // least-squares affine fit of the net over a 16x16 probe grid
  constexpr int kGrid = 16;
  double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, n = 0;
  double tux = 0, tuy = 0, tu = 0, tvx = 0, tvy = 0, tv = 0;
  for (int i = 0; i < kGrid; ++i) {
    for (int j = 0; j < kGrid; ++j) {
      const double x = static_cast<double>(i) / (kGrid - 1);
      const double y = static_cast<double>(j) / (kGrid - 1);
      const GazePoint out = net.apply({x, y});
      sxx += x * x;
      sxy += x * y;
      syy += y * y;
      sx += x;
      sy += y;
      n += 1.0;
      tux += out.x * x;
      tuy += out.x * y;
      tu += out.x;
      tvx += out.y * x;
      tvy += out.y * y;
      tv += out.y;
    }
  }
  // solve the shared 3x3 normal equations for both output rows
  const double m[9] = {sxx, sxy, sx, sxy, syy, sy, sx, sy, n};
  const auto det3 = [](const double a[9]) {
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
  };
  const double d = det3(m);
  const auto solve = [&](double r0, double r1, double r2, double out[3]) {
    double a[9];
    for (int c = 0; c < 3; ++c) {
      std::copy(m, m + 9, a);
      a[c] = r0;
      a[c + 3] = r1;
      a[c + 6] = r2;
      out[c] = det3(a) / d;
    }
  };
  double row_u[3], row_v[3];
  solve(tux, tuy, tu, row_u);
  solve(tvx, tvy, tv, row_v);

  const double diffs[6] = {row_u[0] - target.a11, row_u[1] - target.a12, row_u[2] - target.bx,
                           row_v[0] - target.a21, row_v[1] - target.a22, row_v[2] - target.by};
  double err = 0.0;
  for (double v : diffs) err += v * v;
  return err;
}

}  // namespace gazeaware
