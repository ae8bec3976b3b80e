#include "certlab/scan.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "certlab/rng.hpp"

namespace certlab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double sqnorm_of(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return s;
}

CertKind recursion_kind_for(Family family) {
  switch (family) {
    case Family::ScalarFactorization: return CertKind::Isc;
    case Family::ScalarVector: return CertKind::Isv;
    case Family::Rank1Factorization: return CertKind::Ifac;
    case Family::Rank1Approximation: return CertKind::Iapx;
    default: break;
  }
  return CertKind::TwoParam;  // sentinel: no closed-form recursion
}

}  // namespace

int default_thread_count() {
  if (const char* env = std::getenv("CERTLAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 2) throw std::invalid_argument("linspace needs at least 2 points");
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
  return v;
}

std::vector<double> grid_by_step(double lo, double hi, double step) {
  if (!(step > 0)) throw std::invalid_argument("grid step must be positive");
  std::vector<double> v;
  for (int i = 0;; ++i) {
    const double x = lo + i * step;
    if (x > hi + 0.5 * step) break;
    v.push_back(x);
  }
  return v;
}

std::vector<TrajectoryRecord> run_trajectory(const ProblemSpec& spec,
                                             const Point& x0, int T,
                                             const TrajectoryOptions& opt) {
  std::vector<TrajectoryRecord> out;
  out.reserve(T + 1);
  Point cur = x0;
  for (int t = 0; t <= T; ++t) {
    TrajectoryRecord rec;
    rec.t = t;
    rec.x = cur;
    rec.delta = kNaN;
    rec.terminal = false;
    rec.remainder = kNaN;
    rec.diverged = false;
    if (!all_finite(cur.coords)) {
      rec.loss_value = kNaN;
      rec.diverged = true;
      out.push_back(std::move(rec));
      break;
    }
    rec.obs = observables(spec, cur);
    rec.loss_value = loss(spec, cur);
    rec.diverged = rec.obs.sqnorm > opt.divergence_threshold;
    if (opt.cert && !rec.diverged) {
      try {
        const StateParameter sp = state_parameter(*opt.cert, cur, opt.delta_lo);
        rec.delta = sp.delta;
        rec.terminal = sp.terminal;
        if (opt.record_remainder && !sp.terminal &&
            recursion_kind_for(spec.family) == *opt.cert) {
          rec.remainder = recursion_coeffs(*opt.cert, sp.delta, spec, cur).R;
        }
      } catch (const std::invalid_argument&) {
        // Point not certified at the lower bracket; leave delta as NaN.
      }
    }
    const bool stop = rec.diverged;
    out.push_back(std::move(rec));
    if (stop || t == T) break;
    cur = gd_step(spec, cur);
  }
  return out;
}

Heatmap sweep_convergence_region(const SweepConfig& cfg, int threads) {
  if (cfg.resolution < 2) throw std::invalid_argument("resolution must be >= 2");
  if (cfg.steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(cfg.conv_tol > 0)) throw std::invalid_argument("conv_tol must be > 0");
  const std::size_t psize = cfg.spec.point_size();
  if (psize != 2 && psize != 4)
    throw std::invalid_argument("sweep supports 2- and 4-coordinate families");

  Heatmap h;
  h.payload = Heatmap::Payload::Converged;
  h.xs = linspace(-cfg.half_width, cfg.half_width, cfg.resolution);
  h.ys = h.xs;
  h.cells.resize(static_cast<std::size_t>(cfg.resolution) * cfg.resolution);

  const bool has_noise = psize == 4;
  parallel_for(cfg.resolution * cfg.resolution, threads, [&](int idx) {
    const int ix = idx % cfg.resolution;
    const int iy = idx / cfg.resolution;
    double buf_a[4] = {h.xs[ix], h.ys[iy], cfg.u_star, cfg.v_star};
    double buf_b[4];
    double* cur = buf_a;
    double* nxt = buf_b;
    bool dead = false;
    for (int t = 0; t < cfg.steps; ++t) {
      gd_step_into(cfg.spec, cur, nxt);
      std::swap(cur, nxt);
      double sq = 0;
      for (std::size_t i = 0; i < psize; ++i) sq += cur[i] * cur[i];
      if (!std::isfinite(sq) || sq > 1e12) {
        dead = true;
        break;
      }
    }
    Heatmap::Cell& cell = h.cells[idx];
    if (dead) {
      cell.flag = false;
      cell.value = std::numeric_limits<double>::infinity();
      return;
    }
    Point p;
    p.coords.assign(cur, cur + psize);
    const Observables o = observables(cfg.spec, p);
    const double miss = std::abs(o.L) + (has_noise ? o.N : 0.0);
    cell.flag = std::abs(o.L) < cfg.conv_tol &&
                (!has_noise || o.N < cfg.conv_tol);
    cell.value = miss;
  });
  return h;
}

std::vector<double> cube_boundary_directions(int dims, int res) {
  if (dims < 1 || dims > 8) throw std::invalid_argument("dims must be in 1..8");
  if (res < 2) throw std::invalid_argument("res must be >= 2");
  std::vector<double> axis(res);
  for (int i = 0; i < res; ++i) axis[i] = -1 + 2.0 * i / (res - 1);
  axis[0] = -1;
  axis[res - 1] = 1;

  std::vector<double> out;
  std::vector<int> idx(dims, 0);
  for (;;) {
    bool boundary = false;
    for (int d = 0; d < dims; ++d)
      if (idx[d] == 0 || idx[d] == res - 1) {
        boundary = true;
        break;
      }
    if (boundary)
      for (int d = 0; d < dims; ++d) out.push_back(axis[idx[d]]);
    int d = dims - 1;
    for (; d >= 0; --d) {
      if (++idx[d] < res) break;
      idx[d] = 0;
    }
    if (d < 0) break;
  }
  return out;
}

std::optional<Point> project_direction_to_level_set(const Certificate& cert,
                                                    const Point& d) {
  double inf_norm = 0;
  for (double c : d.coords) inf_norm = std::max(inf_norm, std::abs(c));
  if (std::abs(inf_norm - 1) > 1e-12)
    throw std::invalid_argument("direction must have unit l-inf norm");
  const double q = quadratic_part(cert, d);
  if (!(q > 0)) return std::nullopt;
  const double t = std::sqrt(-cert_shift(cert) / q);
  Point p = d;
  for (double& c : p.coords) c *= t;
  return p;
}

namespace {

// Shared driver for the boundary-inward scans: for every (x, y) grid cell,
// project each direction onto the cell's certificate level set, take one GD
// step, and record the worst post-step certificate value.
template <typename CellFn>
Heatmap boundary_scan(const std::vector<double>& xs,
                      const std::vector<double>& ys, int dims, int dir_res,
                      double pass_tol, int threads, CellFn&& cell_fn) {
  if (!(pass_tol > 0)) throw std::invalid_argument("pass_tol must be > 0");
  Heatmap h;
  h.payload = Heatmap::Payload::PassFail;
  h.xs = xs;
  h.ys = ys;
  h.cells.resize(xs.size() * ys.size());
  const std::vector<double> dirs = cube_boundary_directions(dims, dir_res);
  const std::size_t ndirs = dirs.size() / dims;
  const int ncells = static_cast<int>(xs.size() * ys.size());

  parallel_for(ncells, threads, [&](int idx) {
    const int ix = idx % static_cast<int>(xs.size());
    const int iy = idx / static_cast<int>(xs.size());
    Certificate cert{};
    ProblemSpec spec{};
    cell_fn(xs[ix], ys[iy], cert, spec);
    const double scale2 = -cert_shift(cert);
    Point dp, xp, yp;
    dp.coords.resize(dims);
    xp.coords.resize(dims);
    yp.coords.resize(dims);
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < ndirs; ++k) {
      const double* d = dirs.data() + k * dims;
      for (int i = 0; i < dims; ++i) dp.coords[i] = d[i];
      const double q = quadratic_part(cert, dp);
      if (!(q > 0)) continue;
      const double t = std::sqrt(scale2 / q);
      for (int i = 0; i < dims; ++i) xp.coords[i] = t * d[i];
      gd_step_into(spec, xp.coords.data(), yp.coords.data());
      worst = std::max(worst, eval(cert, yp));
    }
    h.cells[idx].flag = worst <= pass_tol;
    h.cells[idx].value = worst;
  });
  return h;
}

}  // namespace

Heatmap scan_xi(double eta, double sigma, const std::vector<double>& deltas,
                const std::vector<double>& xis, int dir_res, double pass_tol,
                int threads) {
  return boundary_scan(
      deltas, xis, 4, dir_res, pass_tol, threads,
      [&](double delta, double xi, Certificate& cert, ProblemSpec& spec) {
        cert = Certificate::two_param(delta, xi, sigma);
        spec = ProblemSpec::diag_one_sigma(sigma, eta);
      });
}

Heatmap scan_quartic(double mu, const std::vector<double>& etas,
                     const std::vector<double>& deltas, int dir_res,
                     double pass_tol, int threads) {
  return boundary_scan(
      etas, deltas, 2, dir_res, pass_tol, threads,
      [&](double eta, double delta, Certificate& cert, ProblemSpec& spec) {
        cert = Certificate::isc(delta);
        spec = ProblemSpec::quartic(mu, eta);
      });
}

Heatmap scan_approx(int n, const std::vector<double>& etas,
                    const std::vector<double>& deltas, int dir_res,
                    double pass_tol, int threads) {
  return boundary_scan(
      etas, deltas, 2 * n, dir_res, pass_tol, threads,
      [&](double eta, double delta, Certificate& cert, ProblemSpec& spec) {
        cert = Certificate::iapx(delta);
        spec = ProblemSpec::approx(n, eta);
      });
}

std::optional<double> extract_threshold(const Heatmap& h, double x_column) {
  if (h.payload != Heatmap::Payload::PassFail)
    throw std::invalid_argument("threshold extraction needs a pass/fail map");
  int ix = -1;
  for (std::size_t i = 0; i < h.xs.size(); ++i)
    if (std::abs(h.xs[i] - x_column) <= 1e-9) {
      ix = static_cast<int>(i);
      break;
    }
  if (ix < 0) throw std::invalid_argument("column value not on the x axis");
  for (std::size_t iy = 0; iy < h.ys.size(); ++iy)
    if (h.at(ix, static_cast<int>(iy)).flag) return h.ys[iy];
  return std::nullopt;
}

Point batch_init(const TrajectoryBatchConfig& cfg, std::uint64_t trial_index) {
  if (cfg.init == InitKind::GridPoint) return cfg.grid_point;
  Rng rng(cfg.seed ^ trial_index);
  Point p;
  p.coords.resize(cfg.spec.point_size());
  for (double& c : p.coords) c = cfg.stddev * rng.normal();
  if (cfg.init == InitKind::GaussianRescaledIntoCertificate) {
    if (!cfg.cert)
      throw std::invalid_argument("certified init requires a certificate");
    p = rescale_into_certificate(*cfg.cert, p);
  }
  return p;
}

DivergenceReport run_divergence_experiment(const TrajectoryBatchConfig& cfg) {
  if (cfg.trials < 1) throw std::invalid_argument("trials must be >= 1");
  DivergenceReport rep;
  rep.trials.resize(cfg.trials);
  const std::size_t psize = cfg.spec.point_size();
  parallel_for(cfg.trials, 1, [&](int trial) {
    const Point x0 = batch_init(cfg, static_cast<std::uint64_t>(trial));
    std::vector<double> cur = x0.coords, nxt(psize);
    DivergenceTrial& tr = rep.trials[trial];
    tr.diverged = false;
    tr.first_step = -1;
    tr.max_sqnorm = sqnorm_of(cur);
    for (int t = 1; t <= cfg.steps; ++t) {
      gd_step_into(cfg.spec, cur.data(), nxt.data());
      std::swap(cur, nxt);
      const double sq = sqnorm_of(cur);
      if (std::isfinite(sq)) tr.max_sqnorm = std::max(tr.max_sqnorm, sq);
      if (!std::isfinite(sq) || sq > cfg.divergence_threshold) {
        tr.diverged = true;
        tr.first_step = t;
        break;
      }
    }
  });
  rep.diverged_count = 0;
  std::vector<int> steps;
  for (const DivergenceTrial& tr : rep.trials)
    if (tr.diverged) {
      ++rep.diverged_count;
      steps.push_back(tr.first_step);
    }
  if (steps.empty()) {
    rep.median_blowup_step = kNaN;
  } else {
    std::sort(steps.begin(), steps.end());
    const std::size_t m = steps.size();
    rep.median_blowup_step =
        m % 2 ? steps[m / 2] : 0.5 * (steps[m / 2 - 1] + steps[m / 2]);
  }
  return rep;
}

Point rescale_into_certificate(const Certificate& cert, const Point& x,
                               bool* exhausted) {
  if (exhausted) *exhausted = false;
  if (!(cert_shift(cert) < 0))
    throw std::invalid_argument("certificate sublevel set has empty interior");
  Point p = x;
  if (eval(cert, p) < -1e-9) return p;
  for (int k = 0; k < 60; ++k) {
    for (double& c : p.coords) c *= 0.5;
    if (eval(cert, p) < -1e-9) return p;
  }
  if (exhausted) *exhausted = true;
  return p;
}

}  // namespace certlab
