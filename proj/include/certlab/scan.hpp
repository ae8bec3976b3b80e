// Experiment drivers: trajectory recording, convergence-region sweeps,
// one-step boundary-inward scans over certificate parameter grids, threshold
// extraction, and post-critical divergence batches.  Everything is
// deterministic given a seed, and parallel runs match serial runs bit for bit.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "certlab/certificate.hpp"
#include "certlab/problem.hpp"

namespace certlab {

// Worker count: CERTLAB_THREADS if set (>= 1), else hardware concurrency.
int default_thread_count();

// Runs fn(0..n-1); each index must touch only its own output slot.
// threads <= 0 selects the default count.
template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn);

std::vector<double> linspace(double lo, double hi, int n);
// lo, lo+step, ... up to hi inclusive (within half a step of rounding).
std::vector<double> grid_by_step(double lo, double hi, double step);

struct TrajectoryRecord {
  int t;
  Point x;
  Observables obs;
  double loss_value;
  double delta;      // state parameter; NaN when not recorded/not available
  bool terminal;
  double remainder;  // R at delta for closed-form pairings, NaN otherwise
  bool diverged;     // sqnorm exceeded the divergence threshold at this step
};

struct TrajectoryOptions {
  std::optional<CertKind> cert;   // record the state parameter of this family
  bool record_remainder = false;  // also record R at the recorded delta
  double divergence_threshold = 1e6;
  double delta_lo = 1e-8;         // lower bracket for the state parameter
};

// Length T+1 including t = 0; stops early after the divergence flag fires.
std::vector<TrajectoryRecord> run_trajectory(const ProblemSpec& spec,
                                             const Point& x0, int T,
                                             const TrajectoryOptions& opt = {});

struct Heatmap {
  enum class Payload { PassFail, Converged, Scalar };
  struct Cell {
    bool flag = false;
    double value = 0;  // worst post-step value / final residual / scalar field
  };
  Payload payload;
  std::vector<double> xs, ys;
  std::vector<Cell> cells;  // row-major over (y, x)

  Cell& at(int ix, int iy) { return cells[static_cast<std::size_t>(iy) * xs.size() + ix]; }
  const Cell& at(int ix, int iy) const {
    return cells[static_cast<std::size_t>(iy) * xs.size() + ix];
  }
};

struct SweepConfig {
  ProblemSpec spec;
  double half_width = 2.5;   // signal grid (a0, b0) in [-A, A]^2
  int resolution = 200;      // points per axis
  double u_star = 0;         // fixed off-signal init (4-coordinate families)
  double v_star = 0;
  int steps = 400;
  double conv_tol = 1e-2;    // |1 - ab| < tol (and noise < tol where defined)
};

// x-axis a0, y-axis b0; cell flag = converged, value = final |L| + N.
Heatmap sweep_convergence_region(const SweepConfig& cfg, int threads = 0);

// All grid points of the l-inf unit cube boundary in the given dimension:
// res points per axis, keeping tuples with at least one coordinate at +-1.
// Flat layout with stride dims.
std::vector<double> cube_boundary_directions(int dims, int res);

// Scales d onto the level set {eval = 0}: t = sqrt(-shift / q(d)) where q is
// the homogeneous quadratic part.  Empty when q(d) <= 0 (ray never crosses).
std::optional<Point> project_direction_to_level_set(const Certificate& cert,
                                                    const Point& d);

// Boundary-inward scan over (delta, xi) for the two-parameter diag(1,sigma)
// certificate under the diag(1,sigma) dynamics.  x-axis delta, y-axis xi.
Heatmap scan_xi(double eta, double sigma, const std::vector<double>& deltas,
                const std::vector<double>& xis, int dir_res, double pass_tol,
                int threads = 0);

// Boundary-inward scan of Isc(delta) under the quartic dynamics over an
// (eta, delta) grid.  x-axis eta, y-axis delta.
Heatmap scan_quartic(double mu, const std::vector<double>& etas,
                     const std::vector<double>& deltas, int dir_res,
                     double pass_tol, int threads = 0);

// Boundary-inward scan of Iapx(delta) under the rank-1 approximation
// dynamics (dimension n) over an (eta, delta) grid.
Heatmap scan_approx(int n, const std::vector<double>& etas,
                    const std::vector<double>& deltas, int dir_res,
                    double pass_tol, int threads = 0);

// Smallest passing y-grid value in the given x column of a pass/fail map.
std::optional<double> extract_threshold(const Heatmap& h, double x_column);

enum class InitKind { GaussianIso, GaussianRescaledIntoCertificate, GridPoint };

struct TrajectoryBatchConfig {
  ProblemSpec spec;
  InitKind init = InitKind::GaussianIso;
  double stddev = 1.0;
  std::optional<Certificate> cert;  // rescale target for the certified init
  Point grid_point;                 // used by InitKind::GridPoint
  int trials = 100;
  int steps = 600;
  std::uint64_t seed = 0;
  double divergence_threshold = 1e6;
};

// Initial point of a given trial (trial seeds are seed XOR trial_index).
Point batch_init(const TrajectoryBatchConfig& cfg, std::uint64_t trial_index);

struct DivergenceTrial {
  bool diverged;
  int first_step;     // first step with sqnorm > threshold; -1 if bounded
  double max_sqnorm;  // largest finite sqnorm observed
};

struct DivergenceReport {
  std::vector<DivergenceTrial> trials;
  int diverged_count;
  double median_blowup_step;  // NaN when no trial diverged
};

DivergenceReport run_divergence_experiment(const TrajectoryBatchConfig& cfg);

// Largest dyadic scale s = 2^-k (k <= 60) with eval(s x) < -1e-9; identity
// when x is already strictly inside.  Sets *exhausted when the halving budget
// runs out (pathological directions).
Point rescale_into_certificate(const Certificate& cert, const Point& x,
                               bool* exhausted = nullptr);

}  // namespace certlab

#include "certlab/scan_parallel.inl"
