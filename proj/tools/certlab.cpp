// certlab command-line tool.
//
// Subcommands:
//   trajectory    record a GD trajectory with observables and state parameter
//   sweep         convergence-region heatmap over a signal-coordinate grid
//   scan-xi       boundary-inward scan over (delta, xi) for diag(1,sigma)
//   scan-quartic  boundary-inward scan of Isc over an (eta, delta) grid
//   diverge       post-critical divergence batches
//   reduced       orbits of the reduced map g_eta and its 2-cycle data
//   verify        run the identity/property suite and print a pass/fail table
//
// Every subcommand writes a manifest.json that echoes the resolved
// configuration; re-running from that configuration reproduces all outputs
// bit-identically.  Exit codes: 0 success, 2 configuration error, 1 numerical
// contract failure in verify.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "certlab/certificate.hpp"
#include "certlab/io.hpp"
#include "certlab/problem.hpp"
#include "certlab/rng.hpp"
#include "certlab/scan.hpp"
#include "certlab/terminal.hpp"

namespace {

using namespace certlab;

std::string out_path(const std::string& prefix, const std::string& name) {
  if (prefix.empty()) return name;
  std::filesystem::create_directories(prefix);
  return prefix + "/" + name;
}

std::map<std::string, std::string> collect_config(const CLI::App* cmd) {
  std::map<std::string, std::string> cfg;
  for (const CLI::Option* opt : cmd->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "config") continue;
    if (opt->get_expected_min() == 0 && opt->get_expected_max() == 0) {
      cfg[name] = opt->count() ? "true" : "false";  // plain flag
    } else if (opt->count()) {
      std::string joined;
      for (const std::string& r : opt->results()) {
        if (!joined.empty()) joined += " ";
        joined += r;
      }
      cfg[name] = joined;
    } else {
      cfg[name] = opt->get_default_str();
    }
  }
  return cfg;
}

void write_manifest(const CLI::App* cmd, const std::string& prefix) {
  write_text_file(out_path(prefix, "manifest.json"),
                  manifest_json(cmd->get_name(), collect_config(cmd)));
}

ProblemSpec spec_from(const std::string& family, double eta, double sigma,
                      double mu, int dim) {
  if (family == "scalar") return ProblemSpec::scalar(sigma, eta);
  if (family == "scalar-vector") return ProblemSpec::scalar_vector(dim, eta);
  if (family == "rank1") return ProblemSpec::rank1(eta);
  if (family == "approx") return ProblemSpec::approx(dim, eta);
  if (family == "diag") return ProblemSpec::diag_one_sigma(sigma, eta);
  if (family == "quartic") return ProblemSpec::quartic(mu, eta);
  throw CLI::ValidationError("family", "unknown family: " + family);
}

std::optional<CertKind> default_cert_kind(Family family) {
  switch (family) {
    case Family::ScalarFactorization:
    case Family::QuarticScalar: return CertKind::Isc;
    case Family::ScalarVector: return CertKind::Isv;
    case Family::Rank1Factorization: return CertKind::Ifac;
    case Family::Rank1Approximation: return CertKind::Iapx;
    case Family::DiagOneSigma: return std::nullopt;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// verify: a compact re-run of the core identity checks.

struct Check {
  std::string name;
  std::function<bool(std::string&)> run;
};

bool run_verify(std::ostream& os) {
  std::vector<Check> checks;
  auto add = [&](const std::string& name,
                 std::function<bool(std::string&)> fn) {
    checks.push_back({name, std::move(fn)});
  };

  add("schema/tool version compatibility", [](std::string& detail) {
    // The data schema carries the tool's major version.
    const int tool_major = std::atoi(kToolVersion);
    detail = "schema " + std::to_string(kSchemaVersion) + ", tool major " +
             std::to_string(tool_major);
    return kSchemaVersion == tool_major;
  });

  add("affine recursion (all four closed-form pairings)", [](std::string& d) {
    Rng rng(11);
    double worst = 0;
    for (int i = 0; i < 2000; ++i) {
      const double delta = rng.uniform(0.05, 1.95);
      const double eta = rng.uniform(0.05, 1.95);
      for (int fam = 0; fam < 4; ++fam) {
        ProblemSpec spec = fam == 0   ? ProblemSpec::scalar(1.0, eta)
                           : fam == 1 ? ProblemSpec::scalar_vector(3, eta)
                           : fam == 2 ? ProblemSpec::rank1(eta)
                                      : ProblemSpec::approx(3, eta);
        const CertKind kind = fam == 0   ? CertKind::Isc
                              : fam == 1 ? CertKind::Isv
                              : fam == 2 ? CertKind::Ifac
                                         : CertKind::Iapx;
        Point x;
        x.coords.resize(spec.point_size());
        for (double& c : x.coords) c = rng.uniform(-2, 2);
        const Certificate cert{kind, delta};
        const double before = eval(cert, x);
        const double after = eval(cert, gd_step(spec, x));
        const RecursionCoeffs mr = recursion_coeffs(kind, delta, spec, x);
        worst = std::max(worst, std::abs(after - (mr.M * before + mr.R)) /
                                    (1 + std::abs(before)));
      }
    }
    d = "worst relative residual " + format_double(worst);
    return worst <= 1e-9;
  });

  add("perfect-square remainder identity", [](std::string& d) {
    Rng rng(12);
    double worst = 0;
    for (int i = 0; i < 10000; ++i) {
      const double delta = rng.uniform(0.05, 1.95);
      const double gamma = rng.uniform(-4, 4);
      const double lhs =
          delta * (1 + gamma * gamma - delta * gamma) *
              (delta * gamma * gamma + (delta * delta - 8) * gamma +
               16 / delta - 3 * delta) -
          (4 - delta * delta) * (delta * gamma - 2) * (delta * gamma - 2);
      const double g2 = delta * gamma * gamma - 4 * gamma + delta;
      const double rhs = g2 * g2;
      worst = std::max(worst, std::abs(lhs - rhs) / (1 + std::abs(rhs)));
    }
    d = "worst relative residual " + format_double(worst);
    return worst <= 1e-9;
  });

  add("state parameter equals 8/Q on certified scalar points",
      [](std::string& d) {
        Rng rng(13);
        double worst = 0;
        int used = 0;
        while (used < 500) {
          Point x;
          x.coords = {rng.uniform(-2.5, 2.5), rng.uniform(-2.5, 2.5)};
          const double Q = scalar_Q(1.0, x.coords[0], x.coords[1]);
          if (std::isnan(Q)) continue;
          const StateParameter sp = state_parameter(CertKind::Isc, x, 1e-6);
          if (sp.terminal) continue;
          worst = std::max(worst, std::abs(sp.delta - 8 / Q));
          ++used;
        }
        d = "worst |delta - 8/Q| " + format_double(worst);
        return worst <= 1e-10;
      });

  add("ellipse form is sign-equivalent to the scalar certificate",
      [](std::string& d) {
        Rng rng(14);
        for (int i = 0; i < 10000; ++i) {
          const double delta = rng.uniform(0.05, 1.95);
          Point x;
          x.coords = {rng.uniform(-3, 3), rng.uniform(-3, 3)};
          const double I = eval(Certificate::isc(delta), x);
          const Observables o =
              observables(ProblemSpec::scalar(1.0, 0.1), x);
          const double E = ellipse_value(delta, o.L, o.G);
          if ((I > 1e-12 && E < -1e-12) || (I < -1e-12 && E > 1e-12)) {
            d = "sign mismatch at delta=" + format_double(delta);
            return false;
          }
        }
        d = "10000 random draws";
        return true;
      });

  add("two-cycle closed forms at eta=1.2", [](std::string& d) {
    const TwoCycle c = two_cycle(1.2);
    const double iter_gap =
        std::abs(g(1.2, c.L_minus) - c.L_plus) +
        std::abs(g(1.2, c.L_plus) - c.L_minus);
    const double mult_gap = std::abs(c.multiplier - (-0.68));
    const double sharp_gap =
        std::abs(0.5 * (c.sharp_minus + c.sharp_plus) - 1.75);
    d = "orbit residual " + format_double(iter_gap);
    return iter_gap <= 1e-12 && mult_gap <= 1e-12 && sharp_gap <= 1e-12;
  });

  add("period-2 factorization witness (eta = 0.5)", [](std::string& d) {
    const PeriodTwoFactorReport rep = no_two_cycle_witness(0.5, 2001);
    d = "max residual " + format_double(rep.max_factorization_residual) +
        ", min P " + format_double(rep.min_P) + ", min Q " +
        format_double(rep.min_Q);
    return rep.max_factorization_residual <= 1e-10 && rep.min_P > 0 &&
           rep.min_Q > 0;
  });

  add("quadratic forms positive definite in the open domain",
      [](std::string& d) {
        Rng rng(15);
        for (int i = 0; i < 100; ++i) {
          const double delta = rng.uniform(0.05, 1.95);
          const double sigma = rng.uniform(0.05, 0.95);
          const double xi = rng.uniform(0.05, 2 / sigma - 0.05);
          if (!p_matrix(delta).positive_definite() ||
              !two_param_blocks(delta, xi, sigma).positive_definite()) {
            d = "failure at delta=" + format_double(delta);
            return false;
          }
        }
        d = "100 parameter draws";
        return true;
      });

  add("gradient matches finite differences", [](std::string& d) {
    Rng rng(16);
    double worst = 0;
    const std::vector<ProblemSpec> specs = {
        ProblemSpec::scalar(1.3, 0.2),   ProblemSpec::scalar_vector(3, 0.2),
        ProblemSpec::rank1(0.2),         ProblemSpec::approx(4, 0.2),
        ProblemSpec::diag_one_sigma(0.5, 0.2), ProblemSpec::quartic(0.25, 0.2)};
    for (const ProblemSpec& spec : specs) {
      for (int i = 0; i < 20; ++i) {
        Point x;
        x.coords.resize(spec.point_size());
        for (double& c : x.coords) c = rng.uniform(-2, 2);
        const std::vector<double> grad = gradient(spec, x);
        for (std::size_t j = 0; j < grad.size(); ++j) {
          Point xp = x, xm = x;
          xp.coords[j] += 1e-5;
          xm.coords[j] -= 1e-5;
          const double fd = (loss(spec, xp) - loss(spec, xm)) / 2e-5;
          worst = std::max(worst,
                           std::abs(fd - grad[j]) / (1 + std::abs(grad[j])));
        }
      }
    }
    d = "worst relative error " + format_double(worst);
    return worst <= 1e-6;
  });

  bool all_ok = true;
  for (const Check& c : checks) {
    std::string detail;
    bool ok = false;
    try {
      ok = c.run(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    os << (ok ? "PASS" : "FAIL") << "  " << c.name;
    if (!detail.empty()) os << "  [" << detail << "]";
    os << "\n";
    all_ok = all_ok && ok;
  }
  os << (all_ok ? "verify: all checks passed" : "verify: FAILURES present")
     << "\n";
  return all_ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"certlab: certificate-based analysis of gradient descent on "
               "rank-1 factorization problems"};
  app.require_subcommand(1);

  auto add_config = [](CLI::App* cmd) {
    cmd->set_config("--config", "", "flat key = value configuration file");
    cmd->allow_config_extras(false);
  };

  // trajectory ---------------------------------------------------------------
  auto* traj = app.add_subcommand("trajectory", "record a GD trajectory");
  std::string t_family = "scalar", t_init, t_out;
  double t_eta = 0.9, t_sigma = 1.0, t_mu = 0.0, t_std = 0.6, t_rescale = 0.0;
  int t_dim = 3, t_steps = 200;
  std::uint64_t t_seed = 1;
  bool t_image = false;
  traj->add_option("--family", t_family,
                   "scalar|scalar-vector|rank1|approx|diag|quartic")
      ->capture_default_str();
  traj->add_option("--eta", t_eta, "step size")->capture_default_str();
  traj->add_option("--sigma", t_sigma, "target parameter")->capture_default_str();
  traj->add_option("--mu", t_mu, "quartic coefficient")->capture_default_str();
  traj->add_option("--dim", t_dim, "d or n for vector families")
      ->capture_default_str();
  traj->add_option("--init", t_init, "comma-separated initial coordinates");
  traj->add_option("--seed", t_seed, "seed for random init")->capture_default_str();
  traj->add_option("--std", t_std, "stddev of random init")->capture_default_str();
  traj->add_option("--rescale-delta", t_rescale,
                   "rescale random init into the family certificate at this "
                   "delta (0 = off)")
      ->capture_default_str();
  traj->add_option("--steps", t_steps, "number of GD steps")->capture_default_str();
  traj->add_option("--out", t_out, "output directory prefix")->capture_default_str();
  traj->add_flag("--image", t_image, "also render images where applicable");
  add_config(traj);

  // sweep --------------------------------------------------------------------
  auto* sweep = app.add_subcommand("sweep", "convergence-region heatmap");
  std::string s_family = "rank1", s_out;
  double s_eta = 0.8, s_sigma = 1.0, s_mu = 0.25, s_A = 2.5, s_tol = 1e-2;
  double s_ustar = 0.2, s_vstar = 0.2, s_overlay = 0.0;
  int s_res = 200, s_steps = 400;
  bool s_image = false;
  sweep->add_option("--family", s_family, "scalar|rank1|quartic|diag")
      ->capture_default_str();
  sweep->add_option("--eta", s_eta, "step size")->capture_default_str();
  sweep->add_option("--sigma", s_sigma, "target parameter")->capture_default_str();
  sweep->add_option("--mu", s_mu, "quartic coefficient")->capture_default_str();
  sweep->add_option("--half-width", s_A, "signal grid half width")
      ->capture_default_str();
  sweep->add_option("--res", s_res, "grid points per axis")->capture_default_str();
  sweep->add_option("--steps", s_steps, "GD steps per cell")->capture_default_str();
  sweep->add_option("--tol", s_tol, "convergence tolerance")->capture_default_str();
  sweep->add_option("--ustar", s_ustar, "fixed off-signal u init")
      ->capture_default_str();
  sweep->add_option("--vstar", s_vstar, "fixed off-signal v init")
      ->capture_default_str();
  sweep->add_option("--overlay-delta", s_overlay,
                    "draw the certificate zero contour at this delta (0 = off)")
      ->capture_default_str();
  sweep->add_option("--out", s_out, "output directory prefix")->capture_default_str();
  sweep->add_flag("--image", s_image, "render a PPM image");
  add_config(sweep);

  // scan-xi ------------------------------------------------------------------
  auto* sxi = app.add_subcommand(
      "scan-xi", "boundary-inward scan over (delta, xi) for diag(1,sigma)");
  std::string x_out;
  double x_eta = 0.2, x_sigma = 0.5, x_dmin = 0.1, x_dmax = 1.9, x_dstep = 0.1;
  double x_xmin = 0.1, x_xmax = 0.0, x_xstep = 0.1, x_tol = 1e-4;
  int x_dir = 41;
  bool x_image = false;
  sxi->add_option("--eta", x_eta, "step size")->capture_default_str();
  sxi->add_option("--sigma", x_sigma, "target parameter in (0,1)")
      ->capture_default_str();
  sxi->add_option("--delta-min", x_dmin, "")->capture_default_str();
  sxi->add_option("--delta-max", x_dmax, "")->capture_default_str();
  sxi->add_option("--delta-step", x_dstep, "")->capture_default_str();
  sxi->add_option("--xi-min", x_xmin, "")->capture_default_str();
  sxi->add_option("--xi-max", x_xmax,
                  "0 = automatic: min(2/sigma, 6) minus one step")
      ->capture_default_str();
  sxi->add_option("--xi-step", x_xstep, "")->capture_default_str();
  sxi->add_option("--dir-res", x_dir, "direction grid points per axis (4D)")
      ->capture_default_str();
  sxi->add_option("--pass-tol", x_tol, "worst-value pass tolerance")
      ->capture_default_str();
  sxi->add_option("--out", x_out, "output directory prefix")->capture_default_str();
  sxi->add_flag("--image", x_image, "render a PPM image");
  add_config(sxi);

  // scan-quartic -------------------------------------------------------------
  auto* sq = app.add_subcommand(
      "scan-quartic", "boundary-inward scan of Isc under the quartic dynamics");
  std::string q_out;
  double q_mu = 0.0625, q_emin = 0.05, q_emax = 1.95, q_estep = 0.05;
  double q_dmin = 0.05, q_dmax = 1.95, q_dstep = 0.05, q_tol = 1e-4;
  int q_dir = 2001;
  bool q_image = false;
  sq->add_option("--mu", q_mu, "quartic coefficient")->capture_default_str();
  sq->add_option("--eta-min", q_emin, "")->capture_default_str();
  sq->add_option("--eta-max", q_emax, "")->capture_default_str();
  sq->add_option("--eta-step", q_estep, "")->capture_default_str();
  sq->add_option("--delta-min", q_dmin, "")->capture_default_str();
  sq->add_option("--delta-max", q_dmax, "")->capture_default_str();
  sq->add_option("--delta-step", q_dstep, "")->capture_default_str();
  sq->add_option("--dir-res", q_dir, "direction grid points per cube edge (2D)")
      ->capture_default_str();
  sq->add_option("--pass-tol", q_tol, "worst-value pass tolerance")
      ->capture_default_str();
  sq->add_option("--out", q_out, "output directory prefix")->capture_default_str();
  sq->add_flag("--image", q_image, "render a PPM image");
  add_config(sq);

  // diverge ------------------------------------------------------------------
  auto* div = app.add_subcommand("diverge", "post-critical divergence batches");
  std::string d_family = "approx", d_out;
  double d_eta = 1.2, d_std = 1.0, d_rescale = 0.0, d_threshold = 1e6;
  int d_dim = 3, d_trials = 100, d_steps = 600;
  std::uint64_t d_seed = 7;
  div->add_option("--family", d_family, "rank1|approx|scalar|diag|quartic")
      ->capture_default_str();
  div->add_option("--eta", d_eta, "step size")->capture_default_str();
  div->add_option("--dim", d_dim, "n for the approx family")->capture_default_str();
  div->add_option("--trials", d_trials, "")->capture_default_str();
  div->add_option("--steps", d_steps, "")->capture_default_str();
  div->add_option("--std", d_std, "init stddev")->capture_default_str();
  div->add_option("--rescale-delta", d_rescale,
                  "rescale inits into the family certificate at this delta "
                  "(0 = off)")
      ->capture_default_str();
  div->add_option("--threshold", d_threshold, "divergence threshold on sqnorm")
      ->capture_default_str();
  div->add_option("--seed", d_seed, "")->capture_default_str();
  div->add_option("--out", d_out, "output directory prefix")->capture_default_str();
  add_config(div);

  // reduced ------------------------------------------------------------------
  auto* red = app.add_subcommand("reduced", "reduced-map orbits and 2-cycle");
  std::string r_out;
  double r_eta = 1.2, r_L0 = 0.5;
  int r_steps = 200;
  red->add_option("--eta", r_eta, "step size")->capture_default_str();
  red->add_option("--L0", r_L0, "initial residual")->capture_default_str();
  red->add_option("--steps", r_steps, "")->capture_default_str();
  red->add_option("--out", r_out, "output directory prefix")->capture_default_str();
  add_config(red);

  // verify -------------------------------------------------------------------
  auto* ver = app.add_subcommand("verify", "run the identity/property suite");
  add_config(ver);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
      return app.exit(e);
    app.exit(e);
    return 2;
  }

  try {
    if (traj->parsed()) {
      const ProblemSpec spec = spec_from(t_family, t_eta, t_sigma, t_mu, t_dim);
      Point x0;
      if (!t_init.empty()) {
        std::stringstream ss(t_init);
        std::string tok;
        while (std::getline(ss, tok, ',')) x0.coords.push_back(std::stod(tok));
        if (x0.coords.size() != spec.point_size())
          throw CLI::ValidationError(
              "init", "expected " + std::to_string(spec.point_size()) +
                          " coordinates");
      } else {
        Rng rng(t_seed);
        x0.coords.resize(spec.point_size());
        for (double& c : x0.coords) c = t_std * rng.normal();
        if (t_rescale > 0) {
          const std::optional<CertKind> kind = default_cert_kind(spec.family);
          if (kind)
            x0 = rescale_into_certificate(Certificate{*kind, t_rescale}, x0);
        }
      }
      TrajectoryOptions opt;
      opt.cert = default_cert_kind(spec.family);
      opt.record_remainder = true;
      const auto records = run_trajectory(spec, x0, t_steps, opt);
      write_trajectory_csv(records, out_path(t_out, "trajectory.csv"));
      write_manifest(traj, t_out);
    } else if (sweep->parsed()) {
      SweepConfig cfg;
      cfg.spec = spec_from(s_family, s_eta, s_sigma, s_mu, 0);
      cfg.half_width = s_A;
      cfg.resolution = s_res;
      cfg.steps = s_steps;
      cfg.conv_tol = s_tol;
      cfg.u_star = s_ustar;
      cfg.v_star = s_vstar;
      const Heatmap h = sweep_convergence_region(cfg);
      write_heatmap_csv(h, out_path(s_out, "sweep.csv"));
      if (s_image) {
        std::vector<double> overlay;
        if (s_overlay > 0) {
          overlay.resize(h.cells.size());
          const bool noisy = cfg.spec.point_size() == 4;
          const CertKind kind =
              noisy ? CertKind::Ifac : CertKind::Isc;
          for (std::size_t iy = 0; iy < h.ys.size(); ++iy)
            for (std::size_t ix = 0; ix < h.xs.size(); ++ix) {
              Point p;
              if (noisy)
                p.coords = {h.xs[ix], h.ys[iy], s_ustar, s_vstar};
              else
                p.coords = {h.xs[ix], h.ys[iy]};
              overlay[iy * h.xs.size() + ix] =
                  eval(Certificate{kind, s_overlay}, p);
            }
        }
        render_heatmap_ppm(h, out_path(s_out, "sweep.ppm"), overlay);
      }
      write_manifest(sweep, s_out);
    } else if (sxi->parsed()) {
      const double xi_max =
          x_xmax > 0 ? x_xmax
                     : std::min(2.0 / x_sigma, 6.0) - x_xstep + 1e-12;
      const Heatmap h =
          scan_xi(x_eta, x_sigma, grid_by_step(x_dmin, x_dmax, x_dstep),
                  grid_by_step(x_xmin, xi_max, x_xstep), x_dir, x_tol);
      write_heatmap_csv(h, out_path(x_out, "scan_xi.csv"));
      if (x_image) render_heatmap_ppm(h, out_path(x_out, "scan_xi.ppm"));
      write_manifest(sxi, x_out);
    } else if (sq->parsed()) {
      const Heatmap h =
          scan_quartic(q_mu, grid_by_step(q_emin, q_emax, q_estep),
                       grid_by_step(q_dmin, q_dmax, q_dstep), q_dir, q_tol);
      write_heatmap_csv(h, out_path(q_out, "scan_quartic.csv"));
      if (q_image) render_heatmap_ppm(h, out_path(q_out, "scan_quartic.ppm"));
      write_manifest(sq, q_out);
    } else if (div->parsed()) {
      TrajectoryBatchConfig cfg;
      cfg.spec = spec_from(d_family, d_eta, 1.0, 0.0, d_dim);
      cfg.stddev = d_std;
      cfg.trials = d_trials;
      cfg.steps = d_steps;
      cfg.seed = d_seed;
      cfg.divergence_threshold = d_threshold;
      if (d_rescale > 0) {
        const std::optional<CertKind> kind = default_cert_kind(cfg.spec.family);
        if (!kind)
          throw CLI::ValidationError("rescale-delta",
                                     "family has no single-parameter certificate");
        cfg.init = InitKind::GaussianRescaledIntoCertificate;
        cfg.cert = Certificate{*kind, d_rescale};
      }
      const DivergenceReport rep = run_divergence_experiment(cfg);
      std::ostringstream js;
      js << "{\n  \"diverged_count\": " << rep.diverged_count
         << ",\n  \"trials\": " << cfg.trials
         << ",\n  \"median_blowup_step\": "
         << json_number(rep.median_blowup_step) << ",\n  \"per_trial\": [\n";
      for (std::size_t i = 0; i < rep.trials.size(); ++i) {
        const DivergenceTrial& tr = rep.trials[i];
        js << "    {\"diverged\": " << (tr.diverged ? "true" : "false")
           << ", \"first_step\": " << tr.first_step << ", \"max_sqnorm\": "
           << json_number(tr.max_sqnorm) << "}"
           << (i + 1 < rep.trials.size() ? "," : "") << "\n";
      }
      js << "  ]\n}\n";
      write_text_file(out_path(d_out, "diverge.json"), js.str());
      write_manifest(div, d_out);
    } else if (red->parsed()) {
      std::ostringstream csv;
      csv << "t,L\n";
      double L = r_L0;
      for (int t = 0; t <= r_steps; ++t) {
        csv << t << ',' << format_double(L) << "\n";
        L = g(r_eta, L);
      }
      write_text_file(out_path(r_out, "reduced.csv"), csv.str());
      std::ostringstream js;
      js << "{\n  \"eta\": " << json_number(r_eta) << ",\n";
      if (r_eta > 1) {
        const TwoCycle c = two_cycle(r_eta);
        js << "  \"two_cycle\": {\"L_minus\": " << json_number(c.L_minus)
           << ", \"L_plus\": " << json_number(c.L_plus)
           << ", \"multiplier\": " << json_number(c.multiplier)
           << ", \"sharp_minus\": " << json_number(c.sharp_minus)
           << ", \"sharp_plus\": " << json_number(c.sharp_plus) << "}\n";
      } else {
        js << "  \"two_cycle\": null\n";
      }
      js << "}\n";
      write_text_file(out_path(r_out, "reduced.json"), js.str());
      write_manifest(red, r_out);
    } else if (ver->parsed()) {
      return run_verify(std::cout) ? 0 : 1;
    }
  } catch (const CLI::Error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
