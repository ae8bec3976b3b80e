#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <optional>
#include <set>
#include <vector>

#include "certlab/certificate.hpp"
#include "certlab/rng.hpp"
#include "certlab/scan.hpp"
#include "certlab/terminal.hpp"

using namespace certlab;

namespace {

Point pt(std::initializer_list<double> cs) { return Point{std::vector<double>(cs)}; }

}  // namespace

TEST_CASE("grid constructors") {
  const std::vector<double> ls = linspace(0.0, 1.0, 5);
  REQUIRE(ls.size() == 5);
  CHECK(ls[0] == 0.0);
  CHECK(ls[4] == 1.0);
  CHECK(ls[2] == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> gs = grid_by_step(0.1, 1.9, 0.05);
  REQUIRE(gs.size() == 37);
  CHECK(gs.front() == doctest::Approx(0.1).epsilon(1e-12));
  CHECK(gs.back() == doctest::Approx(1.9).epsilon(1e-12));
  CHECK(grid_by_step(0.5, 0.5, 0.1).size() == 1);
}

TEST_CASE("trajectory runner") {
  SUBCASE("records, monotone state parameter, termination flags") {
    TrajectoryOptions opt;
    opt.cert = CertKind::Isc;
    opt.delta_lo = 0.5;
    opt.record_remainder = true;
    const ProblemSpec spec = ProblemSpec::scalar(1.0, 0.9);
    const auto recs = run_trajectory(spec, pt({1.6, 1.9}), 6, opt);
    REQUIRE(recs.size() == 7);
    CHECK(recs[0].t == 0);
    CHECK(recs[6].t == 6);
    for (std::size_t i = 1; i < recs.size(); ++i)
      CHECK(recs[i].delta >= recs[i - 1].delta - 1e-12);
    CHECK(recs.back().delta > recs.front().delta);
    CHECK_FALSE(recs.back().diverged);
  }
  SUBCASE("a stationary start is constant") {
    TrajectoryOptions opt;
    opt.cert = CertKind::Isc;
    opt.delta_lo = 0.5;
    const auto recs =
        run_trajectory(ProblemSpec::scalar(1.0, 0.5), pt({2, 0.5}), 10, opt);
    for (const auto& r : recs) {
      CHECK(r.x.coords[0] == 2.0);
      CHECK(r.x.coords[1] == 0.5);
      CHECK(std::fabs(r.delta - 16.0 / 17.0) <= 1e-10);
    }
  }
  SUBCASE("divergence stops the run early") {
    TrajectoryOptions opt;
    opt.cert = std::nullopt;
    opt.divergence_threshold = 1e6;
    const auto recs =
        run_trajectory(ProblemSpec::scalar(1.0, 3.0), pt({5, 5}), 400, opt);
    CHECK(recs.size() < 401);
    CHECK(recs.back().diverged);
  }
}

TEST_CASE("convergence sweep is consistent with single trajectories") {
  SweepConfig cfg;
  cfg.spec = ProblemSpec::scalar(1.0, 0.7);
  cfg.resolution = 21;
  cfg.steps = 400;
  cfg.conv_tol = 1e-2;
  const Heatmap h = sweep_convergence_region(cfg, 1);
  REQUIRE(h.xs.size() == 21);
  REQUIRE(h.ys.size() == 21);
  int converged = 0;
  for (std::size_t iy = 0; iy < h.ys.size(); ++iy)
    for (std::size_t ix = 0; ix < h.xs.size(); ++ix) {
      const auto& c = h.at(static_cast<int>(ix), static_cast<int>(iy));
      if (c.flag) ++converged;
      // Re-run the same cell through the generic trajectory path.
      TrajectoryOptions opt;
      opt.cert = std::nullopt;
      const auto recs = run_trajectory(cfg.spec, pt({h.xs[ix], h.ys[iy]}),
                                       cfg.steps, opt);
      const Point& xf = recs.back().x;
      const bool conv = !recs.back().diverged &&
                        std::fabs(xf.coords[0] * xf.coords[1] - 1.0) <= cfg.conv_tol;
      CHECK(c.flag == conv);
    }
  // For this small step size most of the window converges; the anti-diagonal
  // a = -b is an invariant line feeding the saddle, so not every cell does.
  CHECK(converged > 200);
}

TEST_CASE("overshoot sweep locks onto the period-two residual orbit") {
  SweepConfig cfg;
  cfg.spec = ProblemSpec::rank1(1.2);
  cfg.resolution = 9;
  cfg.half_width = 1.5;
  cfg.u_star = 0.0;
  cfg.v_star = 0.0;
  cfg.steps = 200;
  const TwoCycle cyc = two_cycle(1.2);
  int locked = 0, active = 0;
  for (double a0 : linspace(-1.5 + 1, 1.5 + 1, cfg.resolution))
    for (double b0 : linspace(-1.5 + 1, 1.5 + 1, cfg.resolution)) {
      TrajectoryOptions opt;
      opt.cert = std::nullopt;
      const auto recs = run_trajectory(cfg.spec, pt({a0, b0, 0.1, 0.1}),
                                       cfg.steps, opt);
      if (recs.back().diverged) continue;
      ++active;
      const double Le = recs[recs.size() - 1].obs.L;
      const double Lo = recs[recs.size() - 2].obs.L;
      const double miss = std::min(
          std::fabs(Le - cyc.L_minus) + std::fabs(Lo - cyc.L_plus),
          std::fabs(Le - cyc.L_plus) + std::fabs(Lo - cyc.L_minus));
      if (miss <= 1e-6) ++locked;
    }
  REQUIRE(active > 30);
  // Nearly every non-divergent start reaches the cycle within 200 steps.
  CHECK(locked >= active - 5);
}

TEST_CASE("cube boundary direction enumeration") {
  SUBCASE("counts") {
    CHECK(cube_boundary_directions(4, 41).size() == 512320u * 4);
    CHECK(cube_boundary_directions(2, 2001).size() == 8000u * 2);
  }
  SUBCASE("small case is the exact boundary of the integer cube") {
    const auto dirs = cube_boundary_directions(2, 3);
    REQUIRE(dirs.size() == 16u);
    std::set<std::pair<double, double>> got;
    for (std::size_t i = 0; i < dirs.size(); i += 2)
      got.insert({dirs[i], dirs[i + 1]});
    for (double a : {-1.0, 0.0, 1.0})
      for (double b : {-1.0, 0.0, 1.0})
        if (a != 0.0 || b != 0.0)
          CHECK(got.count({a, b}) == 1u);
  }
  SUBCASE("every direction has unit sup norm") {
    const auto dirs = cube_boundary_directions(3, 5);
    for (std::size_t i = 0; i < dirs.size(); i += 3) {
      double m = 0;
      for (int c = 0; c < 3; ++c) m = std::max(m, std::fabs(dirs[i + c]));
      CHECK(m == 1.0);
    }
  }
}

TEST_CASE("level-set projection of directions") {
  SUBCASE("isotropic example") {
    const auto p = project_direction_to_level_set(Certificate::isc(1.0),
                                                  pt({1, 1}));
    REQUIRE(p.has_value());
    // delta s - delta^2 ab + delta^2 - 4 = 0 with a = b = t gives t = sqrt 3.
    CHECK(p->coords[0] == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
    CHECK(std::fabs(eval(Certificate::isc(1.0), *p)) <= 1e-12);
  }
  SUBCASE("any admissible direction lands on the zero set") {
    Rng rng(51);
    const Certificate cert = Certificate::ifac(1.9);
    int tested = 0;
    while (tested < 200) {
      Point d;
      d.coords.resize(4);
      double m = 0;
      for (auto& c : d.coords) {
        c = rng.normal();
        m = std::max(m, std::fabs(c));
      }
      if (m == 0) continue;
      for (auto& c : d.coords) c /= m;
      const auto p = project_direction_to_level_set(cert, d);
      if (!p) continue;
      CHECK(std::fabs(eval(cert, *p)) <= 1e-10);
      ++tested;
    }
  }
  SUBCASE("directions with non-positive quadratic part are rejected") {
    // An out-of-domain two-parameter certificate (4 - (xi sigma)^2 < 0)
    // makes the quadratic part negative for anti-aligned noise directions.
    const Certificate cert = Certificate::two_param(1.0, 3.0, 0.9);
    const auto p = project_direction_to_level_set(cert, pt({0, 0, 1, -1}));
    CHECK_FALSE(p.has_value());
  }
}

TEST_CASE("noise-gain scan is deterministic and sound") {
  const ProblemSpec spec = ProblemSpec::diag_one_sigma(0.5, 0.2);
  const std::vector<double> deltas = {0.5, 1.0};
  const std::vector<double> xis = {0.5, 1.0, 1.5};
  const Heatmap h1 = scan_xi(0.2, 0.5, deltas, xis, 7, 1e-10, 1);
  const Heatmap h4 = scan_xi(0.2, 0.5, deltas, xis, 7, 1e-10, 4);
  REQUIRE(h1.cells.size() == 6u);
  SUBCASE("parallel equals serial bitwise") {
    for (std::size_t i = 0; i < h1.cells.size(); ++i) {
      CHECK(h1.cells[i].flag == h4.cells[i].flag);
      CHECK(h1.cells[i].value == h4.cells[i].value);
    }
  }
  SUBCASE("worst values are reproduced by the generic evaluation path") {
    for (std::size_t iy = 0; iy < h1.ys.size(); ++iy)
      for (std::size_t ix = 0; ix < h1.xs.size(); ++ix) {
        const auto& cell = h1.at(static_cast<int>(ix), static_cast<int>(iy));
        const Certificate cert =
            Certificate::two_param(h1.xs[ix], h1.ys[iy], 0.5);
        double worst = -std::numeric_limits<double>::infinity();
        const auto dirs = cube_boundary_directions(4, 7);
        for (std::size_t i = 0; i < dirs.size(); i += 4) {
          Point d;
          d.coords.assign(dirs.begin() + i, dirs.begin() + i + 4);
          const auto p = project_direction_to_level_set(cert, d);
          if (!p) continue;
          REQUIRE(std::fabs(eval(cert, *p)) <= 1e-10);
          worst = std::max(worst, eval(cert, gd_step(spec, *p)));
        }
        CHECK(std::fabs(worst - cell.value) <= 1e-10 * (1 + std::fabs(worst)));
        CHECK(cell.flag == (worst <= 1e-10));
      }
  }
}

TEST_CASE("threshold extraction from a coarse scan") {
  // Rank-1 approximation in dimension 3, one step-size column: the smallest
  // passing state parameter should bracket the closed-form admissibility
  // threshold 2/3 within one grid step.
  const std::vector<double> deltas = grid_by_step(0.55, 0.9, 0.05);
  const Heatmap h = scan_approx(3, std::vector<double>{0.6}, deltas, 9, 1e-10,
                                default_thread_count());
  const auto th = extract_threshold(h, 0.6);
  REQUIRE(th.has_value());
  CHECK(std::fabs(*th - 2.0 / 3.0) <= 0.05 + 1e-12);
}

TEST_CASE("batch initialization is deterministic and seed-dependent") {
  TrajectoryBatchConfig cfg;
  cfg.spec = ProblemSpec::rank1(1.2);
  cfg.init = InitKind::GaussianIso;
  cfg.stddev = 0.5;
  cfg.trials = 10;
  cfg.seed = 99;
  std::vector<Point> b1, b2;
  for (int i = 0; i < cfg.trials; ++i) {
    b1.push_back(batch_init(cfg, static_cast<std::uint64_t>(i)));
    b2.push_back(batch_init(cfg, static_cast<std::uint64_t>(i)));
  }
  for (std::size_t i = 0; i < b1.size(); ++i)
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(b1[i].coords[c] == b2[i].coords[c]);
  cfg.seed = 100;
  int same = 0;
  for (int i = 0; i < cfg.trials; ++i)
    if (b1[static_cast<std::size_t>(i)].coords[0] ==
        batch_init(cfg, static_cast<std::uint64_t>(i)).coords[0])
      ++same;
  CHECK(same == 0);
}

TEST_CASE("divergence experiment on small batches") {
  SUBCASE("factorization with a moderate overshoot never diverges") {
    TrajectoryBatchConfig cfg;
    cfg.spec = ProblemSpec::rank1(1.2);
    cfg.init = InitKind::GaussianRescaledIntoCertificate;
    cfg.stddev = 1.0;
    cfg.cert = Certificate::ifac(1.2);
    cfg.trials = 20;
    cfg.steps = 600;
    cfg.seed = 7;
    const DivergenceReport rep = run_divergence_experiment(cfg);
    CHECK(rep.diverged_count == 0);
    CHECK(rep.trials.size() == 20u);
  }
  SUBCASE("best approximation with the same overshoot always diverges") {
    TrajectoryBatchConfig cfg;
    cfg.spec = ProblemSpec::approx(3, 1.2);
    cfg.init = InitKind::GaussianIso;
    cfg.stddev = 0.01;
    cfg.trials = 20;
    cfg.steps = 600;
    cfg.seed = 7;
    const DivergenceReport rep = run_divergence_experiment(cfg);
    CHECK(rep.diverged_count == 20);
    for (const auto& t : rep.trials)
      if (t.diverged) CHECK(t.first_step >= 0);
  }
}

TEST_CASE("rescaling into a certificate region") {
  const Certificate cert = Certificate::isc(0.5);
  SUBCASE("certified points are unchanged") {
    const Point x = pt({0.3, 0.2});
    REQUIRE(eval(cert, x) < 0);
    const Point y = rescale_into_certificate(cert, x);
    CHECK(y.coords[0] == x.coords[0]);
    CHECK(y.coords[1] == x.coords[1]);
  }
  SUBCASE("uncertified points are pulled strictly inside") {
    const Point y = rescale_into_certificate(cert, pt({3, 3}));
    CHECK(eval(cert, y) < 0);
    CHECK(y.coords[0] / y.coords[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("the origin maps to itself") {
    const Point y = rescale_into_certificate(cert, pt({0, 0}));
    CHECK(y.coords[0] == 0.0);
    CHECK(y.coords[1] == 0.0);
  }
}

TEST_CASE("parallel_for covers every index exactly once") {
  std::vector<std::atomic<int>> hits(1000);
  for (auto& h : hits) h = 0;
  parallel_for(1000, 8, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  // Degenerate cases.
  parallel_for(0, 4, [&](std::size_t) { CHECK(false); });
  int one = 0;
  parallel_for(1, 1, [&](std::size_t) { ++one; });
  CHECK(one == 1);
}

TEST_CASE("heatmap cell indexing is row-major in x") {
  Heatmap h;
  h.payload = Heatmap::Payload::Scalar;
  h.xs = {0.0, 1.0, 2.0};
  h.ys = {10.0, 20.0};
  h.cells.resize(6);
  for (int iy = 0; iy < 2; ++iy)
    for (int ix = 0; ix < 3; ++ix)
      h.cells[static_cast<std::size_t>(iy) * 3 + ix].value = 10 * iy + ix;
  CHECK(h.at(2, 1).value == 12.0);
  CHECK(h.at(0, 0).value == 0.0);
  CHECK(h.at(1, 1).value == 11.0);
}
