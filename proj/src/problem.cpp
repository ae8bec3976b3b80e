#include "certlab/problem.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace certlab {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void check_layout(const ProblemSpec& spec, const Point& x) {
  require(x.coords.size() == spec.point_size(),
          "point layout does not match problem family (expected " +
              std::to_string(spec.point_size()) + " coords, got " +
              std::to_string(x.coords.size()) + ")");
}

double dot(const double* p, const double* q, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += p[i] * q[i];
  return s;
}

}  // namespace

ProblemSpec ProblemSpec::scalar(double sigma, double eta) {
  require(sigma > 0, "scalar factorization requires sigma > 0");
  require(eta > 0, "eta must be positive");
  return {Family::ScalarFactorization, eta, sigma, 0.0, 0};
}

ProblemSpec ProblemSpec::scalar_vector(int d, double eta) {
  require(d >= 1, "scalar-vector problem requires d >= 1");
  require(eta > 0, "eta must be positive");
  return {Family::ScalarVector, eta, 1.0, 0.0, d};
}

ProblemSpec ProblemSpec::rank1(double eta) {
  require(eta > 0, "eta must be positive");
  return {Family::Rank1Factorization, eta, 1.0, 0.0, 0};
}

ProblemSpec ProblemSpec::approx(int n, double eta) {
  require(n >= 3, "rank-1 approximation requires n >= 3");
  require(eta > 0, "eta must be positive");
  return {Family::Rank1Approximation, eta, 1.0, 0.0, n};
}

ProblemSpec ProblemSpec::diag_one_sigma(double sigma, double eta) {
  require(sigma > 0 && sigma < 1, "diag(1,sigma) requires sigma in (0,1)");
  require(eta > 0, "eta must be positive");
  return {Family::DiagOneSigma, eta, sigma, 0.0, 0};
}

ProblemSpec ProblemSpec::quartic(double mu, double eta) {
  require(eta > 0, "eta must be positive");
  return {Family::QuarticScalar, eta, 1.0, mu, 0};
}

std::size_t ProblemSpec::point_size() const {
  switch (family) {
    case Family::ScalarFactorization:
    case Family::QuarticScalar:
      return 2;
    case Family::ScalarVector:
      return 2 * static_cast<std::size_t>(dim);
    case Family::Rank1Factorization:
    case Family::DiagOneSigma:
      return 4;
    case Family::Rank1Approximation:
      return 2 * static_cast<std::size_t>(dim);  // (n-1) + (n-1) + 1 + 1
  }
  return 0;
}

void gd_step_into(const ProblemSpec& spec, const double* x, double* out) {
  const double eta = spec.eta;
  switch (spec.family) {
    case Family::ScalarFactorization: {
      const double a = x[0], b = x[1], s = spec.sigma;
      out[0] = (1 - eta * b * b) * a + eta * s * b;
      out[1] = (1 - eta * a * a) * b + eta * s * a;
      return;
    }
    case Family::ScalarVector: {
      const int d = spec.dim;
      const double* a = x;
      const double* b = x + d;
      const double L = 1 - dot(a, b, d);
      for (int i = 0; i < d; ++i) out[i] = a[i] + eta * L * b[i];
      for (int i = 0; i < d; ++i) out[d + i] = b[i] + eta * L * a[i];
      return;
    }
    case Family::Rank1Factorization: {
      const double a = x[0], b = x[1], u = x[2], v = x[3];
      const double sa = a * a + u * u;  // |A|^2
      const double sb = b * b + v * v;  // |B|^2
      out[0] = (1 - eta * sb) * a + eta * b;
      out[1] = (1 - eta * sa) * b + eta * a;
      out[2] = (1 - eta * sb) * u;
      out[3] = (1 - eta * sa) * v;
      return;
    }
    case Family::Rank1Approximation: {
      const int k = spec.dim - 1;
      const double* a = x;
      const double* b = x + k;
      const double u = x[2 * k], v = x[2 * k + 1];
      const double sa = dot(a, a, k) + u * u;
      const double sb = dot(b, b, k) + v * v;
      for (int i = 0; i < k; ++i) out[i] = (1 - eta * sb) * a[i] + eta * b[i];
      for (int i = 0; i < k; ++i) out[k + i] = (1 - eta * sa) * b[i] + eta * a[i];
      out[2 * k] = (1 - eta * sb) * u;
      out[2 * k + 1] = (1 - eta * sa) * v;
      return;
    }
    case Family::DiagOneSigma: {
      const double a = x[0], b = x[1], u = x[2], v = x[3], s = spec.sigma;
      const double sa = a * a + u * u;
      const double sb = b * b + v * v;
      out[0] = (1 - eta * sb) * a + eta * b;
      out[1] = (1 - eta * sa) * b + eta * a;
      out[2] = (1 - eta * sb) * u + eta * s * v;
      out[3] = (1 - eta * sa) * v + eta * s * u;
      return;
    }
    case Family::QuarticScalar: {
      const double a = x[0], b = x[1];
      const double r = a * b - 1;
      const double w = eta * (r + 4 * spec.mu * r * r * r);
      out[0] = a - w * b;
      out[1] = b - w * a;
      return;
    }
  }
}

Point gd_step(const ProblemSpec& spec, const Point& x) {
  check_layout(spec, x);
  Point y;
  y.coords.resize(x.coords.size());
  gd_step_into(spec, x.coords.data(), y.coords.data());
  return y;
}

double loss(const ProblemSpec& spec, const Point& x) {
  check_layout(spec, x);
  const double* p = x.coords.data();
  switch (spec.family) {
    case Family::ScalarFactorization: {
      const double r = p[0] * p[1] - spec.sigma;
      return 0.5 * r * r;
    }
    case Family::ScalarVector: {
      const int d = spec.dim;
      const double r = dot(p, p + d, d) - 1;
      return 0.5 * r * r;
    }
    case Family::Rank1Factorization: {
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      const double r = a * b - 1;
      return 0.5 * (r * r + b * b * u * u + a * a * v * v + u * u * v * v);
    }
    case Family::Rank1Approximation: {
      // 1/2 |B A^T - X|_F^2 with |X|_F = 1 collapses to
      // 1/2 (|A|^2 |B|^2 + 1) - <a,b>.
      const int k = spec.dim - 1;
      const double u = p[2 * k], v = p[2 * k + 1];
      const double sa = dot(p, p, k) + u * u;
      const double sb = dot(p + k, p + k, k) + v * v;
      return 0.5 * (sa * sb + 1) - dot(p, p + k, k);
    }
    case Family::DiagOneSigma: {
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      const double r = a * b - 1;
      const double rn = u * v - spec.sigma;
      return 0.5 * (r * r + b * b * u * u + a * a * v * v + rn * rn);
    }
    case Family::QuarticScalar: {
      const double r = p[0] * p[1] - 1;
      return 0.5 * r * r + spec.mu * r * r * r * r;
    }
  }
  return 0;
}

std::vector<double> gradient(const ProblemSpec& spec, const Point& x) {
  check_layout(spec, x);
  const double* p = x.coords.data();
  std::vector<double> g(x.coords.size());
  switch (spec.family) {
    case Family::ScalarFactorization: {
      const double r = p[0] * p[1] - spec.sigma;
      g[0] = r * p[1];
      g[1] = r * p[0];
      break;
    }
    case Family::ScalarVector: {
      const int d = spec.dim;
      const double r = dot(p, p + d, d) - 1;
      for (int i = 0; i < d; ++i) g[i] = r * p[d + i];
      for (int i = 0; i < d; ++i) g[d + i] = r * p[i];
      break;
    }
    case Family::Rank1Factorization: {
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      const double r = a * b - 1;
      g[0] = r * b + a * v * v;
      g[1] = r * a + b * u * u;
      g[2] = (b * b + v * v) * u;
      g[3] = (a * a + u * u) * v;
      break;
    }
    case Family::Rank1Approximation: {
      const int k = spec.dim - 1;
      const double u = p[2 * k], v = p[2 * k + 1];
      const double sa = dot(p, p, k) + u * u;
      const double sb = dot(p + k, p + k, k) + v * v;
      for (int i = 0; i < k; ++i) g[i] = sb * p[i] - p[k + i];
      for (int i = 0; i < k; ++i) g[k + i] = sa * p[k + i] - p[i];
      g[2 * k] = sb * u;
      g[2 * k + 1] = sa * v;
      break;
    }
    case Family::DiagOneSigma: {
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      const double r = a * b - 1;
      const double rn = u * v - spec.sigma;
      g[0] = r * b + a * v * v;
      g[1] = r * a + b * u * u;
      g[2] = b * b * u + rn * v;
      g[3] = a * a * v + rn * u;
      break;
    }
    case Family::QuarticScalar: {
      const double r = p[0] * p[1] - 1;
      const double w = r + 4 * spec.mu * r * r * r;
      g[0] = w * p[1];
      g[1] = w * p[0];
      break;
    }
  }
  return g;
}

Observables observables(const ProblemSpec& spec, const Point& x) {
  check_layout(spec, x);
  const double* p = x.coords.data();
  Observables o;
  switch (spec.family) {
    case Family::ScalarFactorization:
    case Family::QuarticScalar: {
      const double a = p[0], b = p[1];
      o.L = 1 - a * b;
      o.G = b * b - a * a;
      o.has_G = true;
      o.sqnorm = a * a + b * b;
      break;
    }
    case Family::ScalarVector: {
      const int d = spec.dim;
      o.L = 1 - dot(p, p + d, d);
      o.sqnorm = dot(p, p, d) + dot(p + d, p + d, d);
      break;
    }
    case Family::Rank1Factorization:
    case Family::DiagOneSigma: {
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      o.L = 1 - a * b;
      o.G = b * b - a * a;
      o.has_G = true;
      o.N = u * u + v * v;
      o.has_noise = true;
      o.D_N = u * u * v * v;
      o.D = (a * a + u * u) * (b * b + v * v) - a * a * b * b;
      o.sqnorm = a * a + b * b + u * u + v * v;
      break;
    }
    case Family::Rank1Approximation: {
      const int k = spec.dim - 1;
      const double u = p[2 * k], v = p[2 * k + 1];
      const double aa = dot(p, p, k);
      const double bb = dot(p + k, p + k, k);
      const double ab = dot(p, p + k, k);
      o.L = 1 - ab;
      o.N = u * u + v * v;
      o.has_noise = true;
      o.D_S = aa * bb - ab * ab;
      o.has_misalignment = true;
      o.D_N = u * u * v * v;
      o.D = (aa + u * u) * (bb + v * v) - ab * ab;
      o.sqnorm = aa + bb + u * u + v * v;
      break;
    }
  }
  return o;
}

bool is_stationary(const ProblemSpec& spec, const Point& x, double tol) {
  require(tol > 0, "tolerance must be positive");
  const std::vector<double> g = gradient(spec, x);
  double s = 0;
  for (double gi : g) s += gi * gi;
  return std::sqrt(s) <= tol;
}

bool is_global_minimizer(const ProblemSpec& spec, const Point& x, double tol) {
  require(tol > 0, "tolerance must be positive");
  const Observables o = observables(spec, x);
  return std::abs(o.L) <= tol && o.D_S <= tol && o.N <= tol;
}

NormalizedProblem normalize(const ProblemSpec& spec, const Point& x) {
  check_layout(spec, x);
  if (spec.family != Family::ScalarFactorization || spec.sigma == 1.0)
    return {spec, x};
  const double rs = std::sqrt(spec.sigma);
  NormalizedProblem np;
  np.spec = ProblemSpec::scalar(1.0, spec.eta * spec.sigma);
  np.point.coords = {x.coords[0] / rs, x.coords[1] / rs};
  return np;
}

}  // namespace certlab
