#include "certlab/certificate.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace certlab {

namespace {

constexpr double kTerminalGap = 1e-9;  // K2 is probed at delta = 2 - gap

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

void require_domain(bool ok, const std::string& msg) {
  if (!ok) throw std::domain_error(msg);
}

double dot(const double* p, const double* q, int n) {
  double s = 0;
  for (int i = 0; i < n; ++i) s += p[i] * q[i];
  return s;
}

// Splits an even-length coordinate vector into the (a, b) halves used by the
// inner-product certificates; Iapx additionally peels off trailing (u, v).
struct Split {
  const double* a;
  const double* b;
  int k;
  double u, v;
};

Split split_apx(const Point& x) {
  const std::size_t sz = x.coords.size();
  require(sz >= 4 && sz % 2 == 0,
          "approximation certificate needs layout (a, b, u, v) with |a| = |b|");
  const int k = static_cast<int>((sz - 2) / 2);
  const double* p = x.coords.data();
  return {p, p + k, k, p[2 * k], p[2 * k + 1]};
}

}  // namespace

Certificate Certificate::isc(double delta) { return {CertKind::Isc, delta}; }
Certificate Certificate::ifac(double delta) { return {CertKind::Ifac, delta}; }
Certificate Certificate::iapx(double delta) { return {CertKind::Iapx, delta}; }
Certificate Certificate::isv(double delta) { return {CertKind::Isv, delta}; }

Certificate Certificate::two_param(double delta, double xi, double sigma) {
  return {CertKind::TwoParam, delta, xi, sigma};
}

double cert_shift(const Certificate& cert) {
  if (cert.kind == CertKind::TwoParam) return -1.0;
  return cert.delta * cert.delta - 4.0;
}

double quadratic_part(const Certificate& cert, const Point& x) {
  const double d = cert.delta;
  const double* p = x.coords.data();
  switch (cert.kind) {
    case CertKind::Isc: {
      require(x.coords.size() == 2, "Isc expects a 2-coordinate point");
      const double a = p[0], b = p[1];
      return d * (a * a + b * b) - d * d * a * b;
    }
    case CertKind::Ifac: {
      require(x.coords.size() == 4, "Ifac expects a 4-coordinate point");
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      return d * (a * a + b * b + u * u + v * v) - d * d * a * b;
    }
    case CertKind::Iapx: {
      const Split s = split_apx(x);
      const double sq = dot(s.a, s.a, s.k) + dot(s.b, s.b, s.k) +
                        s.u * s.u + s.v * s.v;
      return d * sq - d * d * dot(s.a, s.b, s.k);
    }
    case CertKind::Isv: {
      const std::size_t sz = x.coords.size();
      require(sz >= 2 && sz % 2 == 0, "Isv expects layout (a, b) with |a| = |b|");
      const int k = static_cast<int>(sz / 2);
      return d * (dot(p, p, k) + dot(p + k, p + k, k)) -
             d * d * dot(p, p + k, k);
    }
    case CertKind::TwoParam: {
      require(x.coords.size() == 4, "TwoParam expects a 4-coordinate point");
      const double a = p[0], b = p[1], u = p[2], v = p[3];
      const double xs = cert.xi * cert.sigma;
      const double sig_den = 4 - d * d;
      const double noi_den = 4 - xs * xs;
      return (d * (a * a + b * b) - d * d * a * b) / sig_den +
             (cert.xi * (u * u + v * v) - cert.xi * xs * u * v) / noi_den;
    }
  }
  return 0;
}

double eval(const Certificate& cert, const Point& x) {
  return quadratic_part(cert, x) + cert_shift(cert);
}

RecursionCoeffs recursion_coeffs(CertKind kind, double delta,
                                 const ProblemSpec& spec, const Point& x) {
  const double eta = spec.eta;
  const double d2m4 = delta * delta - 4;
  const Observables o = observables(spec, x);
  switch (kind) {
    case CertKind::Isc: {
      require(spec.family == Family::ScalarFactorization && spec.sigma == 1.0,
              "Isc recursion requires the sigma = 1 scalar factorization");
      const double M = 1 - eta * delta * o.L + eta * eta * o.L * o.L;
      const double R = eta * (delta - eta) * d2m4 * o.L * o.L;
      return {M, R};
    }
    case CertKind::Isv: {
      require(spec.family == Family::ScalarVector,
              "Isv recursion requires the scalar-vector family");
      const double M = 1 - eta * delta * o.L + eta * eta * o.L * o.L;
      const double R = eta * (delta - eta) * d2m4 * o.L * o.L;
      return {M, R};
    }
    case CertKind::Ifac: {
      require(spec.family == Family::Rank1Factorization,
              "Ifac recursion requires the rank-1 factorization family");
      const double M = 1 - eta * delta * o.L + eta * eta * (o.L * o.L + o.D);
      const double R = -(eta * delta) * (eta * delta) * o.D_N +
                       eta * (delta - eta) *
                           (d2m4 * o.L * o.L - 4 * o.D + delta * o.N);
      return {M, R};
    }
    case CertKind::Iapx: {
      require(spec.family == Family::Rank1Approximation,
              "Iapx recursion requires the rank-1 approximation family");
      const double M = 1 - eta * delta * o.L + eta * eta * (o.L * o.L + o.D);
      const double R =
          eta * (delta - eta) * (d2m4 * o.L * o.L - 4 * o.D) +
          eta * eta * delta * delta * (o.D_S - o.D_N) +
          eta * delta * (delta - eta) * o.N;
      return {M, R};
    }
    case CertKind::TwoParam:
      break;
  }
  throw std::invalid_argument(
      "no closed-form recursion for this certificate/family pairing");
}

StateParameter state_parameter(CertKind kind, const Point& x, double lo) {
  require(kind != CertKind::TwoParam,
          "state parameter is defined for single-parameter certificates only");
  require(lo > 0 && lo < 2, "lo must lie in (0, 2)");
  auto value_at = [&](double delta) {
    Certificate c{kind, delta};
    return eval(c, x);
  };
  const double f_lo = value_at(lo);
  if (f_lo > 0)
    throw std::invalid_argument("point is not certified at the lower bracket");
  const double hi0 = 2 - kTerminalGap;
  if (value_at(hi0) < 0) {
    // Negative all the way to the terminal gap: the point sits in K2.
    return {2.0, lo, 2.0, true};
  }
  double a = lo, b = hi0;
  // Sublevel sets are nested in delta, so the sign change is unique.
  for (int it = 0; it < 200 && (b - a) > 1e-14; ++it) {
    const double mid = 0.5 * (a + b);
    if (value_at(mid) <= 0)
      a = mid;
    else
      b = mid;
  }
  return {0.5 * (a + b), a, b, false};
}

double scalar_Q(double sigma, double a, double b) {
  const double s = a * a + b * b;
  const double disc = s * s - 16 * sigma * (a * b - sigma);
  if (disc < 0) return std::numeric_limits<double>::quiet_NaN();
  return s + std::sqrt(disc);
}

double boundary_inward_value(const Certificate& cert, const ProblemSpec& spec,
                             const Point& x_on_level) {
  require(std::abs(eval(cert, x_on_level)) <= 1e-10,
          "point must lie on the certificate level set");
  return eval(cert, gd_step(spec, x_on_level));
}

double q_eta(double eta, double delta) {
  return eta * delta * delta - 4 * (delta - eta);
}

double delta_threshold(double eta, double sigma) {
  const double es = eta * sigma;
  require_domain(es > 0 && es < 1,
                 "no admissible threshold; post-critical regime");
  return 2 * (1 - std::sqrt(1 - es * es)) / es;
}

double ellipse_value(double delta, double L, double G) {
  return L * L + G * G / (4 - delta * delta) - 4 / (delta * delta);
}

ShiftedEllipse shifted_ellipse_params(double delta, double N) {
  const double Delta = 4 - delta * delta;
  ShiftedEllipse e;
  e.center_L = delta * N / Delta;
  e.semi_L = 2 / delta - 2 * N / Delta;
  e.semi_G = std::sqrt(Delta) * e.semi_L;
  e.valid = e.semi_L > 0;
  return e;
}

double ellipse_g_radius(double delta) {
  return (2 / delta) * std::sqrt(4 - delta * delta);
}

bool terminal_set_contains(Family family, const Point& x, double sigma,
                           double tol) {
  const double* p = x.coords.data();
  switch (family) {
    case Family::ScalarFactorization:
    case Family::QuarticScalar: {
      const double a = p[0], b = p[1];
      const double w = 1 - a * a;
      return std::abs(a - b) <= tol && w * w <= 1 + tol;
    }
    case Family::ScalarVector: {
      const int k = static_cast<int>(x.coords.size() / 2);
      for (int i = 0; i < k; ++i)
        if (std::abs(p[i] - p[k + i]) > tol) return false;
      return dot(p, p, k) <= 2 + tol;
    }
    case Family::Rank1Factorization: {
      return std::abs(p[0] - p[1]) <= tol && std::abs(p[2]) <= tol &&
             std::abs(p[3]) <= tol && p[0] * p[0] <= 2 + tol;
    }
    case Family::Rank1Approximation: {
      const int k = static_cast<int>((x.coords.size() - 2) / 2);
      for (int i = 0; i < k; ++i)
        if (std::abs(p[i] - p[k + i]) > tol) return false;
      return std::abs(p[2 * k]) <= tol && std::abs(p[2 * k + 1]) <= tol &&
             dot(p, p, k) <= 2 + tol;
    }
    case Family::DiagOneSigma: {
      return std::abs(p[0] - p[1]) <= tol && std::abs(p[2] - p[3]) <= tol &&
             p[0] * p[0] + p[2] * p[2] / sigma <= 2 + tol;
    }
  }
  return false;
}

double QuadraticForm::value(const Point& x) const {
  require(static_cast<int>(x.coords.size()) == n,
          "point size does not match quadratic form");
  double s = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) s += x.coords[i] * P[i * 4 + j] * x.coords[j];
  return s + shift;
}

bool QuadraticForm::positive_definite() const {
  // Cholesky on a local copy; success iff all pivots are strictly positive.
  double a[4][4] = {};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a[i][j] = P[i * 4 + j];
  for (int i = 0; i < n; ++i) {
    double piv = a[i][i];
    for (int k = 0; k < i; ++k) piv -= a[i][k] * a[i][k];
    if (!(piv > 0)) return false;
    const double l = std::sqrt(piv);
    a[i][i] = l;
    for (int j = i + 1; j < n; ++j) {
      double s = a[j][i];
      for (int k = 0; k < i; ++k) s -= a[j][k] * a[i][k];
      a[j][i] = s / l;
    }
  }
  return true;
}

QuadraticForm p_matrix(double delta) {
  require_domain(delta > 0 && delta < 2, "p_matrix requires delta in (0, 2)");
  const double den = 4 - delta * delta;
  QuadraticForm f;
  f.n = 2;
  f.shift = -1;
  f.P[0 * 4 + 0] = f.P[1 * 4 + 1] = delta / den;
  f.P[0 * 4 + 1] = f.P[1 * 4 + 0] = -delta * delta / (2 * den);
  return f;
}

QuadraticForm two_param_blocks(double delta, double xi, double sigma) {
  require_domain(sigma > 0 && sigma < 1, "two_param_blocks requires sigma in (0,1)");
  require_domain(delta > 0 && delta < 2, "two_param_blocks requires delta in (0,2)");
  require_domain(xi > 0 && xi * sigma < 2,
                 "two_param_blocks requires xi in (0, 2/sigma)");
  const double sig_den = 4 - delta * delta;
  const double noi_den = 4 - xi * xi * sigma * sigma;
  QuadraticForm f;
  f.n = 4;
  f.shift = -1;
  f.P[0 * 4 + 0] = f.P[1 * 4 + 1] = delta / sig_den;
  f.P[0 * 4 + 1] = f.P[1 * 4 + 0] = -delta * delta / (2 * sig_den);
  f.P[2 * 4 + 2] = f.P[3 * 4 + 3] = xi / noi_den;
  f.P[2 * 4 + 3] = f.P[3 * 4 + 2] = -xi * xi * sigma / (2 * noi_den);
  return f;
}

double lagrange_alignment_residual(const ProblemSpec& spec,
                                   const Point& minimizer,
                                   const QuadraticForm& form) {
  require(form.n == 2 && minimizer.coords.size() == 2,
          "alignment residual is defined for the 2-coordinate scalar problem");
  require(is_global_minimizer(spec, minimizer, 1e-8),
          "alignment residual expects a global minimizer");
  const double a = minimizer.coords[0], b = minimizer.coords[1];
  // Loss Hessian at a minimizer (r = 0): [[b^2, 2ab-1], [2ab-1, a^2]].
  const double H[2][2] = {{b * b, 2 * a * b - 1}, {2 * a * b - 1, a * a}};
  const double y0 = form.P[0] * a + form.P[1] * b;   // y = P x*
  const double y1 = form.P[4] * a + form.P[5] * b;
  const double z0 = H[0][0] * y0 + H[0][1] * y1;     // z = H y
  const double z1 = H[1][0] * y0 + H[1][1] * y1;
  const double yy = y0 * y0 + y1 * y1;
  const double lam = (y0 * z0 + y1 * z1) / yy;       // Rayleigh quotient
  const double r0 = z0 - lam * y0;
  const double r1 = z1 - lam * y1;
  return std::sqrt((r0 * r0 + r1 * r1) / yy);
}

double rho_factor(const Certificate& cert) {
  const double d = cert.delta;
  if (cert.kind == CertKind::TwoParam)
    return (4 - d * d) * (4 - cert.xi * cert.xi * cert.sigma * cert.sigma);
  return 4 - d * d;
}

}  // namespace certlab
