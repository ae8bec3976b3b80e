// Loss families for rank-1 factorization / approximation and their exact
// gradient-descent update maps.
//
// Every family is a pure function of (spec, point).  Layouts:
//   ScalarFactorization, QuarticScalar : (a, b)
//   ScalarVector(d)                    : (a[0..d-1], b[0..d-1])
//   Rank1Factorization, DiagOneSigma   : (a, b, u, v)
//   Rank1Approximation(n)              : (a[0..n-2], b[0..n-2], u, v)

#pragma once

#include <cstddef>
#include <vector>

namespace certlab {

enum class Family {
  ScalarFactorization,  // L = 1/2 (ab - sigma)^2
  ScalarVector,         // L = 1/2 (<a,b> - 1)^2, a,b in R^d
  Rank1Factorization,   // target diag(1,0), state (a,b,u,v)
  Rank1Approximation,   // vector signal a,b in R^{n-1}, scalar noise u,v
  DiagOneSigma,         // target diag(1,sigma), sigma in (0,1)
  QuarticScalar,        // L = 1/2 r^2 + mu r^4, r = ab - 1
};

struct ProblemSpec {
  Family family;
  double eta;          // step size, > 0
  double sigma = 1.0;  // ScalarFactorization (>0) and DiagOneSigma (in (0,1))
  double mu = 0.0;     // QuarticScalar
  int dim = 0;         // d for ScalarVector, n for Rank1Approximation

  static ProblemSpec scalar(double sigma, double eta);
  static ProblemSpec scalar_vector(int d, double eta);
  static ProblemSpec rank1(double eta);
  static ProblemSpec approx(int n, double eta);
  static ProblemSpec diag_one_sigma(double sigma, double eta);
  static ProblemSpec quartic(double mu, double eta);

  std::size_t point_size() const;
};

struct Point {
  std::vector<double> coords;
};

// Per-step quantities used throughout the certificate machinery.  Fields that
// are not defined for a family are zero with the matching flag false.
struct Observables {
  double L = 0;        // residual 1 - ab (or 1 - <a,b>)
  double G = 0;        // imbalance b^2 - a^2 (scalar signal only)
  double N = 0;        // noise u^2 + v^2
  double D_S = 0;      // signal misalignment |a|^2 |b|^2 - <a,b>^2
  double D_N = 0;      // u^2 v^2
  double D = 0;        // full cross term |A|^2 |B|^2 - <a,b>^2 (or scalar analogue)
  double sqnorm = 0;   // |A|^2 + |B|^2
  bool has_G = false;
  bool has_noise = false;
  bool has_misalignment = false;
};

// One simultaneous GD step; all components are computed from x, never from
// partially updated values.  Overflow in divergent regimes propagates as
// IEEE infinities.
Point gd_step(const ProblemSpec& spec, const Point& x);

// Allocation-free variant for hot loops: writes spec.point_size() doubles to
// out, reading the same number from x.  out must not alias x.
void gd_step_into(const ProblemSpec& spec, const double* x, double* out);

double loss(const ProblemSpec& spec, const Point& x);
std::vector<double> gradient(const ProblemSpec& spec, const Point& x);
Observables observables(const ProblemSpec& spec, const Point& x);

// ||grad L(x)|| <= tol, gradient in closed form.
bool is_stationary(const ProblemSpec& spec, const Point& x, double tol);

// Membership in the global minimizer set M*:
// |<a,b> - 1| <= tol and D_S <= tol and N <= tol.
bool is_global_minimizer(const ProblemSpec& spec, const Point& x, double tol);

// Rescaling of the sigma != 0,1 scalar problem to the sigma = 1 normal form:
// a -> a/sqrt(sigma), b -> b/sqrt(sigma), eta -> eta*sigma.  Certificates can
// then always assume sigma = 1.  Identity for families already in normal form.
struct NormalizedProblem {
  ProblemSpec spec;
  Point point;
};
NormalizedProblem normalize(const ProblemSpec& spec, const Point& x);

}  // namespace certlab
