// Quadratic convergence certificates: evaluation, state-parameter solving,
// one-step affine recursion coefficients, level-set geometry, terminal sets,
// and the Lagrange alignment condition that pins down the P(delta) family.

#pragma once

#include <array>

#include "certlab/problem.hpp"

namespace certlab {

enum class CertKind {
  Isc,       // delta (a^2+b^2) - delta^2 ab + delta^2 - 4
  Ifac,      // Isc + delta (u^2+v^2)
  Iapx,      // delta (|A|^2+|B|^2) - delta^2 <a,b> + delta^2 - 4
  Isv,       // delta (|a|^2+|b|^2) + delta^2 (1 - <a,b>) - 4
  TwoParam,  // normalized two-block form for diag(1,sigma), see two_param_blocks
};

struct Certificate {
  CertKind kind;
  double delta;      // in (0,2)
  double xi = 0;     // TwoParam only, in (0, 2/sigma)
  double sigma = 0;  // TwoParam only, in (0,1)

  static Certificate isc(double delta);
  static Certificate ifac(double delta);
  static Certificate iapx(double delta);
  static Certificate isv(double delta);
  static Certificate two_param(double delta, double xi, double sigma);
};

// Constant term of the certificate: delta^2 - 4 for the unnormalized
// single-parameter forms, -1 for the normalized TwoParam form.
double cert_shift(const Certificate& cert);

// Full certificate value at x.
double eval(const Certificate& cert, const Point& x);

// Homogeneous quadratic part, i.e. eval(cert, x) - cert_shift(cert).
double quadratic_part(const Certificate& cert, const Point& x);

// One-step law I(delta; x_{t+1}) = M * I(delta; x_t) + R.
struct RecursionCoeffs {
  double M;
  double R;
};

// Closed-form (M, R) for the pairings Isc/ScalarFactorization(sigma=1),
// Isv/ScalarVector, Ifac/Rank1Factorization, Iapx/Rank1Approximation.
// Other pairings (notably TwoParam) have no closed form and are rejected.
RecursionCoeffs recursion_coeffs(CertKind kind, double delta,
                                 const ProblemSpec& spec, const Point& x);

struct StateParameter {
  double delta;   // in (lo, 2]; exactly 2 when terminal
  double lo, hi;  // final solver bracket
  bool terminal;  // point lies in the limiting set K2; delta = 2 by convention
};

// Unique delta in (lo, 2) with eval(delta; x) = 0, by bracketed bisection.
// Requires eval at lo to be <= 0.  Points whose certificate value stays
// negative up to the terminal gap are classified terminal.
StateParameter state_parameter(CertKind kind, const Point& x, double lo);

// The Q function of the scalar problem; for certified scalar points the
// state parameter satisfies delta = 8 / Q(1; a, b).
double scalar_Q(double sigma, double a, double b);

// Post-step certificate value for a point on the level set (|eval| <= 1e-10
// required); the caller compares against its pass tolerance.
double boundary_inward_value(const Certificate& cert, const ProblemSpec& spec,
                             const Point& x_on_level);

// q_eta(delta) = eta delta^2 - 4 (delta - eta); negativity is the admissibility
// condition for the approximation certificate.
double q_eta(double eta, double delta);

// Smaller root of q_{eta*sigma}(delta) = 0: 2(1 - sqrt(1-(eta sigma)^2))/(eta sigma).
// Requires eta*sigma in (0,1); at or past 1 there is no admissible threshold.
double delta_threshold(double eta, double sigma);

// Level-set geometry in the (L, G) plane.
double ellipse_value(double delta, double L, double G);

struct ShiftedEllipse {
  double center_L;
  double semi_L;
  double semi_G;
  bool valid;  // semi_L > 0
};
ShiftedEllipse shifted_ellipse_params(double delta, double N);

// G-axis semi-radius (2/delta) sqrt(4 - delta^2) of the unshifted ellipse.
double ellipse_g_radius(double delta);

// Membership in the terminal balanced set K2 of the family (tolerance applies
// to the equality constraints).  sigma is used by DiagOneSigma only.
bool terminal_set_contains(Family family, const Point& x, double sigma = 1.0,
                           double tol = 1e-9);

// Small dense symmetric quadratic form x^T P x + shift.
struct QuadraticForm {
  int n = 0;
  std::array<double, 16> P{};  // row-major n x n
  double shift = 0;

  double value(const Point& x) const;
  bool positive_definite() const;  // leading principal minors
};

// P(delta) = 1/(4-delta^2) [[delta, -delta^2/2], [-delta^2/2, delta]],
// with shift -1 so that value(x) <= 0 is the certified region.
QuadraticForm p_matrix(double delta);

// 4x4 block-diagonal form of the two-parameter diag(1,sigma) certificate.
QuadraticForm two_param_blocks(double delta, double xi, double sigma);

// Deviation of P x* from being an eigenvector of the loss Hessian at a global
// minimizer: || H P x* - proj_{P x*}(H P x*) || / || P x* ||.
double lagrange_alignment_residual(const ProblemSpec& spec,
                                   const Point& minimizer,
                                   const QuadraticForm& form);

// Renormalizing factor used by the remainder-summability diagnostic:
// 4 - delta^2 for the scalar-type certificates,
// (4 - delta^2)(4 - xi^2 sigma^2) for TwoParam.
double rho_factor(const Certificate& cert);

}  // namespace certlab
