// Reduced one-dimensional dynamics on the terminal balanced manifold:
// the cubic residual map g_eta, its period-2 orbit and stability multiplier,
// the conjugate unimodal map, and the balanced slice of the diag(1,sigma)
// dynamics.

#pragma once

namespace certlab {

// g_eta(L) = (1 - 2 eta) L + (2 eta - eta^2) L^2 + eta^2 L^3, evaluated in
// exactly this expanded monomial form so that identity checks against the
// factored representation are bit-stable.
double g(double eta, double L);

// Derivative g_eta'(L).
double g_prime(double eta, double L);

struct TwoCycle {
  double L_minus;
  double L_plus;
  double multiplier;   // g'(L_-) g'(L_+) = 7 - 4 eta - 2 eta^2
  double sharp_minus;  // 2 - 3 L_-
  double sharp_plus;   // 2 - 3 L_+
};

// Nontrivial period-2 orbit L_+- = (eta - 1 +- sqrt((eta-1)(eta+3)))/(2 eta).
// Requires eta > 1; below that the cycle polynomial has no real roots.
TwoCycle two_cycle(double eta);

// Conjugacy x = eta/(1+eta) (1 - L) turning g_eta into the unimodal map
// h(x) = m x (1-x)^2 with m = (1+eta)^2.
struct ConjugateMap {
  double eta;
  double m;
  double to_x(double L) const;
  double to_L(double x) const;
  double h(double x) const;
};
ConjugateMap conjugate_map(double eta);

// Schwarzian derivative of h; independent of m.
double h_schwarzian(double x);

// Factors of g(g(L)) - L = eta L (L-1) (eta L + 2) P_eta(L) Q_eta(L).
double P_eta(double eta, double L);
double Q_eta(double eta, double L);

// Grid check that the period-2 factorization holds and that P_eta, Q_eta are
// strictly positive on [-1, 1] (so no nontrivial 2-cycle exists for eta < 1).
struct PeriodTwoFactorReport {
  double max_factorization_residual;
  double min_P;
  double min_Q;
};
PeriodTwoFactorReport no_two_cycle_witness(double eta, int grid);

// Balanced slice of the diag(1,sigma) dynamics: with s = a^2 + u^2,
// a' = alpha a, u' = beta u, alpha = 1 - eta s + eta, beta = 1 - eta s + eta sigma.
struct ReducedDiagStep {
  double a_next;
  double u_next;
  double ratio_contraction;  // beta / alpha
};
ReducedDiagStep reduced_diag_sigma_step(double eta, double sigma, double a,
                                        double u);

}  // namespace certlab
