#include "certlab/terminal.hpp"

#include <cmath>
#include <stdexcept>

namespace certlab {

double g(double eta, double L) {
  return (1 - 2 * eta) * L + (2 * eta - eta * eta) * L * L +
         eta * eta * L * L * L;
}

double g_prime(double eta, double L) {
  return (1 - 2 * eta) + 2 * (2 * eta - eta * eta) * L +
         3 * eta * eta * L * L;
}

TwoCycle two_cycle(double eta) {
  if (!(eta > 1))
    throw std::domain_error(
        "no nontrivial 2-cycle: the cycle polynomial has no real roots for "
        "eta <= 1");
  const double root = std::sqrt((eta - 1) * (eta + 3));
  TwoCycle c;
  c.L_minus = (eta - 1 - root) / (2 * eta);
  c.L_plus = (eta - 1 + root) / (2 * eta);
  c.multiplier = 7 - 4 * eta - 2 * eta * eta;
  c.sharp_minus = 2 - 3 * c.L_minus;
  c.sharp_plus = 2 - 3 * c.L_plus;
  return c;
}

double ConjugateMap::to_x(double L) const { return eta / (1 + eta) * (1 - L); }

double ConjugateMap::to_L(double x) const { return 1 - (1 + eta) / eta * x; }

double ConjugateMap::h(double x) const { return m * x * (1 - x) * (1 - x); }

ConjugateMap conjugate_map(double eta) {
  if (!(eta > 0)) throw std::domain_error("conjugate map requires eta > 0");
  return {eta, (1 + eta) * (1 + eta)};
}

double h_schwarzian(double x) {
  const double den = 1 - 4 * x + 3 * x * x;
  return -6 * (6 * x * x - 8 * x + 3) / (den * den);
}

double P_eta(double eta, double L) {
  return eta * eta * L * L + eta * (1 - eta) * L + (1 - eta);
}

double Q_eta(double eta, double L) {
  const double e2 = eta * eta;
  return 2 + 2 * eta * (1 - eta) * L + 3 * e2 * (1 - eta) * L * L +
         e2 * eta * (3 - eta) * L * L * L + e2 * e2 * L * L * L * L;
}

PeriodTwoFactorReport no_two_cycle_witness(double eta, int grid) {
  if (!(eta > 0 && eta < 1))
    throw std::domain_error("witness applies to eta in (0, 1)");
  if (grid < 2) throw std::invalid_argument("grid must have at least 2 points");
  PeriodTwoFactorReport rep{0, P_eta(eta, -1), Q_eta(eta, -1)};
  for (int i = 0; i < grid; ++i) {
    const double L = -1 + 2.0 * i / (grid - 1);
    const double lhs = g(eta, g(eta, L)) - L;
    const double rhs = eta * L * (L - 1) * (eta * L + 2) * P_eta(eta, L) *
                       Q_eta(eta, L);
    rep.max_factorization_residual =
        std::max(rep.max_factorization_residual, std::abs(lhs - rhs));
    rep.min_P = std::min(rep.min_P, P_eta(eta, L));
    rep.min_Q = std::min(rep.min_Q, Q_eta(eta, L));
  }
  return rep;
}

ReducedDiagStep reduced_diag_sigma_step(double eta, double sigma, double a,
                                        double u) {
  const double s = a * a + u * u;
  const double alpha = 1 - eta * s + eta;
  const double beta = 1 - eta * s + eta * sigma;
  return {alpha * a, beta * u, beta / alpha};
}

}  // namespace certlab
