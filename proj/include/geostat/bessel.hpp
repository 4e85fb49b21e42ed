#pragma once

#include <array>
#include <vector>

namespace geostat {

/// Modified Bessel function of the second kind, K_nu(x), for nu > 0, x > 0.
///
/// The order is split as nu = mu + m with |mu| <= 1/2. K_mu and K_{mu+1} come
/// from Temme's series when x <= 2, from the trapezoid rule on
///   e^x K_mu(x) = int_0^inf exp(-2 x sinh^2(t/2)) cosh(mu t) dt
/// (one step size per octave of x) up to x = 1024, and from Steed's continued
/// fraction beyond; forward recurrence in the order lifts them to K_nu. All of
/// the nu-dependent setup is done once in the constructor, so evaluating many
/// arguments at one order (a covariance matrix) only pays for the sums.
class BesselK {
 public:
  /// Arguments up to here use the series, beyond it the continued fraction.
  static constexpr double kSeriesLimit = 2.0;
  /// Terms kept in the series; the last one is below 1e-25 of the sum at x = 2.
  static constexpr int kSeriesTerms = 18;

  explicit BesselK(double nu);

  double order() const noexcept { return nu_; }

  /// K_nu(x). Throws DomainError for x <= 0 or NaN. Underflows to 0.
  double operator()(double x) const;

  /// e^x K_nu(x); finite for arguments where K_nu itself underflows.
  double scaled(double x) const;

  /// K_nu(x) for 0 < x <= kSeriesLimit, given log(x). No argument checks.
  double series(double x, double log_x) const;

  /// e^x K_nu(x) for x > kSeriesLimit. No argument checks.
  double scaled_large(double x) const;

 private:
  double continued_fraction(double x) const;
  double recur(double k_mu, double k_mu1, double two_over_x) const;

  double nu_;
  double mu_;
  int steps_;
  double gam1_;
  double gam2_;
  double half_gamma_plus_;   // Gamma(1 + mu) / 2
  double half_gamma_minus_;  // Gamma(1 - mu) / 2
  double pimu_factor_;
  double a1_;
  // Series polynomial coefficients (see the constructor).
  std::array<std::array<double, kSeriesTerms>, 6> series_{};
  // Order-only CF2 coefficients a_i, 1/a_i and c_i.
  std::vector<double> cf_a_, cf_inv_a_, cf_c_;
  // cosh(mu t_k) and cosh((mu + 1) t_k) on the quadrature nodes of all bands.
  std::vector<double> node_mu_, node_mu1_;
};

/// One-shot K_nu(x).
double bessel_k(double nu, double x);

}  // namespace geostat
