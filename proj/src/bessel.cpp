#include "geostat/bessel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numbers>

#include "geostat/errors.hpp"
#include "geostat/kernels.hpp"

namespace geostat {

namespace {

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;
constexpr int kTable = 64;
constexpr int kSeriesTerms = BesselK::kSeriesTerms;

// Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k, k = 1..26.
constexpr std::array<double, 26> kRecipGamma = {
    1.0,
    0.5772156649015329,
    -0.6558780715202538,
    -0.0420026350340952,
    0.1665386113822915,
    -0.0421977345555443,
    -0.0096219715278770,
    0.0072189432466630,
    -0.0011651675918591,
    -0.0002152416741149,
    0.0001280502823882,
    -0.0000201348547807,
    -0.0000012504934821,
    0.0000011330272320,
    -0.0000002056338417,
    0.0000000061160950,
    0.0000000050020075,
    -0.0000000011812746,
    0.0000000001043427,
    0.0000000000077823,
    -0.0000000000036968,
    0.0000000000005100,
    -0.0000000000000206,
    -0.0000000000000054,
    0.0000000000000014,
    0.0000000000000001,
};

// Trapezoid nodes for x in [2^(b+1), 2^(b+2)), b = 0..kBands-1. The step
// keeps x h^2 <= 0.35 (the integrand narrows like 1/sqrt(x)) and h <= 0.2
// (the strip of analyticity); both put the discretisation error near 1e-16.
// Nodes stop once exp(-2 x sinh^2(t/2) + 1.5 t) < e^-39 at the band's low end;
// every argument in the band sums all of them.
constexpr int kBands = 9;
constexpr double kQuadratureLimit = 1024.0;

struct Nodes {
  std::vector<double> t;
  std::vector<double> g;       // 2 sinh^2(t/2) = cosh t - 1 without cancellation
  std::array<double, kBands> h{};
  std::array<std::size_t, kBands + 1> offset{};
};

const Nodes& quadrature_nodes() {
  static const Nodes nodes = [] {
    Nodes n;
    for (int b = 0; b < kBands; ++b) {
      const double lo = std::ldexp(1.0, b + 1);
      const double h = std::min(0.2, std::sqrt(0.35 / (2.0 * lo)));
      n.h[b] = h;
      n.offset[b] = n.t.size();
      for (int k = 1;; ++k) {
        const double t = k * h;
        const double sh = std::sinh(0.5 * t);
        const double g = 2.0 * sh * sh;
        if (-lo * g + 1.5 * t < -39.0) break;
        n.t.push_back(t);
        n.g.push_back(g);
      }
    }
    n.offset[kBands] = n.t.size();
    return n;
  }();
  return nodes;
}

}  // namespace

BesselK::BesselK(double nu) : nu_(nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw DomainError("BesselK: order must be positive and finite");
  }
  steps_ = static_cast<int>(nu + 0.5);
  mu_ = nu - steps_;

  // gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2.
  // With 1/G(1 +- mu) = sum_k c_k (+-mu)^(k-1) the odd powers cancel exactly:
  // gam1 = -sum_j c_{2j} mu^(2j-2), gam2 = sum_j c_{2j+1} mu^(2j).
  const double mu2 = mu_ * mu_;
  gam1_ = 0.0;
  gam2_ = 0.0;
  for (std::size_t k = kRecipGamma.size(); k >= 1; --k) {
    if (k % 2 == 0) {
      gam1_ = gam1_ * mu2 - kRecipGamma[k - 1];
    } else {
      gam2_ = gam2_ * mu2 + kRecipGamma[k - 1];
    }
  }
  half_gamma_plus_ = 0.5 / (gam2_ - mu_ * gam1_);
  half_gamma_minus_ = 0.5 / (gam2_ + mu_ * gam1_);

  const double pimu = std::numbers::pi * mu_;
  pimu_factor_ = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);

  // Temme's recurrences f_k = (k f_{k-1} + p_{k-1} + q_{k-1}) / (k^2 - mu^2),
  // p_k = p_{k-1} / (k - mu), q_k = q_{k-1} / (k + mu) are linear in the
  // x-dependent seeds f_0, p_0, q_0, so with y = x^2 / 4 the sums
  //   K_mu     = sum_k y^k / k! f_k,
  //   K_mu+1 x/2 = sum_k y^k / k! (p_k - k f_k)
  // are fixed polynomials in y weighted by the seeds.
  double alpha = 1.0, beta = 0.0, gamma = 0.0, pk = 1.0, qk = 1.0, inv_fact = 1.0;
  for (int k = 0; k < kSeriesTerms; ++k) {
    if (k > 0) {
      const double denom = double(k) * k - mu2;
      alpha = k * alpha / denom;
      beta = (k * beta + pk) / denom;
      gamma = (k * gamma + qk) / denom;
      pk /= k - mu_;
      qk /= k + mu_;
      inv_fact /= k;
    }
    series_[0][k] = alpha * inv_fact;
    series_[1][k] = beta * inv_fact;
    series_[2][k] = gamma * inv_fact;
    series_[3][k] = k * alpha * inv_fact;
    series_[4][k] = (pk - k * beta) * inv_fact;
    series_[5][k] = k * gamma * inv_fact;
  }

  a1_ = 0.25 - mu2;
  cf_a_.resize(kTable + 1);
  cf_inv_a_.resize(kTable + 1);
  cf_c_.resize(kTable + 1);
  cf_a_[0] = -a1_;
  cf_c_[0] = a1_;
  for (int i = 1; i <= kTable; ++i) {
    cf_a_[i] = cf_a_[i - 1] - 2 * i;
    cf_inv_a_[i] = 1.0 / cf_a_[i];
    cf_c_[i] = -cf_a_[i] * cf_c_[i - 1] / (i + 1.0);
  }

  const Nodes& nodes = quadrature_nodes();
  node_mu_.resize(nodes.t.size());
  node_mu1_.resize(nodes.t.size());
  for (std::size_t k = 0; k < nodes.t.size(); ++k) {
    node_mu_[k] = std::cosh(mu_ * nodes.t[k]);
    node_mu1_[k] = std::cosh((mu_ + 1.0) * nodes.t[k]);
  }
}

double BesselK::recur(double k_mu, double k_mu1, double two_over_x) const {
  for (int i = 1; i <= steps_; ++i) {
    const double next = (mu_ + i) * two_over_x * k_mu1 + k_mu;
    k_mu = k_mu1;
    k_mu1 = next;
  }
  return k_mu;
}

// Temme's series for K_mu, K_{mu+1}.
double BesselK::series(double x, double log_x) const {
  const double d = std::numbers::ln2 - log_x;  // -log(x/2)
  const double e = mu_ * d;
  const double ex = std::exp(e);
  const double inv_ex = 1.0 / ex;
  const double cosh_e = 0.5 * (ex + inv_ex);
  double fact2;  // sinh(e) / e
  if (std::abs(e) < 0.1) {
    const double e2 = e * e;
    fact2 = 1.0 + e2 / 6.0 * (1.0 + e2 / 20.0 * (1.0 + e2 / 42.0 * (1.0 + e2 / 72.0)));
  } else {
    fact2 = 0.5 * (ex - inv_ex) / e;
  }
  const double f0 = pimu_factor_ * (gam1_ * cosh_e + gam2_ * fact2 * d);
  const double p0 = ex * half_gamma_plus_;
  const double q0 = inv_ex * half_gamma_minus_;

  const double y = 0.25 * x * x;
  double acc[6];
  for (int j = 0; j < 6; ++j) acc[j] = series_[j][kSeriesTerms - 1];
  for (int k = kSeriesTerms - 2; k >= 0; --k) {
    for (int j = 0; j < 6; ++j) acc[j] = acc[j] * y + series_[j][k];
  }
  const double k_mu = f0 * acc[0] + p0 * acc[1] + q0 * acc[2];
  const double half_x_k_mu1 = p0 * acc[4] - f0 * acc[3] - q0 * acc[5];
  const double two_over_x = 2.0 / x;
  return recur(k_mu, half_x_k_mu1 * two_over_x, two_over_x);
}

double BesselK::scaled_large(double x) const {
  if (x >= kQuadratureLimit) return continued_fraction(x);
  const Nodes& nodes = quadrature_nodes();
  const int b = static_cast<int>(std::bit_cast<std::uint64_t>(x) >> 52) - 1024;
  const std::size_t first = nodes.offset[b];
  const std::size_t last = nodes.offset[b + 1];
  double s0 = 0.0;
  double s1 = 0.0;
  kernels::active_kernels().exp_sums(x, static_cast<Index>(last - first), &nodes.g[first],
                                     &node_mu_[first], &node_mu1_[first], &s0, &s1);
  const double h = nodes.h[b];
  return recur(h * (0.5 + s0), h * (0.5 + s1), 2.0 / x);
}

// Steed's continued fraction CF2 for e^x K_mu, e^x K_{mu+1}.
double BesselK::continued_fraction(double x) const {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  double q = a1_;
  double a = -a1_;
  double c = a1_;
  double s = 1.0 + q * delh;
  for (int i = 1; i <= kMaxIterations; ++i) {
    double qnew;
    if (i <= kTable) {
      a = cf_a_[i];
      c = cf_c_[i];
      qnew = (q1 - b * q2) * cf_inv_a_[i];
    } else {
      a -= 2 * i;
      c = -a * c / (i + 1.0);
      qnew = (q1 - b * q2) / a;
    }
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels) < std::abs(s) * kEps) break;
  }
  h = a1_ * h;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu_ + x + 0.5 - h) / x;
  return recur(k_mu, k_mu1, 2.0 / x);
}

double BesselK::operator()(double x) const {
  if (!(x > 0.0)) throw DomainError("BesselK: argument must be positive");
  if (x <= kSeriesLimit) return series(x, std::log(x));
  if (x > 745.0) return 0.0;
  return scaled_large(x) * std::exp(-x);
}

double BesselK::scaled(double x) const {
  if (!(x > 0.0)) throw DomainError("BesselK: argument must be positive");
  if (x <= kSeriesLimit) return series(x, std::log(x)) * std::exp(x);
  return scaled_large(x);
}

double bessel_k(double nu, double x) { return BesselK(nu)(x); }

}  // namespace geostat
