#include "funkmean/bessel.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "funkmean/error.hpp"

namespace funkmean {

namespace {

// Taylor coefficients of 1/Gamma(z) = sum_k c_k z^k (Abramowitz & Stegun 6.1.34).
constexpr std::array<double, 26> kReciprocalGamma = {
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

constexpr double kEps = 1e-16;
constexpr int kMaxIterations = 100000;
constexpr double kRescale = 1e250;

// gam1 = (1/G(1-mu) - 1/G(1+mu)) / (2 mu), gam2 = (1/G(1-mu) + 1/G(1+mu)) / 2
void temme_gammas(double mu, double& gam1, double& gam2) {
  gam1 = 0.0;
  gam2 = 0.0;
  for (std::size_t k = kReciprocalGamma.size(); k-- > 0;) {
    // c_{k+1} multiplies mu^k in 1/Gamma(1 + mu)
    if (k % 2 == 1) {
      gam1 = gam1 * mu * mu - kReciprocalGamma[k];
    } else {
      gam2 = gam2 * mu * mu + kReciprocalGamma[k];
    }
  }
}

struct ScaledPair {
  double k_mu;
  double k_mu1;
  double log_scale;
};

ScaledPair temme_series(double mu, double x) {
  const double half_x = 0.5 * x;
  const double pimu = std::numbers::pi * mu;
  const double fact = std::abs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  const double d = -std::log(half_x);
  double e = mu * d;
  const double fact2 = std::abs(e) < kEps ? 1.0 : std::sinh(e) / e;
  double gam1 = 0.0;
  double gam2 = 0.0;
  temme_gammas(mu, gam1, gam2);
  const double gampl = reciprocal_gamma_1p(mu);
  const double gammi = reciprocal_gamma_1p(-mu);

  double ff = fact * (gam1 * std::cosh(e) + gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / gampl;
  double q = 0.5 / (e * gammi);
  double c = 1.0;
  const double dd = half_x * half_x;
  double sum1 = p;
  const double mu2 = mu * mu;
  for (int i = 1; i <= kMaxIterations; ++i) {
    ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
    c *= dd / i;
    p /= i - mu;
    q /= i + mu;
    const double del = c * ff;
    sum += del;
    sum1 += c * (p - i * ff);
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return {sum, sum1 * 2.0 / x, 0.0};
}

ScaledPair steed_fraction(double mu, double x) {
  const double mu2 = mu * mu;
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu2;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  for (int i = 2; i <= kMaxIterations; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::abs(dels / s) < kEps) break;
  }
  h *= a1;
  const double k_mu = std::sqrt(std::numbers::pi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  return {k_mu, k_mu1, -x};
}

}  // namespace

double reciprocal_gamma_1p(double x) {
  double sum = 0.0;
  for (std::size_t k = kReciprocalGamma.size(); k-- > 0;) sum = sum * x + kReciprocalGamma[k];
  return sum;
}

double log_bessel_k(double nu, double x) {
  if (!(x > 0.0)) throw Error(ErrorCode::DomainError, "bessel_k needs x > 0 (got " + std::to_string(x) + ")");
  if (!(nu >= 0.0) || !std::isfinite(nu)) throw Error(ErrorCode::DomainError, "bessel_k needs finite nu >= 0");
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();

  const int steps = static_cast<int>(nu + 0.5);
  const double mu = nu - steps;
  ScaledPair pair = x < 2.0 ? temme_series(mu, x) : steed_fraction(mu, x);
  const double two_over_x = 2.0 / x;
  for (int i = 1; i <= steps; ++i) {
    const double next = (mu + i) * two_over_x * pair.k_mu1 + pair.k_mu;
    pair.k_mu = pair.k_mu1;
    pair.k_mu1 = next;
    if (pair.k_mu1 > kRescale) {
      pair.k_mu /= kRescale;
      pair.k_mu1 /= kRescale;
      pair.log_scale += std::log(kRescale);
    }
  }
  return std::log(pair.k_mu) + pair.log_scale;
}

double bessel_k(double nu, double x) { return std::exp(log_bessel_k(nu, x)); }

}  // namespace funkmean
