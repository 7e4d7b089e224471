#pragma once

namespace funkmean {

/// log K_nu(x), the modified Bessel function of the second kind, for nu >= 0
/// and x > 0. Finite even where K_nu(x) itself overflows a double.
///
/// K_mu and K_{mu+1} with |mu| <= 1/2 come from Temme's series (x < 2) or
/// Steed's continued fraction (x >= 2); forward recurrence
/// K_{mu+1} = K_{mu-1} + (2 mu / x) K_mu then reaches nu, with rescaling.
/// Throws DomainError for x <= 0 or nu < 0.
double log_bessel_k(double nu, double x);

/// K_nu(x); +inf when the value exceeds the double range.
double bessel_k(double nu, double x);

/// 1/Gamma(1 + x) for |x| <= 1/2 by its Taylor series.
double reciprocal_gamma_1p(double x);

}  // namespace funkmean
