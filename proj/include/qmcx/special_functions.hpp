#pragma once

#include <vector>

namespace qmcx {

/// Standard normal density.
double normal_pdf(double x);

/// Standard normal CDF (via erfc, good to ~1e-16 relative in both tails).
double normal_cdf(double x);

/// sin(pi x), cos(pi x), sin(2 pi x), cos(2 pi x) for x in [0,1], computed
/// through the symmetry reductions so accuracy is relative near every zero
/// (plain sin(M_PI * x) loses all digits as x -> 1).
double sin_pi(double x);
double cos_pi(double x);
double sin_two_pi(double x);
double cos_two_pi(double x);

/// 1 - u^beta for u in [0,1], via expm1(beta log u); accurate where the
/// direct form cancels (u near 1).
double one_minus_pow(double u, double beta);

/// Inverse standard normal CDF on (0,1). Rational approximation refined by
/// one Halley step; relative accuracy around 1e-15.
double inverse_normal_cdf(double p);

/// sin_power_integral(k, phi) = \int_0^phi sin(t)^k dt, k >= 0, by the
/// standard reduction formula. Exact up to rounding, no quadrature.
double sin_power_integral(int k, double phi);

/// CDF F(x) = \int_0^x sin(pi t)^k dt / \int_0^1 sin(pi t)^k dt on [0,1],
/// with density proportional to sin(pi x)^k, plus a fast inverse.
class SinPowerCdf {
  public:
    explicit SinPowerCdf(int k);

    int power() const { return k_; }
    double norm() const { return norm_; }

    double cdf(double x) const;
    double pdf(double x) const;

    /// Monotone inversion: table lookup for the initial bracket, then
    /// bisection-safeguarded Newton to ~1e-14.
    double inverse(double u) const;

  private:
    int k_;
    double norm_;                  // \int_0^1 sin(pi t)^k dt
    std::vector<double> table_;    // cdf values on a uniform x-grid
};

}  // namespace qmcx
