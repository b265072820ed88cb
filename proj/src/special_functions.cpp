#include "qmcx/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qmcx {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;
constexpr double kSqrt2Pi = 2.50662827463100050242;
}  // namespace

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / kSqrt2Pi; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

double sin_pi(double x) {
    // symmetric about 1/2, and 1 - x is exact for x in [1/2, 1]
    return std::sin(kPi * std::min(x, 1.0 - x));
}

double cos_pi(double x) {
    return (x <= 0.5) ? std::cos(kPi * x) : -std::cos(kPi * (1.0 - x));
}

double sin_two_pi(double x) {
    return (x <= 0.5) ? sin_pi(2.0 * x) : -sin_pi(2.0 * (1.0 - x));
}

double cos_two_pi(double x) {
    return (x <= 0.5) ? cos_pi(2.0 * x) : cos_pi(2.0 * (1.0 - x));
}

double one_minus_pow(double u, double beta) {
    if (u <= 0.0) return 1.0;
    if (u >= 1.0) return 0.0;
    return -std::expm1(beta * std::log(u));
}

double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("inverse_normal_cdf: p must lie in (0,1)");

    // Acklam's rational approximation (~1.15e-9 relative), then one Halley
    // refinement against erfc.
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;

    double x;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }

    double e = normal_cdf(x) - p;
    double u = e * kSqrt2Pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

double sin_power_integral(int k, double phi) {
    if (k < 0) throw std::invalid_argument("sin_power_integral: k must be >= 0");
    if (k == 0) return phi;
    if (phi <= 0.0) return 0.0;

    // The reduction formula subtracts terms of size phi^{k-1} to produce a
    // result of size phi^{k+1}, so it sheds digits as phi -> 0. Below 0.7
    // use Gauss-Legendre instead: the integrand is positive and smooth, and
    // 16 nodes give full precision.
    if (phi < 0.7) {
        static const double gl_x[8] = {0.0950125098376374, 0.2816035507792589,
                                       0.4580167776572274, 0.6178762444026438,
                                       0.7554044083550030, 0.8656312023878318,
                                       0.9445750230732326, 0.9894009349916499};
        static const double gl_w[8] = {0.1894506104550685, 0.1826034150449236,
                                       0.1691565193950025, 0.1495959888165767,
                                       0.1246289712555339, 0.0951585116824928,
                                       0.0622535239386479, 0.0271524594117541};
        double half = 0.5 * phi, sum = 0.0;
        for (int i = 0; i < 8; ++i) {
            sum += gl_w[i] * std::pow(std::sin(half * (1.0 + gl_x[i])), k);
            sum += gl_w[i] * std::pow(std::sin(half * (1.0 - gl_x[i])), k);
        }
        return half * sum;
    }

    double s = std::sin(phi), co = std::cos(phi);
    if (k == 1) return 1.0 - co;
    // S_k = ((k-1) S_{k-2} - sin^{k-1} cos) / k
    double s_even = phi;         // S_0
    double s_odd = 1.0 - co;     // S_1
    double sin_pow = s;          // sin^1
    double result = (k % 2 == 0) ? s_even : s_odd;
    for (int j = 2; j <= k; ++j) {
        double prev = (j % 2 == 0) ? s_even : s_odd;
        double cur = ((j - 1) * prev - sin_pow * co) / j;  // sin_pow = sin^{j-1}
        if (j % 2 == 0)
            s_even = cur;
        else
            s_odd = cur;
        sin_pow *= s;
        result = cur;
    }
    return result;
}

SinPowerCdf::SinPowerCdf(int k) : k_(k) {
    if (k < 0) throw std::invalid_argument("SinPowerCdf: k must be >= 0");
    norm_ = sin_power_integral(k, kPi) / kPi;  // \int_0^1 sin(pi t)^k dt
    const int table_n = 512;
    table_.resize(table_n + 1);
    for (int i = 0; i <= table_n; ++i) table_[i] = cdf(static_cast<double>(i) / table_n);
    table_.front() = 0.0;
    table_.back() = 1.0;
}

double SinPowerCdf::cdf(double x) const {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    if (k_ == 0) return x;
    // route through the lower half; the density is symmetric about 1/2
    if (x > 0.5) return 1.0 - cdf(1.0 - x);
    return sin_power_integral(k_, kPi * x) / (kPi * norm_);
}

double SinPowerCdf::pdf(double x) const {
    if (k_ == 0) return 1.0;
    if (x < 0.0 || x > 1.0) return 0.0;
    return std::pow(sin_pi(x), k_) / norm_;
}

double SinPowerCdf::inverse(double u) const {
    if (u <= 0.0) return 0.0;
    if (u >= 1.0) return 1.0;
    if (k_ == 0) return u;
    if (u > 0.5) return 1.0 - inverse(1.0 - u);
    if (k_ == 1) return 2.0 * std::asin(std::sqrt(u)) / kPi;  // (1-cos(pi x))/2 = u

    // Seed: table interpolation, or the small-x asymptote
    // F(x) ~ (pi x)^{k+1} / ((k+1) pi norm) below the table resolution.
    const int n = static_cast<int>(table_.size()) - 1;
    int lo = 0, hi = n;
    while (hi - lo > 1) {
        int mid = (lo + hi) / 2;
        if (table_[mid] <= u)
            lo = mid;
        else
            hi = mid;
    }
    double xlo = static_cast<double>(lo) / n, xhi = static_cast<double>(hi) / n;
    double x;
    if (lo == 0)
        x = std::pow((k_ + 1) * kPi * norm_ * u, 1.0 / (k_ + 1)) / kPi;
    else
        x = xlo + (xhi - xlo) * (u - table_[lo]) / (table_[hi] - table_[lo]);
    if (!(x > xlo && x < xhi)) x = 0.5 * (xlo + xhi);

    // Newton inside a shrinking bracket; bisect whenever the step leaves it.
    for (int it = 0; it < 200; ++it) {
        double f = cdf(x) - u;
        if (f == 0.0) break;
        if (f > 0.0)
            xhi = x;
        else
            xlo = x;
        if (xhi - xlo <= 1e-16 * xhi) break;
        double dfdx = pdf(x);
        double next = (dfdx > 0.0) ? x - f / dfdx : xlo;
        if (!(next > xlo && next < xhi)) next = 0.5 * (xlo + xhi);
        x = next;
    }
    return x;
}

}  // namespace qmcx
