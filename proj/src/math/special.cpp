#include "evtail/math/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace evtail::math {

double norm_cdf(double z) {
    return 0.5 * std::erfc(-z / 1.4142135623730950488);
}

namespace {

// Acklam's rational approximation to the probit function.
double norm_quantile_guess(double p) {
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
    const double plow = 0.02425;
    if (p < plow) {
        const double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - plow) {
        const double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    const double q = p - 0.5;
    const double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double norm_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw std::invalid_argument("norm_quantile: p must lie in (0, 1)");
    }
    double x = norm_quantile_guess(p);
    // One Halley step: phi' = density, phi''/phi' = -x.
    const double e = norm_cdf(x) - p;
    const double pdf = 0.3989422804014326779 * std::exp(-0.5 * x * x);
    if (pdf > 0.0) {
        const double u = e / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

double reg_lower_gamma(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0)) {
        throw std::invalid_argument("reg_lower_gamma: need a > 0, x >= 0");
    }
    if (x == 0.0) {
        return 0.0;
    }
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // series for P(a,x)
        double term = 1.0 / a;
        double sum = term;
        double ap = a;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) {
                break;
            }
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // Lentz continued fraction for Q(a,x)
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16) {
            break;
        }
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

double chi2_cdf(double x, int k) {
    if (k < 1) {
        throw std::invalid_argument("chi2_cdf: k must be >= 1");
    }
    if (x <= 0.0) {
        return 0.0;
    }
    return reg_lower_gamma(0.5 * k, 0.5 * x);
}

double chi2_quantile(double p, int k) {
    if (k < 1) {
        throw std::invalid_argument("chi2_quantile: k must be >= 1");
    }
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("chi2_quantile: p must lie in [0, 1)");
    }
    if (p == 0.0) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = static_cast<double>(k);
    while (chi2_cdf(hi, k) < p) {
        hi *= 2.0;
        if (hi > 1e12) {
            throw std::runtime_error("chi2_quantile: bracket failure");
        }
    }
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (chi2_cdf(mid, k) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-12 * (1.0 + lo)) {
            break;
        }
    }
    return 0.5 * (lo + hi);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace evtail::math
