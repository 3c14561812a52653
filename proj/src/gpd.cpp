#include "evtail/gpd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "evtail/errors.hpp"

namespace evtail {

namespace {

constexpr double kXiZero = 1e-6;    // |xi| below this uses the exponential limit
constexpr double kXiLo = -0.99;
constexpr double kXiHi = 2.0;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Sum of log(1 + s*y_i), batching factors so one log covers eight terms.
// Returns -infinity sentinel (via ok=false) when any factor is <= 0.
bool sum_log1p_scaled(std::span<const double> y, double s, double& out) {
    double acc = 0.0;
    double prod = 1.0;
    int in_batch = 0;
    for (const double yi : y) {
        const double t = 1.0 + s * yi;
        if (!(t > 0.0)) {
            return false;
        }
        prod *= t;
        if (++in_batch == 8 || prod > 1e280 || prod < 1e-280) {
            acc += std::log(prod);
            prod = 1.0;
            in_batch = 0;
        }
    }
    out = acc + std::log(prod);
    return true;
}

}  // namespace

GpdParams::GpdParams(double sigma_, double xi_) : sigma(sigma_), xi(xi_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma) || !std::isfinite(xi)) {
        throw std::invalid_argument("GpdParams: need finite xi and sigma > 0");
    }
}

double gpd_cdf(double y, const GpdParams& params) {
    if (!(y >= 0.0)) {
        throw std::invalid_argument("gpd_cdf: y must be >= 0");
    }
    if (std::fabs(params.xi) < kXiZero) {
        return 1.0 - std::exp(-y / params.sigma);
    }
    const double t = 1.0 + params.xi * y / params.sigma;
    if (t <= 0.0) {
        return 1.0;  // at or beyond the upper endpoint (xi < 0)
    }
    return 1.0 - std::pow(t, -1.0 / params.xi);
}

double gpd_quantile(double p, const GpdParams& params) {
    if (!(p >= 0.0 && p < 1.0)) {
        throw std::invalid_argument("gpd_quantile: p must lie in [0, 1)");
    }
    if (std::fabs(params.xi) < kXiZero) {
        return -params.sigma * std::log1p(-p);
    }
    return params.sigma / params.xi * (std::pow(1.0 - p, -params.xi) - 1.0);
}

double gpd_loglik(const GpdParams& params, std::span<const double> y) {
    const double n = static_cast<double>(y.size());
    if (std::fabs(params.xi) < kXiZero) {
        double sum = 0.0;
        for (const double yi : y) {
            if (yi < 0.0) {
                return -kInf;
            }
            sum += yi;
        }
        return -n * std::log(params.sigma) - sum / params.sigma;
    }
    for (const double yi : y) {
        if (yi < 0.0) {
            return -kInf;
        }
    }
    double logsum = 0.0;
    if (!sum_log1p_scaled(y, params.xi / params.sigma, logsum)) {
        return -kInf;
    }
    return -n * std::log(params.sigma) - (1.0 + 1.0 / params.xi) * logsum;
}

std::array<double, 2> gpd_loglik_grad(const GpdParams& params, std::span<const double> y) {
    const double sigma = params.sigma;
    const double xi = params.xi;
    const double n = static_cast<double>(y.size());

    if (std::fabs(xi) < kXiZero) {
        // limits of the general expressions as xi -> 0
        double sum_y = 0.0, sum_y2 = 0.0;
        for (const double yi : y) {
            sum_y += yi;
            sum_y2 += yi * yi;
        }
        const double d_sigma = -n / sigma + sum_y / (sigma * sigma);
        const double d_xi = sum_y2 / (2.0 * sigma * sigma) - sum_y / sigma;
        return {d_sigma, d_xi};
    }

    double sum_ratio = 0.0;   // y_i / (sigma + xi*y_i)
    double sum_logt = 0.0;
    double sum_yt = 0.0;      // (y_i/sigma) / t_i
    for (const double yi : y) {
        const double t = 1.0 + xi * yi / sigma;
        if (!(t > 0.0)) {
            return {std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::quiet_NaN()};
        }
        sum_ratio += yi / (sigma * t);
        sum_logt += std::log(t);
        sum_yt += (yi / sigma) / t;
    }
    const double d_sigma = -n / sigma + (1.0 + xi) / sigma * sum_ratio;
    const double d_xi = sum_logt / (xi * xi) - (1.0 + 1.0 / xi) * sum_yt;
    return {d_sigma, d_xi};
}

namespace {

struct Vertex {
    double ls;  // log sigma
    double xi;
    double f;   // negative loglik
};

double neg_loglik(double ls, double xi, std::span<const double> y) {
    if (xi < kXiLo || xi > kXiHi) {
        return kInf;
    }
    const double ll = gpd_loglik(GpdParams(std::exp(ls), xi), y);
    return std::isfinite(ll) ? -ll : kInf;
}

}  // namespace

GpdFit gpd_fit_mle(std::span<const double> y, double u) {
    if (y.size() < 10) {
        throw AnalysisError("gpd fit: need at least 10 exceedances, got " +
                            std::to_string(y.size()));
    }
    double mean = 0.0;
    for (const double yi : y) {
        if (!(yi > 0.0)) {
            throw std::invalid_argument("gpd fit: exceedances must be positive");
        }
        mean += yi;
    }
    mean /= static_cast<double>(y.size());
    double var = 0.0;
    for (const double yi : y) {
        var += (yi - mean) * (yi - mean);
    }
    var /= static_cast<double>(y.size() - 1);
    if (!(var > 0.0)) {
        throw AnalysisError("gpd fit: degenerate tail sample (all exceedances equal)");
    }

    // moment initializer, shape clamped away from the box edges
    const double ratio = mean * mean / var;
    const double xi0 = std::clamp(0.5 * (1.0 - ratio), -0.45, 0.45);
    const double sigma0 = 0.5 * mean * (ratio + 1.0);

    std::array<Vertex, 3> v;
    v[0] = {std::log(sigma0), xi0, 0.0};
    v[1] = {v[0].ls + 0.1, xi0, 0.0};
    v[2] = {v[0].ls, xi0 + 0.1, 0.0};
    for (auto& vert : v) {
        vert.f = neg_loglik(vert.ls, vert.xi, y);
    }

    bool converged = false;
    for (int iter = 0; iter < 2000; ++iter) {
        std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });

        const double d01 = std::hypot(v[0].ls - v[1].ls, v[0].xi - v[1].xi);
        const double d02 = std::hypot(v[0].ls - v[2].ls, v[0].xi - v[2].xi);
        const double d12 = std::hypot(v[1].ls - v[2].ls, v[1].xi - v[2].xi);
        if (std::max({d01, d02, d12}) < 1e-8) {
            converged = true;
            break;
        }

        const double cls = 0.5 * (v[0].ls + v[1].ls);
        const double cxi = 0.5 * (v[0].xi + v[1].xi);

        const double rls = cls + (cls - v[2].ls);
        const double rxi = cxi + (cxi - v[2].xi);
        const double fr = neg_loglik(rls, rxi, y);

        if (fr < v[0].f) {
            const double els = cls + 2.0 * (cls - v[2].ls);
            const double exi = cxi + 2.0 * (cxi - v[2].xi);
            const double fe = neg_loglik(els, exi, y);
            v[2] = fe < fr ? Vertex{els, exi, fe} : Vertex{rls, rxi, fr};
        } else if (fr < v[1].f) {
            v[2] = {rls, rxi, fr};
        } else {
            const bool outside = fr < v[2].f;
            const double bls = outside ? cls + 0.5 * (rls - cls) : cls + 0.5 * (v[2].ls - cls);
            const double bxi = outside ? cxi + 0.5 * (rxi - cxi) : cxi + 0.5 * (v[2].xi - cxi);
            const double fb = neg_loglik(bls, bxi, y);
            if (fb < std::min(fr, v[2].f)) {
                v[2] = {bls, bxi, fb};
            } else {
                // shrink toward the best vertex
                for (int k = 1; k < 3; ++k) {
                    v[k].ls = v[0].ls + 0.5 * (v[k].ls - v[0].ls);
                    v[k].xi = v[0].xi + 0.5 * (v[k].xi - v[0].xi);
                    v[k].f = neg_loglik(v[k].ls, v[k].xi, y);
                }
            }
        }
    }

    std::sort(v.begin(), v.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    GpdFit fit;
    fit.sigma = std::exp(v[0].ls);
    fit.xi = v[0].xi;
    fit.u = u;
    fit.loglik = -v[0].f;
    fit.n_exceedances = y.size();
    fit.converged = converged;
    return fit;
}

}  // namespace evtail
