#include "evtail/stationarity.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "evtail/errors.hpp"

namespace evtail {

namespace detail {
extern const double kAdfCritTable[6][3];
extern const double kAdfTableN[6];
}

int schwert_lag(std::size_t n) {
    return static_cast<int>(std::floor(12.0 * std::pow(static_cast<double>(n) / 100.0, 0.25)));
}

double adf_critical_value(std::size_t n_obs, double significance) {
    int col = -1;
    if (std::fabs(significance - 0.01) < 1e-9) col = 0;
    if (std::fabs(significance - 0.05) < 1e-9) col = 1;
    if (std::fabs(significance - 0.10) < 1e-9) col = 2;
    if (col < 0) {
        throw std::invalid_argument("adf: significance must be 0.01, 0.05 or 0.10");
    }

    // table N is the walk length; a regression on n_obs points corresponds
    // to a walk one sample longer
    const double n_star = static_cast<double>(n_obs) + 1.0;
    const double inv = 1.0 / n_star;

    const auto& tab = detail::kAdfCritTable;
    const auto& rows = detail::kAdfTableN;
    if (n_star <= rows[0]) {
        return tab[0][col];
    }
    for (int r = 0; r < 5; ++r) {
        const double inv_a = 1.0 / rows[r];
        const double inv_b = rows[r + 1] > 0.0 ? 1.0 / rows[r + 1] : 0.0;
        if (inv <= inv_a && inv >= inv_b) {
            const double w = (inv - inv_b) / (inv_a - inv_b);
            return tab[r + 1][col] + w * (tab[r][col] - tab[r + 1][col]);
        }
    }
    return tab[5][col];
}

namespace detail {

namespace {

// Windowed prefix sum: pref[k] accumulates through index k; a < 1 means
// the window starts at the array origin.
inline double window(const std::vector<double>& pref, std::ptrdiff_t a, std::ptrdiff_t b) {
    const double hi = pref[static_cast<std::size_t>(b)];
    return a >= 1 ? hi - pref[static_cast<std::size_t>(a - 1)] : hi;
}

// Cholesky factorization in place (lower), then two triangular solves.
// Returns false on a non-positive pivot.
bool cholesky(std::vector<double>& a, int m) {
    for (int j = 0; j < m; ++j) {
        double diag = a[static_cast<std::size_t>(j) * m + j];
        for (int k = 0; k < j; ++k) {
            const double ljk = a[static_cast<std::size_t>(j) * m + k];
            diag -= ljk * ljk;
        }
        if (!(diag > 0.0)) {
            return false;
        }
        const double root = std::sqrt(diag);
        a[static_cast<std::size_t>(j) * m + j] = root;
        for (int i = j + 1; i < m; ++i) {
            double v = a[static_cast<std::size_t>(i) * m + j];
            for (int k = 0; k < j; ++k) {
                v -= a[static_cast<std::size_t>(i) * m + k] * a[static_cast<std::size_t>(j) * m + k];
            }
            a[static_cast<std::size_t>(i) * m + j] = v / root;
        }
    }
    return true;
}

void chol_solve(const std::vector<double>& l, int m, std::vector<double>& x) {
    for (int i = 0; i < m; ++i) {
        double v = x[static_cast<std::size_t>(i)];
        for (int k = 0; k < i; ++k) {
            v -= l[static_cast<std::size_t>(i) * m + k] * x[static_cast<std::size_t>(k)];
        }
        x[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i) * m + i];
    }
    for (int i = m - 1; i >= 0; --i) {
        double v = x[static_cast<std::size_t>(i)];
        for (int k = i + 1; k < m; ++k) {
            v -= l[static_cast<std::size_t>(k) * m + i] * x[static_cast<std::size_t>(k)];
        }
        x[static_cast<std::size_t>(i)] = v / l[static_cast<std::size_t>(i) * m + i];
    }
}

}  // namespace

// Assembles the normal equations of the augmented regression from
// lag-product sums, O(N*p) time and O(N) scratch, then solves the
// (p+2)x(p+2) system. Avoids materializing the design matrix.
AdfFit adf_fit(std::span<const double> series, int p) {
    const std::size_t nn = series.size();
    const std::ptrdiff_t N = static_cast<std::ptrdiff_t>(nn);
    const int m = p + 2;
    const std::ptrdiff_t n = N - 1 - p;
    if (n < m + 3) {
        throw AnalysisError("adf: series too short for lag order p=" + std::to_string(p));
    }

    // center the level so the statistic is exactly invariant under shifts
    double mean = 0.0;
    for (const double v : series) {
        mean += v;
    }
    mean /= static_cast<double>(nn);
    std::vector<double> xc(nn);
    double ssq = 0.0;
    for (std::size_t i = 0; i < nn; ++i) {
        xc[i] = series[i] - mean;
        ssq += xc[i] * xc[i];
    }
    if (!(ssq > 0.0)) {
        throw AnalysisError("adf: zero variance series");
    }

    std::vector<double> d(nn, 0.0);  // d[i] = x_i - x_{i-1}, i >= 1
    for (std::size_t i = 1; i < nn; ++i) {
        d[i] = xc[i] - xc[i - 1];
    }

    const std::ptrdiff_t t_lo = p + 1, t_hi = N - 1;
    std::vector<double> gram(static_cast<std::size_t>(m) * m, 0.0);
    std::vector<double> rhs(static_cast<std::size_t>(m), 0.0);
    double yy = 0.0;
    auto G = [&](int i, int j) -> double& { return gram[static_cast<std::size_t>(i) * m + j]; };

    std::vector<double> pref(nn, 0.0);

    // const and level columns
    {
        double acc = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            acc += xc[i];
            pref[i] = acc;
        }
        G(0, 1) = window(pref, p, N - 2);
        acc = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            acc += xc[i] * xc[i];
            pref[i] = acc;
        }
        G(1, 1) = window(pref, p, N - 2);
        acc = 0.0;
        for (std::size_t i = 0; i + 1 < nn; ++i) {
            acc += xc[i] * d[i + 1];
            pref[i] = acc;
        }
        rhs[1] = window(pref, p, N - 2);
        acc = 0.0;
        for (std::size_t i = 0; i < nn; ++i) {
            acc += d[i];
            pref[i] = acc;
        }
        G(0, 0) = static_cast<double>(n);
        rhs[0] = window(pref, t_lo, t_hi);
        for (int j = 1; j <= p; ++j) {
            G(0, 1 + j) = window(pref, t_lo - j, t_hi - j);
        }
    }

    // xc x lagged-difference cross sums, lag h = j-1
    for (int h = 0; h <= p - 1; ++h) {
        double acc = 0.0;
        for (std::ptrdiff_t i = h + 1; i < N; ++i) {
            acc += xc[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i - h)];
            pref[static_cast<std::size_t>(i)] = acc;
        }
        // pref valid from index h+1 only; the window [p, N-2] starts at
        // p >= h+1, so the subtraction below never reads a stale slot
        const int j = h + 1;
        G(1, 1 + j) = pref[static_cast<std::size_t>(N - 2)] -
                      (p - 1 >= h + 1 ? pref[static_cast<std::size_t>(p - 1)] : 0.0);
    }

    // difference lag products, lag h = 0..p
    for (int h = 0; h <= p; ++h) {
        double acc = 0.0;
        for (std::ptrdiff_t i = h + 1; i < N; ++i) {
            acc += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i - h)];
            pref[static_cast<std::size_t>(i)] = acc;
        }
        auto win = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
            return pref[static_cast<std::size_t>(b)] -
                   (a - 1 >= h + 1 ? pref[static_cast<std::size_t>(a - 1)] : 0.0);
        };
        if (h == 0) {
            yy = win(t_lo, t_hi);
        }
        if (h >= 1 && h <= p) {
            rhs[static_cast<std::size_t>(1 + h)] = win(t_lo, t_hi);
        }
        for (int i = 1; i <= p; ++i) {
            const int j = i + h;
            if (j > p) {
                break;
            }
            G(1 + i, 1 + j) = win(t_lo - i, t_hi - i);
        }
    }

    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < i; ++j) {
            G(i, j) = G(j, i);
        }
    }

    std::vector<double> chol(gram);
    if (!cholesky(chol, m)) {
        throw AnalysisError("adf: degenerate regression (collinear lags)");
    }
    std::vector<double> beta(rhs);
    chol_solve(chol, m, beta);

    double bg = 0.0;
    for (int i = 0; i < m; ++i) {
        bg += beta[static_cast<std::size_t>(i)] * rhs[static_cast<std::size_t>(i)];
    }
    const double rss = yy - bg;
    const double s2 = rss / static_cast<double>(n - m);

    std::vector<double> e1(static_cast<std::size_t>(m), 0.0);
    e1[1] = 1.0;
    chol_solve(chol, m, e1);  // column 1 of the Gram inverse
    const double se = std::sqrt(s2 * e1[1]);

    double max_res = 0.0;
    for (int i = 0; i < m; ++i) {
        double gi = 0.0;
        for (int j = 0; j < m; ++j) {
            gi += G(i, j) * beta[static_cast<std::size_t>(j)];
        }
        max_res = std::max(max_res, std::fabs(rhs[static_cast<std::size_t>(i)] - gi));
    }

    AdfFit fit;
    fit.beta = beta[1];
    fit.se = se;
    fit.statistic = beta[1] / se;
    fit.n_obs = static_cast<std::size_t>(n);
    fit.lags = p;
    fit.max_xte_over_n = max_res / static_cast<double>(n);
    return fit;
}

}  // namespace detail

AdfResult adf_test(std::span<const double> series, std::optional<int> max_lag,
                   double significance) {
    if (max_lag && *max_lag < 0) {
        throw std::invalid_argument("adf: max_lag must be >= 0");
    }
    if (series.size() < 20) {
        throw AnalysisError("adf: series too short (need at least 20 samples)");
    }
    int p = schwert_lag(series.size());
    if (max_lag && *max_lag < p) {
        p = *max_lag;
    }

    const auto fit = detail::adf_fit(series, p);
    const double cv = adf_critical_value(fit.n_obs, significance);

    AdfResult out;
    out.statistic = fit.statistic;
    out.critical_value = cv;
    out.significance = significance;
    out.lags = p;
    out.reject_unit_root = fit.statistic < cv;
    return out;
}

}  // namespace evtail
