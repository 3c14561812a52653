// Monte Carlo tabulation of Dickey-Fuller critical values for the
// constant-only (drift, no trend) test equation.
//
// For each sample size N this simulates pure Gaussian random walks,
// regresses the first difference on an intercept and the lagged level,
// and records the t statistic of the lagged-level coefficient. Left-tail
// quantiles of that distribution are the critical values embedded in
// src/adf_critical_values.cpp. The asymptotic row is simulated at N=2000,
// where the finite-sample drift is below the Monte Carlo noise floor.
//
// Usage: df_table_oracle [reps] [seed]
// Output: a human-readable table and a C++ initializer ready to freeze.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <vector>

namespace {

class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : eng_(seed) {}

    // Box-Muller with a cached spare; only used inside this oracle.
    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1 = 0.0;
        do {
            u1 = unit_(eng_);
        } while (u1 <= 0.0);
        const double u2 = unit_(eng_);
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double two_pi = 6.283185307179586476925286766559;
        spare_ = mag * std::sin(two_pi * u2);
        has_spare_ = true;
        return mag * std::cos(two_pi * u2);
    }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unit_{0.0, 1.0};
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// t statistic of beta in  dx_t = alpha + beta * x_{t-1} + e_t  for a
// freshly simulated length-N random walk starting at x_1 = e_1.
double walk_t_stat(int n_walk, NormalSource& normal) {
    double x_prev = normal();
    const int n = n_walk - 1;  // regression observations
    double sw = 0.0, sww = 0.0, sy = 0.0, syy = 0.0, swy = 0.0;
    for (int t = 1; t < n_walk; ++t) {
        const double e = normal();  // dx_t for a pure walk
        sw += x_prev;
        sww += x_prev * x_prev;
        sy += e;
        syy += e * e;
        swy += x_prev * e;
        x_prev += e;
    }
    const double mw = sw / n;
    const double my = sy / n;
    const double swwc = sww - n * mw * mw;
    const double swyc = swy - n * mw * my;
    const double syyc = syy - n * my * my;
    const double beta = swyc / swwc;
    const double rss = syyc - beta * swyc;
    const double s2 = rss / (n - 2);
    return beta / std::sqrt(s2 / swwc);
}

double left_quantile(std::vector<double>& v, double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size()))) - 1;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end());
    return v[k];
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t reps = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1000000ULL;
    const std::uint64_t seed = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 0xD1C8EF001ULL;

    const int sizes[6] = {25, 50, 100, 250, 500, 2000};
    const double probs[3] = {0.01, 0.05, 0.10};
    double table[6][3] = {};

    std::vector<double> stats(reps);
    for (int row = 0; row < 6; ++row) {
        NormalSource normal(seed + static_cast<std::uint64_t>(row) * 0x9E3779B97F4A7C15ULL);
        for (std::size_t r = 0; r < reps; ++r) {
            stats[r] = walk_t_stat(sizes[row], normal);
        }
        for (int c = 0; c < 3; ++c) {
            std::vector<double> copy(stats);
            table[row][c] = left_quantile(copy, probs[c]);
        }
        std::fprintf(stderr, "row N=%d done\n", sizes[row]);
    }

    std::printf("# reps=%zu seed=%llu\n", reps, static_cast<unsigned long long>(seed));
    std::printf("%8s %12s %12s %12s\n", "N", "1%", "5%", "10%");
    for (int row = 0; row < 6; ++row) {
        std::printf("%8d %12.5f %12.5f %12.5f\n", sizes[row], table[row][0], table[row][1], table[row][2]);
    }

    std::printf("\n// frozen table (rows N=25,50,100,250,500,asymptotic; cols 1%%,5%%,10%%)\n");
    std::printf("constexpr double kCritTable[6][3] = {\n");
    for (int row = 0; row < 6; ++row) {
        std::printf("    {%.5f, %.5f, %.5f},%s\n", table[row][0], table[row][1], table[row][2],
                    row == 5 ? "  // simulated at N=2000" : "");
    }
    std::printf("};\n");
    return 0;
}
