#include "evtail/decluster.hpp"

#include <stdexcept>
#include <string>

#include "evtail/errors.hpp"

namespace evtail {

DeclusterConfig::DeclusterConfig(double u, int r) : u_(u), r_(r) {
    if (r < 1) {
        throw std::invalid_argument("decluster: run gap r must be >= 1");
    }
}

ClusterMinima decluster(std::span<const double> samples, const DeclusterConfig& config) {
    const double u = config.u();
    const int r = config.r();

    ClusterMinima out;
    out.source_count = samples.size();

    bool open = false;
    int run = 0;                 // consecutive samples >= u since last below-u
    double cur_min = 0.0;
    std::size_t first = 0, last = 0;

    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = samples[i];
        if (x < u) {
            if (!open) {
                open = true;
                first = i;
                cur_min = x;
            } else if (x < cur_min) {
                cur_min = x;
            }
            last = i;
            run = 0;
        } else if (open) {
            if (++run == r) {
                out.minima.push_back(cur_min);
                out.spans.push_back({first, last});
                open = false;
                run = 0;
            }
        }
    }
    if (open) {
        out.minima.push_back(cur_min);
        out.spans.push_back({first, last});
    }

    if (out.minima.empty()) {
        throw AnalysisError("empty tail: no sample below threshold " + std::to_string(u));
    }
    return out;
}

}  // namespace evtail
