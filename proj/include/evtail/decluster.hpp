#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace evtail {

// Runs-declustering parameters for the lower tail. r is the number of
// consecutive samples at or above u that terminates a cluster; r >= 1 is
// enforced here so a zero gap cannot be expressed.
class DeclusterConfig {
public:
    DeclusterConfig(double u, int r);
    double u() const { return u_; }
    int r() const { return r_; }

private:
    double u_;
    int r_;
};

// Inclusive index pair covering one cluster, from its first below-u
// sample to its last.
struct ClusterSpan {
    std::size_t first;
    std::size_t last;
};

struct ClusterMinima {
    std::vector<double> minima;       // one per cluster, each < u
    std::vector<ClusterSpan> spans;   // aligned with minima
    std::size_t source_count = 0;     // length of the declustered input
};

// Lower-tail runs declustering. A cluster opens at a sample below u and
// closes at its last below-u sample once r consecutive samples >= u have
// been seen; the end of the input closes an open cluster. Throws
// AnalysisError if no sample lies below u.
ClusterMinima decluster(std::span<const double> samples, const DeclusterConfig& config);

}  // namespace evtail
