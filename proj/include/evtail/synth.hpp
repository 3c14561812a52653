#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "evtail/gpd.hpp"
#include "evtail/trace.hpp"

namespace evtail {

// One segment of a synthetic trace. The marginal is a spliced law:
// P(X < tail_u) = tail_prob exactly, with tail_u - X | X < tail_u
// following GPD(tail_sigma, tail_xi) and X | X >= tail_u a Gaussian
// (bulk_mean, bulk_sd) truncated to [tail_u, inf). Serial dependence
// comes from a latent AR(1) Gaussian copula with coefficient ar_coeff.
struct SegmentSpec {
    std::string label;
    std::size_t n;
    double bulk_mean;
    double bulk_sd;
    double tail_u;
    double tail_sigma;
    double tail_xi;
    double tail_prob;   // in (0, 0.5)
    double ar_coeff;    // in [0, 1)
};

// Deterministic generation: mt19937_64 streams seeded per segment via
// splitmix64(seed + (index+1)*golden), uniforms mapped through the
// normal quantile. Timestamps advance by 2 ms from 0 across segments.
// Throws ParseError for invalid specs (tail_prob outside (0, 0.5),
// tail_u at or above bulk_mean, bad sd/ar coefficient, empty segments).
PowerTrace generate(std::span<const SegmentSpec> specs, std::uint64_t seed);

// Reads segment specs from a JSON document of the shape
// {"segments": [{"label": ..., "n": ..., ...}]}; ParseError on any
// missing or ill-typed field.
std::vector<SegmentSpec> parse_segment_specs(const std::string& json_text);

std::string serialize_segment_specs(std::span<const SegmentSpec> specs);

}  // namespace evtail
