#include "evtail/synth.hpp"

#include <cmath>
#include <random>

#include <json.hpp>

#include "evtail/errors.hpp"
#include "evtail/math/special.hpp"

namespace evtail {

namespace {

void validate_spec(const SegmentSpec& spec, std::size_t index) {
    const std::string where = "segment " + std::to_string(index) + " (" + spec.label + "): ";
    auto reject = [&](const std::string& what) { throw ParseError(where + what); };

    if (spec.label.empty()) {
        reject("empty label");
    }
    for (const char ch : spec.label) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        if (!ok) {
            reject("label must use letters, digits, '_' or '-'");
        }
    }
    if (spec.n == 0) {
        reject("segment length must be positive");
    }
    if (!std::isfinite(spec.bulk_mean) || !(spec.bulk_sd > 0.0)) {
        reject("bulk parameters must be finite with sd > 0");
    }
    if (!(spec.tail_prob > 0.0 && spec.tail_prob < 0.5)) {
        reject("tail_prob must lie in (0, 0.5)");
    }
    if (!(spec.tail_u < spec.bulk_mean)) {
        reject("tail_u must lie below bulk_mean (tail mass conflicts with the bulk median)");
    }
    if (!(spec.tail_sigma > 0.0) || !std::isfinite(spec.tail_xi)) {
        reject("tail scale must be positive and shape finite");
    }
    if (!(spec.ar_coeff >= 0.0 && spec.ar_coeff < 1.0)) {
        reject("ar_coeff must lie in [0, 1)");
    }
}

// Uniform in (0, 1): 53-bit mantissa offset by half an ulp so 0 and 1
// are unreachable.
inline double unit_open(std::mt19937_64& eng) {
    return (static_cast<double>(eng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

PowerTrace generate(std::span<const SegmentSpec> specs, std::uint64_t seed) {
    if (specs.empty()) {
        throw ParseError("generator: no segments");
    }
    std::size_t total = 0;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        validate_spec(specs[i], i);
        total += specs[i].n;
    }

    PowerTrace trace;
    trace.t_ms.reserve(total);
    trace.power_dbm.reserve(total);
    trace.group_id.reserve(total);

    std::int64_t t = 0;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        const SegmentSpec& spec = specs[si];

        std::uint32_t id = UINT32_MAX;
        for (std::size_t k = 0; k < trace.labels.size(); ++k) {
            if (trace.labels[k] == spec.label) {
                id = static_cast<std::uint32_t>(k);
            }
        }
        if (id == UINT32_MAX) {
            id = static_cast<std::uint32_t>(trace.labels.size());
            trace.labels.push_back(spec.label);
        }

        std::mt19937_64 eng(math::splitmix64(seed + (static_cast<std::uint64_t>(si) + 1) *
                                                        0x9E3779B97F4A7C15ULL));
        const GpdParams tail(spec.tail_sigma, spec.tail_xi);
        const double phi = spec.ar_coeff;
        const double innov = std::sqrt(1.0 - phi * phi);
        const double a = (spec.tail_u - spec.bulk_mean) / spec.bulk_sd;
        const double phi_a = math::norm_cdf(a);

        double z = 0.0;
        for (std::size_t i = 0; i < spec.n; ++i) {
            const double eps = math::norm_quantile(unit_open(eng));
            z = i == 0 ? eps : phi * z + innov * eps;
            const double p = math::norm_cdf(z);

            double x;
            if (p < spec.tail_prob) {
                // conditional law of tail_u - X given X < tail_u is the GPD
                x = spec.tail_u - gpd_quantile(1.0 - p / spec.tail_prob, tail);
            } else {
                const double q = (p - spec.tail_prob) / (1.0 - spec.tail_prob);
                const double pn = phi_a + q * (1.0 - phi_a);
                x = spec.bulk_mean + spec.bulk_sd * math::norm_quantile(pn);
            }
            trace.t_ms.push_back(t);
            trace.power_dbm.push_back(x);
            trace.group_id.push_back(id);
            t += 2;
        }
    }
    return trace;
}

std::vector<SegmentSpec> parse_segment_specs(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("generator spec: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("segments") || !doc["segments"].is_array() ||
        doc["segments"].empty()) {
        throw ParseError("generator spec: expected an object with a non-empty \"segments\" array");
    }

    std::vector<SegmentSpec> specs;
    for (const auto& seg : doc["segments"]) {
        auto need = [&](const char* key) -> const nlohmann::json& {
            if (!seg.is_object() || !seg.contains(key)) {
                throw ParseError(std::string("generator spec: segment missing \"") + key + "\"");
            }
            return seg[key];
        };
        auto num = [&](const char* key) {
            const auto& v = need(key);
            if (!v.is_number()) {
                throw ParseError(std::string("generator spec: \"") + key + "\" must be a number");
            }
            return v.get<double>();
        };
        SegmentSpec s;
        const auto& label = need("label");
        if (!label.is_string()) {
            throw ParseError("generator spec: \"label\" must be a string");
        }
        s.label = label.get<std::string>();
        const auto& n = need("n");
        if (!n.is_number_unsigned() || n.get<std::uint64_t>() == 0) {
            throw ParseError("generator spec: \"n\" must be a positive integer");
        }
        s.n = n.get<std::size_t>();
        s.bulk_mean = num("bulk_mean");
        s.bulk_sd = num("bulk_sd");
        s.tail_u = num("tail_u");
        s.tail_sigma = num("tail_sigma");
        s.tail_xi = num("tail_xi");
        s.tail_prob = num("tail_prob");
        s.ar_coeff = num("ar_coeff");
        specs.push_back(std::move(s));
    }
    return specs;
}

std::string serialize_segment_specs(std::span<const SegmentSpec> specs) {
    nlohmann::json doc;
    doc["segments"] = nlohmann::json::array();
    for (const auto& s : specs) {
        doc["segments"].push_back({{"label", s.label},
                                   {"n", s.n},
                                   {"bulk_mean", s.bulk_mean},
                                   {"bulk_sd", s.bulk_sd},
                                   {"tail_u", s.tail_u},
                                   {"tail_sigma", s.tail_sigma},
                                   {"tail_xi", s.tail_xi},
                                   {"tail_prob", s.tail_prob},
                                   {"ar_coeff", s.ar_coeff}});
    }
    return doc.dump(2) + "\n";
}

}  // namespace evtail
