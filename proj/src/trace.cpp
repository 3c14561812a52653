#include "evtail/trace.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "evtail/errors.hpp"

namespace evtail {

namespace {

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw ParseError("line " + std::to_string(line_no) + ": " + what);
}

bool valid_label(std::string_view s) {
    if (s.empty()) {
        return false;
    }
    for (const char ch : s) {
        const bool ok = (ch >= 'a' && ch <= 'z') || (ch >= 'A' && ch <= 'Z') ||
                        (ch >= '0' && ch <= '9') || ch == '_' || ch == '-';
        if (!ok) {
            return false;
        }
    }
    return true;
}

// Parses a non-negative integer timestamp; rejects signs, blanks, tails.
bool parse_t(std::string_view f, std::int64_t& out) {
    if (f.empty() || f[0] == '-' || f[0] == '+') {
        return false;
    }
    std::int64_t v = 0;
    for (const char ch : f) {
        if (ch < '0' || ch > '9') {
            return false;
        }
        if (v > (INT64_MAX - (ch - '0')) / 10) {
            return false;
        }
        v = v * 10 + (ch - '0');
    }
    out = v;
    return true;
}

bool parse_power(std::string_view f, double& out) {
    if (f.empty()) {
        return false;
    }
    char buf[64];
    if (f.size() >= sizeof(buf)) {
        return false;
    }
    std::memcpy(buf, f.data(), f.size());
    buf[f.size()] = '\0';
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(buf, &end);
    if (end != buf + f.size() || errno == ERANGE || !std::isfinite(v)) {
        return false;
    }
    out = v;
    return true;
}

}  // namespace

PowerTrace parse_trace(std::string_view text) {
    if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
        static_cast<unsigned char>(text[1]) == 0xBB &&
        static_cast<unsigned char>(text[2]) == 0xBF) {
        text.remove_prefix(3);
    }

    PowerTrace trace;
    std::uint32_t last_id = 0;  // labels arrive in runs; cache the previous hit
    bool saw_header = false;
    std::size_t line_no = 0;
    std::size_t pos = 0;

    while (pos <= text.size()) {
        if (pos == text.size()) {
            break;
        }
        std::size_t eol = text.find('\n', pos);
        const bool last = eol == std::string_view::npos;
        std::string_view line = text.substr(pos, last ? text.size() - pos : eol - pos);
        pos = last ? text.size() : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty() && pos == text.size()) {
            break;  // trailing blank from final newline
        }

        if (!saw_header) {
            if (!line.empty() && line[0] == '#') {
                std::string_view body = line.substr(1);
                while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
                const std::size_t eq = body.find('=');
                if (eq != std::string_view::npos) {
                    trace.meta.emplace(std::string(body.substr(0, eq)),
                                       std::string(body.substr(eq + 1)));
                }
                continue;
            }
            if (line != "t_ms,power_dbm,group") {
                fail(line_no, "expected header \"t_ms,power_dbm,group\"");
            }
            saw_header = true;
            continue;
        }

        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string_view::npos ? std::string_view::npos
                                                            : line.find(',', c1 + 1);
        if (c2 == std::string_view::npos || line.find(',', c2 + 1) != std::string_view::npos) {
            fail(line_no, "malformed row: expected 3 comma-separated fields");
        }
        const std::string_view ft = line.substr(0, c1);
        const std::string_view fp = line.substr(c1 + 1, c2 - c1 - 1);
        const std::string_view fg = line.substr(c2 + 1);

        std::int64_t t = 0;
        if (!parse_t(ft, t)) {
            fail(line_no, "malformed timestamp \"" + std::string(ft) + "\"");
        }
        double p = 0.0;
        if (!parse_power(fp, p)) {
            fail(line_no, "malformed power value \"" + std::string(fp) + "\"");
        }
        if (!valid_label(fg)) {
            fail(line_no, "malformed group label \"" + std::string(fg) + "\"");
        }

        if (!trace.t_ms.empty()) {
            if (t == trace.t_ms.back()) {
                fail(line_no, "duplicate timestamp " + std::to_string(t));
            }
            if (t < trace.t_ms.back()) {
                fail(line_no, "non-monotone timestamp " + std::to_string(t));
            }
        }

        std::uint32_t id = UINT32_MAX;
        if (last_id < trace.labels.size() && fg == trace.labels[last_id]) {
            id = last_id;
        } else {
            for (std::size_t k = 0; k < trace.labels.size(); ++k) {
                if (fg == trace.labels[k]) {
                    id = static_cast<std::uint32_t>(k);
                    break;
                }
            }
            if (id == UINT32_MAX) {
                id = static_cast<std::uint32_t>(trace.labels.size());
                trace.labels.emplace_back(fg);
            }
            last_id = id;
        }
        trace.t_ms.push_back(t);
        trace.power_dbm.push_back(p);
        trace.group_id.push_back(id);
    }

    if (!saw_header) {
        throw ParseError("empty input: missing header");
    }
    if (trace.empty()) {
        throw ParseError("empty trace: no data rows");
    }
    return trace;
}

PowerTrace load_trace_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ParseError("cannot open trace file: " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_trace(buf.str());
}

std::string serialize_trace(const PowerTrace& trace) {
    std::string out;
    out.reserve(32 * trace.size() + 64);
    for (const auto& [k, v] : trace.meta) {
        out += "# ";
        out += k;
        out += '=';
        out += v;
        out += '\n';
    }
    out += "t_ms,power_dbm,group\n";
    char buf[96];
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const int n = std::snprintf(buf, sizeof(buf), "%lld,%.17g,",
                                    static_cast<long long>(trace.t_ms[i]), trace.power_dbm[i]);
        out.append(buf, static_cast<std::size_t>(n));
        out += trace.labels[trace.group_id[i]];
        out += '\n';
    }
    return out;
}

GroupSegmentation segment_by_group(const PowerTrace& trace) {
    GroupSegmentation seg;
    std::vector<std::size_t> slot(trace.labels.size(), SIZE_MAX);
    for (std::size_t i = 0; i < trace.size();) {
        const std::uint32_t id = trace.group_id[i];
        std::size_t j = i + 1;
        while (j < trace.size() && trace.group_id[j] == id) {
            ++j;
        }
        if (slot[id] == SIZE_MAX) {
            slot[id] = seg.groups.size();
            seg.groups.push_back({trace.labels[id], id, {}});
        }
        seg.groups[slot[id]].ranges.push_back({i, j});
        i = j;
    }
    return seg;
}

std::vector<double> group_powers(const PowerTrace& trace, const GroupRuns& runs) {
    std::vector<double> out;
    out.reserve(runs.total());
    for (const auto& r : runs.ranges) {
        out.insert(out.end(), trace.power_dbm.begin() + static_cast<std::ptrdiff_t>(r.begin),
                   trace.power_dbm.begin() + static_cast<std::ptrdiff_t>(r.end));
    }
    return out;
}

}  // namespace evtail
