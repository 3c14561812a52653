#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evtail {

// One row of a trace: timestamp, received power, external-factor label.
struct PowerSample {
    std::int64_t t_ms;
    double power_dbm;
    std::string group;
};

// Column-oriented trace. Group labels are interned: group_id[i] indexes
// labels, which holds distinct labels in order of first appearance.
// Invariants: t_ms strictly increasing, power finite, never empty once
// parsed or generated.
struct PowerTrace {
    std::vector<std::int64_t> t_ms;
    std::vector<double> power_dbm;
    std::vector<std::uint32_t> group_id;
    std::vector<std::string> labels;
    std::map<std::string, std::string> meta;

    std::size_t size() const { return power_dbm.size(); }
    bool empty() const { return power_dbm.empty(); }
    std::span<const double> powers() const { return power_dbm; }
    PowerSample sample(std::size_t i) const {
        return {t_ms[i], power_dbm[i], labels[group_id[i]]};
    }
};

// Half-open sample index range [begin, end).
struct IndexRange {
    std::size_t begin;
    std::size_t end;
    std::size_t count() const { return end - begin; }
};

// All maximal contiguous runs of one label, in trace order.
struct GroupRuns {
    std::string label;
    std::uint32_t id;
    std::vector<IndexRange> ranges;
    std::size_t total() const {
        std::size_t n = 0;
        for (const auto& r : ranges) n += r.count();
        return n;
    }
};

// Groups ordered by first appearance; covers the trace exactly.
struct GroupSegmentation {
    std::vector<GroupRuns> groups;
    std::size_t count() const { return groups.size(); }
};

// Parses "t_ms,power_dbm,group" CSV text (header required, UTF-8,
// optional leading BOM, LF or CRLF). Lines starting with '#' before the
// header populate meta as "key=value" pairs. Throws ParseError with a
// 1-based line number for malformed rows, duplicate or non-monotone
// timestamps, and for a header-only ("empty trace") input.
PowerTrace parse_trace(std::string_view text);

// Reads and parses a trace file; ParseError on unreadable paths.
PowerTrace load_trace_file(const std::string& path);

// Inverse of parse_trace up to float formatting; power serialized with
// enough digits to round-trip exactly.
std::string serialize_trace(const PowerTrace& trace);

GroupSegmentation segment_by_group(const PowerTrace& trace);

// Pools the group's samples across all its runs, preserving trace order.
std::vector<double> group_powers(const PowerTrace& trace, const GroupRuns& runs);

}  // namespace evtail
