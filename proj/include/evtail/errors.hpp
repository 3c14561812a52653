#pragma once

#include <stdexcept>
#include <string>

namespace evtail {

// Malformed or inconsistent input data (trace files, generator specs).
// The CLI maps this to exit code 2.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

// Well-formed input on which the requested analysis is not feasible
// (empty tail, degenerate sample, no threshold passing the linearity
// screen). The CLI maps this to exit code 3.
class AnalysisError : public std::runtime_error {
public:
    explicit AnalysisError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace evtail
