#pragma once

#include <stdexcept>
#include <string>

namespace creplay {

// Invalid world or domain-type invariant violation.
struct MapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Text-format errors carry the offending 1-based line/column.
struct ParseError : std::runtime_error {
    int line;
    int col;
    ParseError(const std::string& msg, int line_, int col_)
        : std::runtime_error(msg + " (line " + std::to_string(line_) +
                             ", col " + std::to_string(col_) + ")"),
          line(line_), col(col_) {}
};

struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct MissingArtifactError : std::runtime_error {
    std::string path;
    explicit MissingArtifactError(const std::string& p)
        : std::runtime_error("missing artifact: " + p), path(p) {}
};

struct UndefinedMetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numerical evaluation lost all significance; the caller must not use a value.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace creplay
