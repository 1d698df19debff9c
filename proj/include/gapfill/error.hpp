#pragma once

#include <stdexcept>
#include <string>

namespace gapfill {

/// Bad configuration (CLI flags, impossible parameter combinations). CLI exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad or insufficient input data (malformed CSV, short series, empty input). CLI exit code 2.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Malformed text input; carries row/column context in the message.
class ParseError : public DataError {
public:
    explicit ParseError(const std::string& msg) : DataError(msg) {}
};

/// A pipeline stage could not complete (e.g. every transform family failed).
class PipelineError : public std::runtime_error {
public:
    explicit PipelineError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace gapfill
