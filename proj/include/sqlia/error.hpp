#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace sqlia {

// Base of every error raised by the engine.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidEncoding : public Error {
public:
    explicit InvalidEncoding(std::size_t offset)
        : Error("invalid UTF-8 at byte " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

class EmptyPattern : public Error {
public:
    EmptyPattern() : Error("pattern is empty after normalization") {}
};

class ZeroLengthPattern : public Error {
public:
    ZeroLengthPattern() : Error("pattern length must be positive") {}
};

class IoFailure : public Error {
public:
    using Error::Error;
};

class PreconditionViolation : public Error {
public:
    using Error::Error;
};

// Parse errors in the pattern file and alarm journal carry a 1-based line number.
class LineError : public Error {
public:
    LineError(std::string kind, std::size_t line, const std::string& detail)
        : Error(kind + " at line " + std::to_string(line) + (detail.empty() ? "" : ": " + detail)),
          line_(line) {}
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

class MalformedLine : public LineError {
public:
    MalformedLine(std::size_t line, const std::string& detail)
        : LineError("malformed line", line, detail) {}
};

class DuplicateText : public LineError {
public:
    explicit DuplicateText(std::size_t line) : LineError("duplicate pattern text", line, "") {}
};

class NonMonotonicId : public LineError {
public:
    explicit NonMonotonicId(std::size_t line) : LineError("non-monotonic id", line, "") {}
};

class UnknownAlarm : public Error {
public:
    explicit UnknownAlarm(std::uint64_t id) : Error("unknown alarm " + std::to_string(id)) {}
};

class AlreadyDecided : public Error {
public:
    explicit AlreadyDecided(std::uint64_t id) : Error("alarm " + std::to_string(id) + " already decided") {}
};

}  // namespace sqlia
