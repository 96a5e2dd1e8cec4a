#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tgvc {

/// Caller-supplied data violates a documented precondition.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structured text input could not be parsed; message carries position info.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bitstream magic or version mismatch, or structural garbage.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bitstream ended before a complete parse.
class TruncationError : public std::runtime_error {
public:
    TruncationError(const std::string& msg, std::size_t byte_offset)
        : std::runtime_error(msg + " (at byte " + std::to_string(byte_offset) + ")"),
          offset_(byte_offset) {}
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Bitstream parsed but decoded values are out of range.
class CorruptStream : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Value does not fit the fixed-width wire field.
class EncodeRangeError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A clip span exceeds the maximum clip length.
class SpanTooLong : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Trajectory has fewer than two visible points.
class DegenerateTrajectory : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tgvc
