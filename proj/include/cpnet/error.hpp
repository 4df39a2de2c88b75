#pragma once

#include <stdexcept>
#include <string>

namespace cpnet {

enum class ErrorKind {
    InvalidArgument,
    OffGrid,
    ShapeMismatch,
    Numeric,
    NoBracket,
    Unsupported,
    Io,
};

/// Exception carried by every failing library call. The C API maps `kind`
/// onto its status codes.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
    if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace cpnet
