#pragma once

#include <stdexcept>
#include <string>
#include <iostream>

namespace ilscape {

// Failure categories map 1:1 onto CLI exit codes.
enum class ErrorKind {
    Input = 1,        // bad file, bad value, malformed config
    Incomparable = 2, // descriptors with mismatched layout or normalization
    Internal = 3,     // bug or broken invariant
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_input(const std::string& msg) {
    throw Error(ErrorKind::Input, msg);
}

[[noreturn]] inline void fail_incomparable(const std::string& msg) {
    throw Error(ErrorKind::Incomparable, msg);
}

[[noreturn]] inline void fail_internal(const std::string& msg) {
    throw Error(ErrorKind::Internal, msg);
}

// Non-fatal diagnostics go to stderr so stdout stays machine-readable.
inline void warn(const std::string& msg) {
    std::cerr << "warning: " << msg << "\n";
}

} // namespace ilscape
