#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace recgraph {

struct NotFoundError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LoadTimeout : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct AdvanceStuck : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The session URL matches neither the watch nor the shorts template.
struct DriverDesync : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
          byte_offset(offset) {}
    std::size_t byte_offset;
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ServiceUnavailable : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProtocolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace recgraph
