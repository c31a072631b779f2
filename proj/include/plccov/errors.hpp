#pragma once

#include <stdexcept>
#include <string>

#include "plccov/source_loc.hpp"

namespace plccov {

// Syntax or name-resolution error, carries the offending position.
class ParseError : public std::runtime_error {
  public:
    ParseError(SourceLoc loc, const std::string& msg)
        : std::runtime_error(loc.valid() ? loc.str() + ": " + msg : msg), loc_(std::move(loc)) {}

    const SourceLoc& loc() const { return loc_; }

  private:
    SourceLoc loc_;
};

// Inconsistent artifacts: fingerprint mismatch, malformed database/trace/suite
// files, instrumenting an already-instrumented project.
class ConsistencyError : public std::runtime_error {
  public:
    explicit ConsistencyError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fault raised by the interpreter (division by zero, out-of-range trace id...).
class RuntimeFault : public std::runtime_error {
  public:
    explicit RuntimeFault(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace plccov
