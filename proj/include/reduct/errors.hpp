#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reduct {

// Raised by the text-format parsers. `pos` is a zero-based character offset
// into the input that was being parsed.
struct ParseError : std::runtime_error {
  std::size_t pos;
  ParseError(std::string msg, std::size_t at)
      : std::runtime_error(std::move(msg) + " (at offset " + std::to_string(at) + ")"),
        pos(at) {}
};

// Raised when evaluation cannot proceed: unbound variable, missing atom,
// arithmetic overflow.
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when a brute-force enumeration would exceed its configured cap.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised on structurally invalid inputs to encoders / builders (bad atom
// labels, node caps, inconsistent length profiles, malformed circuits).
struct StructureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace reduct
