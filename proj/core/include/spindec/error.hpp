#pragma once

#include <stdexcept>
#include <string>

namespace spindec {

// Thrown for every violated precondition or invariant.  The message always
// names the offending quantity so callers (and the CLI) can surface it.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spindec
