#pragma once

#include <stdexcept>
#include <string>

namespace rca {

/// Base of every exception raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rca
