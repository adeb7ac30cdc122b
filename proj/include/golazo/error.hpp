#pragma once

#include <stdexcept>
#include <string>

namespace golazo {

enum class Errc {
  invalid_argument,
  invalid_dimension,
  invalid_step,
  numeric_failure,
  singular,
  not_positive_definite,
  divergence,
  insufficient_exceedances,
  data,
  config,
};

const char* to_string(Errc code) noexcept;

/// Library error; `code()` lets callers (the CLI in particular) map failures
/// onto exit statuses without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace golazo
