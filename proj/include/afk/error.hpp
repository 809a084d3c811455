#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace afk {

enum class ErrorKind {
  shape_mismatch,
  ambient_rank_mismatch,
  syntax,
  validation,
  depth_overflow,
  horizon_overflow,
  wrong_direction,
  mixed_towers,
  index_out_of_range,
  level_mismatch,
  arity_mismatch,
  not_a_projection,
  k_instability,
  obstruction_finite,
  unrealizable_class,
  invalid_argument,
};

std::string_view to_string(ErrorKind kind);

/// Every recoverable failure in the library is reported with this type.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace afk
