#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nuspec {

enum class ErrorKind {
  critical_point,
  too_few_times,
  no_hyperbolic_times,
  no_such_power,
  branch_ambiguity,
  not_covered,
  not_found,
  search_diverged,
  no_hyperbolic_frame,
  unknown_reference,
  no_return,
};

std::string_view to_string(ErrorKind kind);

class DynamicsError : public std::runtime_error {
 public:
  DynamicsError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace nuspec
