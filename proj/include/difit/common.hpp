#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace difit {

using Sample = std::vector<double>;
using ParamVector = std::vector<double>;

/// Thrown when a parameter or argument lies outside its valid domain.
/// The message names the offending field.
class domain_error : public std::invalid_argument {
 public:
  explicit domain_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// Thrown when an iterative procedure fails to converge. Carries the last
/// iterate so callers can inspect or restart.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& msg, std::vector<double> last)
      : std::runtime_error(msg), last_iterate(std::move(last)) {}
  std::vector<double> last_iterate;
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw domain_error(msg);
}

}  // namespace difit
