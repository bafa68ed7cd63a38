#pragma once

#include <stdexcept>
#include <string>

namespace fracmag {

struct domain_error : std::domain_error {
  using std::domain_error::domain_error;
};

// x == y requested from a kernel that is singular on the diagonal.
struct singular_pair_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct out_of_box_error : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct unsupported_kind_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct policy_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct grid_mismatch_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct calibration_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fracmag
