#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sumtrans {

/// A kernel description violated its contract (junction mismatch,
/// non-concave piece, bad parameter).
struct invalid_kernel_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A field description violated its contract (negative weight, unsorted
/// support, overlapping pieces).
struct invalid_field_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A problem fails an admissibility precondition (solver gate, factor
/// conditions, window condition).
struct invalid_problem_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The node system is outside the regularity set; `index` is the first
/// interval whose maximum is -inf.
struct not_regular_error : std::runtime_error {
  std::size_t index;
  explicit not_regular_error(std::size_t j)
      : std::runtime_error("node system not in regularity set, interval " +
                           std::to_string(j)),
        index(j) {}
};

/// The analytic Jacobian formula does not apply at this point (wide
/// argmax plateau, kink in a kernel at a required offset).
struct not_applicable_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A finite-difference step could not be placed inside the regularity set.
struct fd_step_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace sumtrans
