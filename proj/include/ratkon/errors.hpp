#pragma once

#include <stdexcept>
#include <string>

namespace ratkon {

/// Base class of every error thrown by the library.
struct error : std::runtime_error {
  explicit error(const std::string& what) : std::runtime_error(what) {}
};

/// Augmentation of a quantity that must be invertible over Q is zero.
struct zero_augmentation_error : error {
  using error::error;
};

/// The augmentation of a square matrix is singular over Q.
struct singular_augmentation_error : error {
  using error::error;
};

/// Two ring elements declared over free groups of different rank were combined.
struct mismatched_generators_error : error {
  using error::error;
};

/// A truncation bound was violated or an operation needs a larger cap.
struct cap_exceeded_error : error {
  using error::error;
};

/// chi_h requires the h-degree-0 part of its argument to be the identity.
struct non_unipotent_error : error {
  using error::error;
};

/// exp_union was given a sum with a nonzero empty-diagram term.
struct constant_term_error : error {
  using error::error;
};

/// The strut part of a sum is not Hermitian.
struct non_hermitian_error : error {
  using error::error;
};

/// A sum required to be substantial has a forbidden strut.
struct not_substantial_error : error {
  using error::error;
};

/// A sum is not of Gaussian shape with respect to the requested colors.
struct non_integrable_error : error {
  using error::error;
};

/// A pairing was asked for with mismatched leg counts.
struct wrong_leg_count_error : error {
  using error::error;
};

/// Gaussian integration of a term with an odd number of legs of one color.
struct odd_leg_count_error : error {
  using error::error;
};

/// Text input could not be parsed; carries a byte offset into the input.
struct parse_error : error {
  std::size_t where;
  parse_error(const std::string& what, std::size_t pos)
      : error(what + " (at offset " + std::to_string(pos) + ")"), where(pos) {}
};

}  // namespace ratkon
