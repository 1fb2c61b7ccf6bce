#pragma once

#include <stdexcept>
#include <string>

namespace greenrec {

// Imaginary part of a half-plane value dropped to the denormal floor.
// Raised instead of clamping so boundary blow-ups stay visible.
struct boundary_underflow : std::runtime_error {
  explicit boundary_underflow(const std::string& what) : std::runtime_error(what) {}
};

// Rounding produced a singular/indefinite matrix or an inconsistent cross-check.
struct numerical_degeneracy : std::runtime_error {
  explicit numerical_degeneracy(const std::string& what) : std::runtime_error(what) {}
};

// Spectral parameter outside the window where a closed-form point exists in H.
struct out_of_band_error : std::domain_error {
  explicit out_of_band_error(const std::string& what) : std::domain_error(what) {}
};

// 0/0 in a normalized contraction functional (all arguments at the fixed point).
struct indeterminate_value : std::domain_error {
  explicit indeterminate_value(const std::string& what) : std::domain_error(what) {}
};

// Desk-scale size cap hit (tree depth, box side, dense eigensolver dimension).
struct size_cap_exceeded : std::length_error {
  explicit size_cap_exceeded(const std::string& what) : std::length_error(what) {}
};

}  // namespace greenrec
