#ifndef UCPM_ERRORS_HPP
#define UCPM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace ucpm {

// Every failure mode the library reports. Grouped by how a batch driver
// should react: bad input, numerical trouble, or a violated precondition.
enum class errc {
  // input / shape problems
  shape_mismatch,
  weight_sum_invalid,
  bad_parameters,
  invalid_instance,
  unknown_name,
  // numerical problems
  numerical_failure,
  dimension_overflow,
  structure_residual,
  homomorphism_residual,
  // violated preconditions
  not_hermitian,
  not_commuting,
  not_cp,
  not_unital,
  sum_not_unital,
  not_full_algebra,
  not_dominated,
  not_in_commutant,
  not_in_interval,
  base_mismatch,
  barycenter_mismatch,
  not_orthogonal_measure,
  not_unitary,
  not_state,
  no_subalgebra_found,
};

enum class error_class { invalid_input, numerical, precondition };

constexpr error_class classify(errc code) {
  switch (code) {
    case errc::shape_mismatch:
    case errc::weight_sum_invalid:
    case errc::bad_parameters:
    case errc::invalid_instance:
    case errc::unknown_name:
      return error_class::invalid_input;
    case errc::numerical_failure:
    case errc::dimension_overflow:
    case errc::structure_residual:
    case errc::homomorphism_residual:
      return error_class::numerical;
    default:
      return error_class::precondition;
  }
}

const char* errc_name(errc code);

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& msg)
      : std::runtime_error(std::string(errc_name(code)) + ": " + msg),
        code_(code) {}

  errc code() const { return code_; }
  error_class category() const { return classify(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& msg) {
  throw Error(code, msg);
}

inline void require(bool cond, errc code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

}  // namespace ucpm

#endif
