#pragma once

#include <stdexcept>
#include <string>

namespace weil {

// Failure classes surfaced by the library. Each maps to a named
// precondition or hypothesis of one of the numerical procedures; callers
// (and the CLI) branch on the code, the message carries diagnostics.
enum class errc {
  invalid_argument,          // malformed input (dimensions, non-finite entries)
  y_not_in_image,            // least-squares residual above tolerance
  zero_operator,             // no nonzero singular value, open-mapping constant undefined
  not_surjective,            // operator fails the full-rank test
  perturbation_too_large,    // ||g|| / sigma_min(f) >= 1
  halving_violated,          // a contraction step failed the 1/2 bound
  not_exact,                 // im(f) != ker(g)
  image_mismatch,            // column of g outside im(f)
  not_embedding,             // sigma_min = 0, no lower bound r
  chain_condition_failed,    // psi(phi(x)) != 0 at a sample point
  exactness_failed,          // im(dphi(0)) != ker(dpsi(0))
  not_in_fiber,              // ||psi(y)|| above fiber tolerance
  outside_certified_radius,  // target outside the certified ball
  diverged,                  // residuals stopped contracting
  max_iterations,
  out_of_chart,              // transition target leaves the certified chart
  unknown_generator,
  malformed_exponent,
  parse_error,
  out_of_chart_domain,       // matrix log outside ||g - I|| < 1
  not_invariant,             // conjugation leaves the algebra span
  validation_failed,         // representation fails the homomorphism test
  not_a_complex,             // ||d1 * d0|| above tolerance
  not_rigid,
  not_in_neighborhood,
};

const char* errc_name(errc code) noexcept;

class error : public std::runtime_error {
 public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

}  // namespace weil
