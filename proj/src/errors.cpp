#include "weil/errors.hpp"

namespace weil {

const char* errc_name(errc code) noexcept {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::y_not_in_image: return "YNotInImage";
    case errc::zero_operator: return "ZeroOperator";
    case errc::not_surjective: return "NotSurjective";
    case errc::perturbation_too_large: return "PerturbationTooLarge";
    case errc::halving_violated: return "HalvingViolated";
    case errc::not_exact: return "NotExact";
    case errc::image_mismatch: return "ImageMismatch";
    case errc::not_embedding: return "NotEmbedding";
    case errc::chain_condition_failed: return "ChainConditionFailed";
    case errc::exactness_failed: return "ExactnessFailed";
    case errc::not_in_fiber: return "NotInFiber";
    case errc::outside_certified_radius: return "OutsideCertifiedRadius";
    case errc::diverged: return "Diverged";
    case errc::max_iterations: return "MaxIterations";
    case errc::out_of_chart: return "OutOfChart";
    case errc::unknown_generator: return "UnknownGenerator";
    case errc::malformed_exponent: return "MalformedExponent";
    case errc::parse_error: return "ParseError";
    case errc::out_of_chart_domain: return "OutOfChartDomain";
    case errc::not_invariant: return "NotInvariant";
    case errc::validation_failed: return "ValidationFailed";
    case errc::not_a_complex: return "NotAComplex";
    case errc::not_rigid: return "NotRigid";
    case errc::not_in_neighborhood: return "NotInNeighborhood";
  }
  return "UnknownError";
}

}  // namespace weil
