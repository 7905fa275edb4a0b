#ifndef CARNOT_ERRORS_HPP
#define CARNOT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace carnot {

/// Base class for all contract violations raised by this library.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct GradingViolation : Error {
    using Error::Error;
};
struct JacobiViolation : Error {
    using Error::Error;
};
struct DimensionMismatch : Error {
    using Error::Error;
};
struct NonPositiveScale : Error {
    using Error::Error;
};
struct IndexOutOfRange : Error {
    using Error::Error;
};
struct UnsupportedStep : Error {
    using Error::Error;
};
struct NonFiniteValue : Error {
    using Error::Error;
};
struct GridMismatch : Error {
    using Error::Error;
};
struct NonOrthogonalRotation : Error {
    using Error::Error;
};
struct DenseThresholdExceeded : Error {
    using Error::Error;
};
struct ChebyshevDegreeTooLow : Error {
    using Error::Error;
};
struct IdentityNodeMissing : Error {
    using Error::Error;
};
struct NonEuclideanGroup : Error {
    using Error::Error;
};
struct InvalidBump : Error {
    using Error::Error;
};
struct NegativeRadicand : Error {
    using Error::Error;
};
struct ScaleRangeUnresolvable : Error {
    using Error::Error;
};
struct ScaleOutOfRange : Error {
    using Error::Error;
};
struct MomentOrderTooLow : Error {
    using Error::Error;
};
struct TilingViolation : Error {
    using Error::Error;
};
struct EmptySampleSet : Error {
    using Error::Error;
};
struct DensityPrecheckFailed : Error {
    using Error::Error;
};
struct NotContractive : Error {
    using Error::Error;
};
struct MaxIterExceeded : Error {
    using Error::Error;
};
struct ConfigError : Error {
    using Error::Error;
};

} // namespace carnot

#endif
