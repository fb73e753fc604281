#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace splap {

// All library failures carry a stable machine-readable code next to the
// human-readable message, so callers (and tests) can dispatch on the code
// without parsing text.
class Error : public std::runtime_error {
  public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

  private:
    std::string code_;
};

namespace errc {
// core
inline constexpr const char* OutOfExponentSet = "OutOfExponentSet";
inline constexpr const char* NonPositiveDelta = "NonPositiveDelta";
inline constexpr const char* NegativeLambda = "NegativeLambda";
inline constexpr const char* ScalingNotExact = "ScalingNotExact";
// grid
inline constexpr const char* TooCoarse = "TooCoarse";
// plap
inline constexpr const char* NonpositiveInterior = "NonpositiveInterior";
// solve
inline constexpr const char* NoConvergence = "NoConvergence";
inline constexpr const char* NegativeRhs = "NegativeRhs";
inline constexpr const char* NotSubSolution = "NotSubSolution";
inline constexpr const char* NotSuperSolution = "NotSuperSolution";
inline constexpr const char* NoSuchMu = "NoSuchMu";
inline constexpr const char* ConvergedToDeflated = "ConvergedToDeflated";
inline constexpr const char* MeshTooCoarseNearBoundary = "MeshTooCoarseNearBoundary";
// eigen
inline constexpr const char* ZeroField = "ZeroField";
// branch
inline constexpr const char* StepUnderflow = "StepUnderflow";
// verify
inline constexpr const char* WindowTooSmall = "WindowTooSmall";
inline constexpr const char* PreconditionNotMet = "PreconditionNotMet";
// cli / io
inline constexpr const char* EmptyDiagram = "EmptyDiagram";
inline constexpr const char* ConfigInvalid = "ConfigInvalid";
inline constexpr const char* SolverFailure = "SolverFailure";
}  // namespace errc

}  // namespace splap
