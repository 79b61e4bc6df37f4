#pragma once

#include <stdexcept>
#include <string>

namespace defectline {

/// Conjugating matrix is singular or its condition number exceeds the cap.
struct IllConditionedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// No O(dt)-close matrix satisfies the requested coefficient targets.
struct StepTooLargeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Closed-form eigenvalue velocity requested at a repeated eigenvalue.
struct DegenerateEigenvalueError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A zero of the sampled quantity lies on (or too close to) the contour;
/// the caller must perturb the radius.
struct ContourUnsafeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Degenerate / higher-order defect: |J| below threshold, or winding and
/// Jacobian sign disagree. Reported, never guessed.
struct UnstableDefectError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Lifetime sweep produced no transients at any sigma.
struct EmptyFitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace defectline
