// Error types shared across simulation and estimation.
#pragma once

#include <stdexcept>
#include <string>

namespace klid {

/// Numerical failure inside a time-stepping loop; carries the step at which
/// the computation first became unusable.
struct DivergenceError : std::runtime_error {
    int step;

    DivergenceError(int step_index, const std::string& what)
        : std::runtime_error("step " + std::to_string(step_index) + ": " + what),
          step(step_index) {}
};

}  // namespace klid
