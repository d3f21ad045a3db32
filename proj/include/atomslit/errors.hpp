#pragma once

#include <stdexcept>
#include <string>

namespace atomslit {

// Scenario/config problems. The CLI maps this to exit code 2.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Fit did not converge or produced an out-of-domain result (e.g. sideband
// ratio >= 1). The CLI maps this to exit code 3.
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace atomslit
