#pragma once

#include <stdexcept>
#include <string>

namespace iim {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad arguments: non-finite coordinates, empty boxes, mismatched times.
struct invalid_input_error : error {
  using error::error;
};

// Unknown case id in the registry.
struct not_found_error : error {
  using error::error;
};

// Step budget exceeded while tracing a characteristic.
struct resource_error : error {
  using error::error;
};

// Integrator state left the representable range.
struct divergence_error : error {
  using error::error;
};

// An integrand produced a non-finite value at a quadrature node.
struct evaluation_error : error {
  using error::error;
};

}  // namespace iim
