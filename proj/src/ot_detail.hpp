#pragma once

#include "fairgraph/ot.hpp"

namespace fairgraph::detail {

// Shared precondition check for the exact and regularised solvers.
void check_transport_inputs(const Matrix& cost, const Vector& source, const Vector& target);

}  // namespace fairgraph::detail
