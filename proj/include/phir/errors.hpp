#pragma once

#include <stdexcept>
#include <string>

namespace phir {

// Bad caller input: wrong sizes, out-of-range parameters, wrong simplex kind.
struct ArgumentError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Unknown simplex or vertex id.
struct LookupError : std::out_of_range {
  using std::out_of_range::out_of_range;
};

struct DimensionMismatch : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Violated precondition on a structured input (e.g. an invalid filtration).
struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

// Non-closed, non-manifold, or otherwise unexpected surface topology.
struct TopologyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Volumetric complex does not contain the surface as a subcomplex.
struct ConformanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Degenerate reference geometry or configuration values.
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace phir
