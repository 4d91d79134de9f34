#pragma once

#include <stdexcept>
#include <string>

namespace cosim {

/// A scenario, model, or argument violates a documented precondition.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A simulation failed while advancing; the message names the unit and
/// simulated time where known.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The requested analysis does not cover this scenario topology.
class UnsupportedTopology : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace cosim
