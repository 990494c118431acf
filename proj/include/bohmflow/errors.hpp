#ifndef BOHMFLOW_ERRORS_HPP
#define BOHMFLOW_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace bohmflow {

/// Invalid configuration of a scenario or of library inputs (bad dimensions,
/// non-positive masses, malformed scan lists, ...).
struct ConfigurationError : std::runtime_error {
    explicit ConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

/// Argument outside the mathematical domain of an operation (|beta| >= 1, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};

/// |psi|^2 fell below the node threshold; guide velocities are undefined there.
/// `particle` is the offending particle index when it can be attributed to a
/// single factor of a product state, -1 for a joint node.
struct NodeProximityError : std::runtime_error {
    NodeProximityError(const std::string& what, double rho_value, int particle_index = -1)
        : std::runtime_error(what), rho(rho_value), particle(particle_index) {}
    double rho;
    int particle;
};

/// An integration step produced non-finite state.
struct IntegrationError : std::runtime_error {
    explicit IntegrationError(const std::string& what) : std::runtime_error(what) {}
};

/// Single-time reduction requested while the clock precision cannot hide the
/// spread of the temporal offsets (epsilon <= Lambda).
struct ReductionNotJustified : std::runtime_error {
    ReductionNotJustified(const std::string& what, double lambda_value, double epsilon_value)
        : std::runtime_error(what), lambda(lambda_value), epsilon(epsilon_value) {}
    double lambda;
    double epsilon;
};

/// Rejection sampling acceptance rate collapsed; a Metropolis chain is the
/// recommended fallback.
struct EnvelopeTooLoose : std::runtime_error {
    explicit EnvelopeTooLoose(const std::string& what) : std::runtime_error(what) {}
};

/// Too many pushed-forward samples left the test window for the statistical
/// comparison to be meaningful.
struct InconclusiveDomain : std::runtime_error {
    InconclusiveDomain(const std::string& what, double edge_loss_value)
        : std::runtime_error(what), edge_loss(edge_loss_value) {}
    double edge_loss;
};

}  // namespace bohmflow

#endif  // BOHMFLOW_ERRORS_HPP
