#pragma once

#include <stdexcept>
#include <string>

namespace ringmod {

// Bad mathematical input: argument outside the function's domain,
// malformed geometry, radii out of order, and the like.
class domain_error : public std::domain_error {
public:
    explicit domain_error(const std::string& what) : std::domain_error(what) {}
};

// A guarantee was requested from a ring whose modulus is too small to
// support it. The message names the threshold that was missed.
class insufficient_modulus_error : public domain_error {
public:
    explicit insufficient_modulus_error(const std::string& what) : domain_error(what) {}
};

// An iterative scheme ran out of its iteration budget before reaching
// the requested tolerance.
class convergence_error : public std::runtime_error {
public:
    convergence_error(const std::string& what, long iterations, double residual)
        : std::runtime_error(what), iterations(iterations), residual(residual) {}
    long iterations;
    double residual;
};

// The requested discretisation is too coarse to represent the input
// (e.g. a boundary component pins almost no grid nodes).
class resolution_error : public std::runtime_error {
public:
    explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace ringmod
