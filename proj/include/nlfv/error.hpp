#pragma once

#include <stdexcept>
#include <string>

namespace nlfv {

// Bad input or configuration: grids, data, config fields, unknown names.
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A solver run could not proceed (CFL breach, boundary mass defect).
class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class CflViolation : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

class BoundaryDefect : public SolverFailure {
public:
    using SolverFailure::SolverFailure;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw InvalidInput(what);
}

} // namespace nlfv
