#include "rsinsure/errors.hpp"

#include <sstream>

namespace rsinsure {

namespace {
std::string fmt(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}
}  // namespace

ConditionViolated::ConditionViolated(std::size_t regime, double lhs, double rhs,
                                     const std::string& which)
    : ValidationError("technical condition violated in regime " + std::to_string(regime + 1) +
                      " (" + which + "): delta=" + fmt(lhs) + " <= " + fmt(rhs)),
      regime_(regime), lhs_(lhs), rhs_(rhs) {}

NoConvergence::NoConvergence(std::size_t iterations, double residual)
    : SolverError("no convergence after " + std::to_string(iterations) +
                  " iterations, residual " + fmt(residual)),
      iterations_(iterations), residual_(residual) {}

NonConvergent::NonConvergent(double error_estimate, double tolerance)
    : SolverError("quadrature error estimate " + fmt(error_estimate) + " exceeds tolerance " +
                  fmt(tolerance)),
      error_estimate_(error_estimate) {}

RootSelectionAmbiguous::RootSelectionAmbiguous(double first, double second)
    : SolverError("both quadratic roots satisfy the admissibility bound: " + fmt(first) + ", " +
                  fmt(second)),
      first_(first), second_(second) {}

}  // namespace rsinsure
