#ifndef TRIADYN_ERRORS_HPP
#define TRIADYN_ERRORS_HPP

#include <stdexcept>

namespace triadyn {

// Base class for every error thrown by the toolkit.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad arguments or inconsistent parameter sets. The CLI maps these to exit code 2.
struct ValidationError : Error {
    using Error::Error;
};

// An expansion or rescaling is undefined at the requested point.
struct SingularityError : Error {
    using Error::Error;
};

// A bracketed root search found no sign change.
struct NoRootError : Error {
    using Error::Error;
};

// The state left the trust region (|x_i| > 1e6) or became non-finite.
struct BlowUpError : Error {
    using Error::Error;
};

// The adaptive step size shrank below representable resolution.
struct StepUnderflowError : Error {
    using Error::Error;
};

// kappa4 search: no majority-rule window exists at the probed couplings.
struct NoMajorityRuleError : Error {
    using Error::Error;
};

// A computation required a converged equilibrium but got none.
struct UnresolvedError : Error {
    using Error::Error;
};

}  // namespace triadyn

#endif
