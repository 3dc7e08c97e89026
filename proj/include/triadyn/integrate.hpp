#ifndef TRIADYN_INTEGRATE_HPP
#define TRIADYN_INTEGRATE_HPP

#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "triadyn/model.hpp"

namespace triadyn {

enum class SolverMethod { RK4Fixed, RK45Adaptive };

const char* to_string(SolverMethod m);
SolverMethod parse_method(const std::string& name);

struct SolverConfig {
    SolverMethod method = SolverMethod::RK45Adaptive;
    double dt = 1e-2;      // fixed step (rk4) or initial step (rk45)
    double t_max = 500.0;
    double eq_tol = 1e-9;  // inf-norm of the rhs that counts as "settled"
    double abs_tol = 1e-10;
    double rel_tol = 1e-8;
    std::size_t stride = 1;  // record every stride-th accepted step

    void validate() const;
};

struct Trajectory {
    std::vector<OpinionState> samples;
    ModelParams params;
    bool converged = false;
    double final_residual = std::numeric_limits<double>::infinity();
};

struct Equilibrium {
    Vec3 x_star{};
    double residual = std::numeric_limits<double>::infinity();
    std::array<std::complex<double>, 3> eigenvalues{};
    bool stable = false;
    bool converged = false;
    std::string diagnostic;  // non-empty when unresolved or refinement degraded
};

Trajectory integrate(const ModelParams& p, const Vec3& x_init, const SolverConfig& cfg);

// Integrates until the residual drops below eq_tol, then sharpens the endpoint
// with damped Newton iterations and attaches the Jacobian eigenvalues. A run
// that never settles comes back with converged = false and a diagnostic rather
// than throwing; blow-up and step underflow still throw.
Equilibrium find_equilibrium(const ModelParams& p, const Vec3& x_init,
                             const SolverConfig& cfg);

struct GeneralTrajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    bool converged = false;
    double final_residual = std::numeric_limits<double>::infinity();
};

GeneralTrajectory integrate_general(const GeneralParams& p,
                                    const std::vector<double>& x_init,
                                    const SolverConfig& cfg);

}  // namespace triadyn

#endif
