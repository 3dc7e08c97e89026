#include "triadyn/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "triadyn/cubic.hpp"
#include "triadyn/errors.hpp"

namespace triadyn {

namespace {

constexpr double kBlowUpBound = 1e6;
constexpr std::size_t kMaxSteps = 20'000'000;  // defensive cap, far above normal use

template <class State>
double inf_norm(const State& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

template <class State>
bool all_finite(const State& v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

template <class State>
void check_bounds(const State& x, double t) {
    for (double v : x) {
        if (!std::isfinite(v) || std::abs(v) > kBlowUpBound) {
            std::ostringstream msg;
            msg << "state left the trust region (|x| > " << kBlowUpBound << ") at t = " << t;
            throw BlowUpError(msg.str());
        }
    }
}

template <class State>
struct CoreResult {
    State x;
    double t = 0.0;
    bool converged = false;
    double residual = std::numeric_limits<double>::infinity();
};

// Dormand-Prince 5(4) with the first-same-as-last stage reused both as the
// next step's k1 and as a free equilibrium residual.
template <class State, class Rhs, class Record>
CoreResult<State> run_rk45(Rhs rhs, State x, const SolverConfig& cfg, Record record) {
    const std::size_t n = x.size();
    double t = 0.0;
    State k1 = rhs(x);
    double res = inf_norm(k1);
    record(t, x);
    if (res < cfg.eq_tol) return {x, t, true, res};

    State k2 = x, k3 = x, k4 = x, k5 = x, k6 = x, k7 = x, y = x, xn = x;
    double dt = std::min(cfg.dt, cfg.t_max);
    std::size_t accepted = 0;
    for (std::size_t step = 0; step < kMaxSteps;) {
        bool last = false;
        if (t + dt >= cfg.t_max) {
            dt = cfg.t_max - t;
            last = true;
        }
        const double dt_min = 1e-14 * std::max(1.0, std::abs(t));
        if (dt < dt_min) {
            std::ostringstream msg;
            msg << "adaptive step underflow at t = " << t << " (dt = " << dt << ")";
            throw StepUnderflowError(msg.str());
        }

        bool stage_ok = true;
        auto stage = [&](State& k, auto... cks) {
            for (std::size_t i = 0; i < n; ++i) {
                double acc = 0.0;
                ((acc += cks.first * cks.second[i]), ...);
                y[i] = x[i] + dt * acc;
            }
            if (!all_finite(y)) {
                stage_ok = false;
                return;
            }
            k = rhs(y);
        };
        using P = std::pair<double, const State&>;
        stage(k2, P{1.0 / 5, k1});
        if (stage_ok) stage(k3, P{3.0 / 40, k1}, P{9.0 / 40, k2});
        if (stage_ok) stage(k4, P{44.0 / 45, k1}, P{-56.0 / 15, k2}, P{32.0 / 9, k3});
        if (stage_ok)
            stage(k5, P{19372.0 / 6561, k1}, P{-25360.0 / 2187, k2}, P{64448.0 / 6561, k3},
                  P{-212.0 / 729, k4});
        if (stage_ok)
            stage(k6, P{9017.0 / 3168, k1}, P{-355.0 / 33, k2}, P{46732.0 / 5247, k3},
                  P{49.0 / 176, k4}, P{-5103.0 / 18656, k5});
        double err = std::numeric_limits<double>::infinity();
        if (stage_ok) {
            // 5th order solution, then k7 = f(xn) closes the FSAL pair.
            stage(k7, P{35.0 / 384, k1}, P{500.0 / 1113, k3}, P{125.0 / 192, k4},
                  P{-2187.0 / 6784, k5}, P{11.0 / 84, k6});
            xn = y;
        }
        if (stage_ok) {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double e = dt * (71.0 / 57600 * k1[i] - 71.0 / 16695 * k3[i] +
                                       71.0 / 1920 * k4[i] - 17253.0 / 339200 * k5[i] +
                                       22.0 / 525 * k6[i] - 1.0 / 40 * k7[i]);
                const double scale =
                    cfg.abs_tol + cfg.rel_tol * std::max(std::abs(x[i]), std::abs(xn[i]));
                acc += (e / scale) * (e / scale);
            }
            err = std::sqrt(acc / static_cast<double>(n));
        }

        ++step;
        if (stage_ok && err <= 1.0) {
            t = last ? cfg.t_max : t + dt;
            x = xn;
            k1 = k7;
            check_bounds(x, t);
            res = inf_norm(k1);
            ++accepted;
            const bool settled = res < cfg.eq_tol;
            if (settled || t >= cfg.t_max || accepted % cfg.stride == 0) {
                record(t, x);
            }
            if (settled) return {x, t, true, res};
            if (t >= cfg.t_max) return {x, t, false, res};
        }
        const double factor =
            (stage_ok && err > 0.0 && std::isfinite(err))
                ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0)
                : (stage_ok && err == 0.0 ? 5.0 : 0.5);
        dt *= factor;
    }
    throw Error("rk45: step budget exceeded");
}

template <class State, class Rhs, class Record>
CoreResult<State> run_rk4(Rhs rhs, State x, const SolverConfig& cfg, Record record) {
    const std::size_t n = x.size();
    double t = 0.0;
    State k1 = rhs(x);
    double res = inf_norm(k1);
    record(t, x);
    if (res < cfg.eq_tol) return {x, t, true, res};

    State k2 = x, k3 = x, k4 = x, y = x;
    const std::size_t n_steps =
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(cfg.t_max / cfg.dt - 1e-12)));
    for (std::size_t step = 0; step < n_steps; ++step) {
        const bool last = (step + 1 == n_steps);
        const double dt = last ? cfg.t_max - t : cfg.dt;
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * dt * k1[i];
        k2 = rhs(y);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + 0.5 * dt * k2[i];
        k3 = rhs(y);
        for (std::size_t i = 0; i < n; ++i) y[i] = x[i] + dt * k3[i];
        k4 = rhs(y);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t = last ? cfg.t_max : t + dt;
        check_bounds(x, t);
        k1 = rhs(x);  // doubles as the next step's first stage
        res = inf_norm(k1);
        const bool settled = res < cfg.eq_tol;
        if (settled || last || (step + 1) % cfg.stride == 0) {
            record(t, x);
        }
        if (settled) return {x, t, true, res};
    }
    return {x, t, false, res};
}

template <class State, class Rhs, class Record>
CoreResult<State> run_core(Rhs rhs, const State& x_init, const SolverConfig& cfg,
                           Record record) {
    if (cfg.method == SolverMethod::RK4Fixed) {
        return run_rk4(std::move(rhs), x_init, cfg, std::move(record));
    }
    return run_rk45(std::move(rhs), x_init, cfg, std::move(record));
}

std::optional<Vec3> solve3(const Mat3& A, const Vec3& b) {
    double m[3][4];
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) m[i][j] = A[i][j];
        m[i][3] = b[i];
    }
    for (int col = 0; col < 3; ++col) {
        int piv = col;
        for (int row = col + 1; row < 3; ++row) {
            if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
        }
        if (std::abs(m[piv][col]) < 1e-14) return std::nullopt;
        if (piv != col) std::swap(m[piv], m[col]);
        for (int row = col + 1; row < 3; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int j = col; j < 4; ++j) m[row][j] -= f * m[col][j];
        }
    }
    Vec3 x{};
    for (int i = 2; i >= 0; --i) {
        double acc = m[i][3];
        for (int j = i + 1; j < 3; ++j) acc -= m[i][j] * x[j];
        x[i] = acc / m[i][i];
    }
    return x;
}

}  // namespace

const char* to_string(SolverMethod m) {
    return m == SolverMethod::RK4Fixed ? "rk4" : "rk45";
}

SolverMethod parse_method(const std::string& name) {
    if (name == "rk4") return SolverMethod::RK4Fixed;
    if (name == "rk45") return SolverMethod::RK45Adaptive;
    throw ValidationError("unknown solver method '" + name + "' (expected 'rk4' or 'rk45')");
}

void SolverConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("dt must be > 0");
    if (!(t_max > 0.0) || !std::isfinite(t_max)) throw ValidationError("t_max must be > 0");
    if (!(dt < t_max)) throw ValidationError("dt must be < t_max");
    if (!(eq_tol > 0.0)) throw ValidationError("eq_tol must be > 0");
    if (!(abs_tol > 0.0)) throw ValidationError("abs_tol must be > 0");
    if (!(rel_tol > 0.0)) throw ValidationError("rel_tol must be > 0");
    if (stride == 0) throw ValidationError("stride must be >= 1");
}

Trajectory integrate(const ModelParams& p, const Vec3& x_init, const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    Trajectory traj;
    traj.params = p;
    auto rhs = [&p](const Vec3& x) { return rhs_chain3(x, p); };
    auto record = [&traj](double t, const Vec3& x) {
        if (!traj.samples.empty() && traj.samples.back().t == t) return;
        traj.samples.push_back({x, t});
    };
    const auto result = run_core(rhs, x_init, cfg, record);
    traj.converged = result.converged;
    traj.final_residual = result.residual;
    if (traj.samples.empty() || traj.samples.back().t != result.t) {
        traj.samples.push_back({result.x, result.t});
    }
    return traj;
}

Equilibrium find_equilibrium(const ModelParams& p, const Vec3& x_init,
                             const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    auto rhs = [&p](const Vec3& x) { return rhs_chain3(x, p); };
    const auto result = run_core(rhs, x_init, cfg, [](double, const Vec3&) {});

    Equilibrium eq;
    eq.x_star = result.x;
    eq.residual = result.residual;
    eq.converged = result.converged;

    // The endpoint only serves as a Newton seed once the flow has come close;
    // polishing from farther out could land on a root in a different basin.
    if (!result.converged && !(result.residual <= 1e-5)) {
        std::ostringstream msg;
        msg << "no equilibrium within t_max = " << cfg.t_max
            << " (residual " << result.residual << " vs eq_tol " << cfg.eq_tol << ")";
        eq.diagnostic = msg.str();
        return eq;
    }

    // Damped Newton sharpening; a singular Jacobian reverts to the raw endpoint.
    Vec3 x = eq.x_star;
    Vec3 f = rhs_chain3(x, p);
    double res = inf_norm(f);
    for (int it = 0; it < 50 && res >= 1e-12; ++it) {
        const Mat3 J = jacobian_chain3(x, p);
        const auto dx = solve3(J, {-f[0], -f[1], -f[2]});
        if (!dx) {
            eq.diagnostic = "singular jacobian during Newton refinement; kept integrator endpoint";
            x = eq.x_star;
            res = eq.residual;
            break;
        }
        double step = 1.0;
        bool improved = false;
        for (int half = 0; half < 8; ++half, step *= 0.5) {
            const Vec3 xn{x[0] + step * (*dx)[0], x[1] + step * (*dx)[1],
                          x[2] + step * (*dx)[2]};
            const Vec3 fn = rhs_chain3(xn, p);
            const double rn = inf_norm(fn);
            if (rn < res) {
                x = xn;
                f = fn;
                res = rn;
                improved = true;
                break;
            }
        }
        if (!improved) break;
    }
    const double moved = std::max({std::abs(x[0] - result.x[0]), std::abs(x[1] - result.x[1]),
                                   std::abs(x[2] - result.x[2])});
    if (!result.converged) {
        if (res < cfg.eq_tol && moved <= 1e-2) {
            eq.converged = true;
        } else {
            std::ostringstream msg;
            msg << "no equilibrium within t_max = " << cfg.t_max
                << " (residual " << result.residual << " vs eq_tol " << cfg.eq_tol << ")";
            eq.diagnostic = msg.str();
            return eq;
        }
    }
    eq.x_star = x;
    eq.residual = res;

    const Mat3 J = jacobian_chain3(x, p);
    const double tr = J[0][0] + J[1][1] + J[2][2];
    const double m2 = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) +
                      (J[0][0] * J[2][2] - J[0][2] * J[2][0]) +
                      (J[0][0] * J[1][1] - J[0][1] * J[1][0]);
    const double det = J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
                       J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
                       J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
    eq.eigenvalues = solve_cubic(1.0, -tr, m2, -det);
    eq.stable = true;
    for (const auto& ev : eq.eigenvalues) {
        if (ev.real() >= 0.0) eq.stable = false;
    }
    return eq;
}

GeneralTrajectory integrate_general(const GeneralParams& p,
                                    const std::vector<double>& x_init,
                                    const SolverConfig& cfg) {
    p.validate();
    cfg.validate();
    if (x_init.size() != p.size()) {
        throw ValidationError("integrate_general: state size does not match params");
    }
    GeneralTrajectory traj;
    auto rhs = [&p](const std::vector<double>& x) { return rhs_general(x, p); };
    auto record = [&traj](double t, const std::vector<double>& x) {
        if (!traj.times.empty() && traj.times.back() == t) return;
        traj.times.push_back(t);
        traj.states.push_back(x);
    };
    const auto result = run_core(rhs, x_init, cfg, record);
    traj.converged = result.converged;
    traj.final_residual = result.residual;
    if (traj.times.empty() || traj.times.back() != result.t) {
        traj.times.push_back(result.t);
        traj.states.push_back(result.x);
    }
    return traj;
}

}  // namespace triadyn
