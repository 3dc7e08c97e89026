#include <doctest.h>

#include <cmath>
#include <complex>

#include "helpers.hpp"
#include "triadyn/errors.hpp"
#include "triadyn/integrate.hpp"

using namespace triadyn;

namespace {

ModelParams decoupled() {
    ModelParams p;
    p.mu1 = -2.5;
    p.mu3 = 2.5;
    return p;
}

double dist(const Vec3& a, const Vec3& b) {
    double m = 0.0;
    for (int i = 0; i < 3; ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("integrate settles on the decoupled fixed point immediately") {
    const Trajectory traj = integrate(decoupled(), {-2.5, 0.0, 2.5}, {});
    CHECK(traj.converged);
    CHECK(traj.final_residual < 1e-9);
    CHECK(dist(traj.samples.back().x, {-2.5, 0.0, 2.5}) == 0.0);
}

TEST_CASE("adaptive integration tracks the exact linear decay") {
    ModelParams p;  // kappa = C = mu = 0: dx/dt = -x componentwise
    SolverConfig cfg;
    cfg.t_max = 1.0;
    cfg.eq_tol = 1e-300;
    const Vec3 x0{1.0, -2.0, 0.5};
    const Trajectory traj = integrate(p, x0, cfg);
    const Vec3& end = traj.samples.back().x;
    CHECK(traj.samples.back().t == 1.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(end[i] == doctest::Approx(x0[i] * std::exp(-1.0)).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("trajectory samples are strictly increasing in time and start at the IC") {
    ModelParams p = ModelParams::canonical(5.0, 1.5, 0.05, 4.0);
    SolverConfig cfg;
    cfg.t_max = 20.0;
    cfg.eq_tol = 1e-300;
    const Vec3 x0{-2.5, 0.0, 2.5};
    const Trajectory traj = integrate(p, x0, cfg);
    REQUIRE(traj.samples.size() > 2);
    CHECK(traj.samples.front().t == 0.0);
    CHECK(dist(traj.samples.front().x, x0) == 0.0);
    for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        CHECK(traj.samples[i].t > traj.samples[i - 1].t);
    }
    CHECK(traj.samples.back().t == 20.0);

    SolverConfig strided = cfg;
    strided.stride = 7;
    const Trajectory sparse = integrate(p, x0, strided);
    CHECK(sparse.samples.size() < traj.samples.size());
    CHECK(sparse.samples.front().t == 0.0);
    CHECK(sparse.samples.back().t == 20.0);
    CHECK(dist(sparse.samples.back().x, traj.samples.back().x) == 0.0);
}

TEST_CASE("rk4 endpoint error shrinks 16x when the step is halved") {
    ModelParams p = ModelParams::canonical(5.0, 1.5);
    const Vec3 x0{-2.5, 1e-6, 2.5};

    SolverConfig ref_cfg;
    ref_cfg.method = SolverMethod::RK4Fixed;
    ref_cfg.t_max = 2.0;
    ref_cfg.eq_tol = 1e-300;
    ref_cfg.dt = 1.0 / 4096.0;
    ref_cfg.stride = 1u << 20;
    const Vec3 ref = integrate(p, x0, ref_cfg).samples.back().x;

    auto endpoint_err = [&](double dt) {
        SolverConfig cfg = ref_cfg;
        cfg.dt = dt;
        return dist(integrate(p, x0, cfg).samples.back().x, ref);
    };
    const double e1 = endpoint_err(0.05);
    const double e2 = endpoint_err(0.025);
    CHECK(e1 > 0.0);
    const double ratio = e1 / e2;
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("a contracting run stops early once the residual passes eq_tol") {
    ModelParams p = ModelParams::canonical(5.0, 3.0);
    SolverConfig cfg;
    const Trajectory traj = integrate(p, {-2.5, 1e-6, 2.5}, cfg);
    CHECK(traj.converged);
    CHECK(traj.final_residual < cfg.eq_tol);
    CHECK(traj.samples.back().t < cfg.t_max);
}

TEST_CASE("strong repulsion is reported as blow-up, not silent nonsense") {
    ModelParams p = ModelParams::canonical(5.0, 1.0);
    p.c1 = -10.0;
    p.c3 = 10.0;
    CHECK_THROWS_AS((void)integrate(p, {-2.5, 0.0, 2.5}, {}), BlowUpError);
}

TEST_CASE("unreachable tolerances surface as step underflow") {
    ModelParams p = ModelParams::canonical(5.0, 1.5);
    SolverConfig cfg;
    cfg.abs_tol = 1e-300;
    cfg.rel_tol = 1e-40;  // below the rounding floor of the error estimate
    cfg.eq_tol = 1e-300;
    cfg.t_max = 1.0;
    CHECK_THROWS_AS((void)integrate(p, {-2.5, 0.0, 2.5}, cfg), StepUnderflowError);
}

TEST_CASE("find_equilibrium refines the decoupled case to J = -I") {
    const Equilibrium eq = find_equilibrium(decoupled(), {-2.5, 0.0, 2.5}, {});
    CHECK(eq.converged);
    CHECK(eq.stable);
    CHECK(dist(eq.x_star, {-2.5, 0.0, 2.5}) < 1e-12);
    for (const auto& ev : eq.eigenvalues) {
        CHECK(ev.real() == doctest::Approx(-1.0).epsilon(1e-12));
        CHECK(ev.imag() == 0.0);
    }
}

TEST_CASE("figure 2(b) equilibrium: the center joins node 1") {
    ModelParams p = ModelParams::canonical(5.0, 1.5, 0.05, 4.0);
    const Equilibrium eq = find_equilibrium(p, {-2.5, 0.0, 2.5}, {});
    REQUIRE(eq.converged);
    CHECK(eq.residual < 1e-12);
    CHECK(eq.stable);
    CHECK(std::abs(eq.x_star[1] - eq.x_star[0]) < std::abs(eq.x_star[2] - eq.x_star[1]));

    // Eigenvalues satisfy the characteristic polynomial of the Jacobian.
    const Mat3 J = jacobian_chain3(eq.x_star, p);
    for (const auto& ev : eq.eigenvalues) {
        std::array<std::array<std::complex<double>, 3>, 3> M;
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                M[i][j] = std::complex<double>(J[i][j], 0.0) - (i == j ? ev : 0.0);
            }
        }
        const std::complex<double> det =
            M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
            M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
            M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
        CHECK(std::abs(det) < 1e-8);
    }

    // A stable equilibrium recaptures a small perturbation.
    Vec3 nudged = eq.x_star;
    for (auto& v : nudged) v += 1e-4;
    const Equilibrium back = find_equilibrium(p, nudged, {});
    REQUIRE(back.converged);
    CHECK(dist(back.x_star, eq.x_star) < 1e-8);
}

TEST_CASE("a horizon that is too short yields an unresolved result, not a throw") {
    ModelParams p = ModelParams::canonical(5.0, 1.5);
    SolverConfig cfg;
    cfg.t_max = 0.5;
    const Equilibrium eq = find_equilibrium(p, {-2.5, 1e-6, 2.5}, cfg);
    CHECK_FALSE(eq.converged);
    CHECK_FALSE(eq.diagnostic.empty());
}

TEST_CASE("general N-agent integration reproduces the triad result") {
    ModelParams p = ModelParams::canonical(5.0, 3.0, 0.05, 4.0);
    SolverConfig cfg;
    cfg.t_max = 200.0;
    const Trajectory triad = integrate(p, {-2.5, 0.0, 2.5}, cfg);
    const GeneralTrajectory general =
        integrate_general(GeneralParams::from_chain3(p), {-2.5, 0.0, 2.5}, cfg);
    REQUIRE(general.states.size() > 1);
    const auto& ge = general.states.back();
    const auto& te = triad.samples.back().x;
    for (int i = 0; i < 3; ++i) {
        CHECK(ge[i] == doctest::Approx(te[i]).epsilon(1e-7).scale(1.0));
    }
    CHECK(general.converged == triad.converged);

    CHECK_THROWS_AS(
        (void)integrate_general(GeneralParams::from_chain3(p), {0.0, 0.0}, cfg),
        ValidationError);
}

TEST_CASE("solver configuration is validated") {
    SolverConfig cfg;
    cfg.dt = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.t_max = -1.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.dt = 5.0;
    cfg.t_max = 5.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.stride = 0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);
    cfg = {};
    cfg.rel_tol = 0.0;
    CHECK_THROWS_AS(cfg.validate(), ValidationError);

    CHECK(parse_method("rk4") == SolverMethod::RK4Fixed);
    CHECK(parse_method("rk45") == SolverMethod::RK45Adaptive);
    CHECK_THROWS_AS((void)parse_method("euler"), ValidationError);
    CHECK(std::string(to_string(SolverMethod::RK45Adaptive)) == "rk45");
}
