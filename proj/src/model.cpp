#include "triadyn/model.hpp"

#include <cmath>
#include <sstream>

#include "triadyn/errors.hpp"

namespace triadyn {

namespace {

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) {
        throw ValidationError(std::string(what) + " must be finite");
    }
}

void require_finite_state(const std::vector<double>& x, const char* where) {
    for (double v : x) {
        if (!std::isfinite(v)) {
            throw ValidationError(std::string(where) + ": non-finite state");
        }
    }
}

}  // namespace

const char* to_string(DerivConvention conv) {
    return conv == DerivConvention::PaperComposite ? "paper" : "true";
}

DerivConvention parse_convention(const std::string& name) {
    if (name == "paper" || name == "paper-composite") return DerivConvention::PaperComposite;
    if (name == "true" || name == "true-derivative") return DerivConvention::TrueDerivative;
    throw ValidationError("unknown derivative convention '" + name +
                          "' (expected 'paper' or 'true-derivative')");
}

double ModelParams::leader_strength() const {
    if (!has_leader_pattern()) {
        throw ValidationError("leadership strengths must follow the (C, 0, -C) pattern");
    }
    return c1;
}

void ModelParams::validate() const {
    for (double v : {kappa, nu, c1, c2, c3, x0, mu1, mu2, mu3, gamma1, gamma2, gamma3, lambda}) {
        require_finite(v, "model parameter");
    }
    if (kappa < 0.0) throw ValidationError("kappa must be >= 0");
    if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
    if (!(gamma1 > 0.0 && gamma2 > 0.0 && gamma3 > 0.0)) {
        throw ValidationError("self-bias strengths gamma must be > 0");
    }
}

ModelParams ModelParams::canonical(double delta_mu, double kappa, double leader_c,
                                   double x0, double nu) {
    ModelParams p;
    p.kappa = kappa;
    p.nu = nu;
    p.c1 = leader_c;
    p.c2 = 0.0;
    p.c3 = -leader_c;
    p.x0 = x0;
    p.mu1 = -delta_mu / 2.0;
    p.mu2 = 0.0;
    p.mu3 = delta_mu / 2.0;
    p.validate();
    return p;
}

void Topology::validate() const {
    const std::size_t n = adjacency.size();
    if (coupling_weights.size() != n) {
        throw ValidationError("topology: adjacency and weight matrices differ in size");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (adjacency[i].size() != n || coupling_weights[i].size() != n) {
            throw ValidationError("topology: matrices must be square");
        }
        if (adjacency[i][i] != 0) throw ValidationError("topology: nonzero diagonal");
        for (std::size_t j = 0; j < n; ++j) {
            const int a = adjacency[i][j];
            if (a != 0 && a != 1) throw ValidationError("topology: adjacency entries must be 0 or 1");
            const double w = coupling_weights[i][j];
            require_finite(w, "coupling weight");
            if (w < 0.0) throw ValidationError("topology: negative coupling weight");
            if (a == 0 && w != 0.0) {
                throw ValidationError("topology: weight on a missing edge");
            }
        }
    }
}

Topology Topology::chain(std::size_t n, double kappa) {
    if (n < 2) throw ValidationError("chain topology needs at least 2 agents");
    if (kappa < 0.0) throw ValidationError("kappa must be >= 0");
    Topology t;
    t.adjacency.assign(n, std::vector<int>(n, 0));
    t.coupling_weights.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i + 1 < n; ++i) {
        t.adjacency[i][i + 1] = t.adjacency[i + 1][i] = 1;
        t.coupling_weights[i][i + 1] = t.coupling_weights[i + 1][i] = kappa;
    }
    return t;
}

Topology Topology::triad(double kappa, double nu) {
    const double end = kappa + nu;
    const double center = kappa - nu;
    if (end < 0.0 || center < 0.0) {
        throw ValidationError("triad topology: kappa +/- nu must both be >= 0");
    }
    Topology t = chain(3, 0.0);
    t.coupling_weights[0][1] = end;     // how strongly the ends listen
    t.coupling_weights[2][1] = end;
    t.coupling_weights[1][0] = center;  // and the center listens back
    t.coupling_weights[1][2] = center;
    return t;
}

void GeneralParams::validate() const {
    const std::size_t n = mu.size();
    if (gamma.size() != n || c.size() != n || lambda.size() != n) {
        throw ValidationError("general params: per-agent vectors differ in length");
    }
    topology.validate();
    if (topology.size() != n) {
        throw ValidationError("general params: topology size does not match agent count");
    }
    require_finite(x0, "x0");
    for (std::size_t i = 0; i < n; ++i) {
        require_finite(gamma[i], "gamma");
        require_finite(mu[i], "mu");
        require_finite(c[i], "c");
        require_finite(lambda[i], "lambda");
        if (!(gamma[i] > 0.0)) throw ValidationError("gamma must be > 0");
        if (!(lambda[i] > 0.0)) throw ValidationError("lambda must be > 0");
    }
}

GeneralParams GeneralParams::from_chain3(const ModelParams& p) {
    p.validate();
    GeneralParams g;
    g.gamma = {p.gamma1, p.gamma2, p.gamma3};
    g.mu = {p.mu1, p.mu2, p.mu3};
    g.c = {p.c1, p.c2, p.c3};
    g.lambda = {p.lambda, p.lambda, p.lambda};
    g.topology = Topology::triad(p.kappa, p.nu);
    g.x0 = p.x0;
    return g;
}

double coupling(double d, double lambda) {
    require_finite(d, "coupling input");
    if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
    const double u = d / lambda;
    return d * std::exp(-0.5 * u * u);
}

double coupling_deriv(double d, double lambda, int order) {
    require_finite(d, "coupling input");
    if (!(lambda > 0.0)) throw ValidationError("lambda must be > 0");
    const double u = d / lambda;
    const double u2 = u * u;
    const double g = std::exp(-0.5 * u2);
    double poly = 0.0;
    switch (order) {
        case 1: poly = 1.0 - u2; break;
        case 2: poly = u * (u2 - 3.0); break;
        case 3: poly = -u2 * u2 + 6.0 * u2 - 3.0; break;
        case 4: poly = u * (u2 * u2 - 10.0 * u2 + 15.0); break;
        default: throw ValidationError("coupling_deriv: order must be 1..4");
    }
    return std::pow(lambda, 1 - order) * poly * g;
}

double paper_deriv(double delta_mu, int order) {
    require_finite(delta_mu, "delta_mu");
    const double m2 = delta_mu * delta_mu;
    const double g = std::exp(-m2 / 8.0);
    switch (order) {
        case 1:
            return 0.5 * (1.0 - m2 / 4.0) * g;
        case 3:
            return (1.0 / 16.0) * (-6.0 + 3.0 * m2 - m2 * m2 / 8.0) * g;
        case 4:
            return (1.0 / 64.0) * (30.0 * delta_mu - 5.0 * delta_mu * m2 +
                                   delta_mu * m2 * m2 / 8.0) * g;
        default:
            throw ValidationError("paper_deriv: order must be 1, 3 or 4");
    }
}

std::vector<double> fj_step(const std::vector<double>& x,
                            const std::vector<double>& x_init,
                            const std::vector<double>& susceptibilities,
                            const std::vector<std::vector<double>>& weights) {
    const std::size_t n = x.size();
    if (x_init.size() != n || susceptibilities.size() != n || weights.size() != n) {
        throw ValidationError("fj_step: dimension mismatch");
    }
    require_finite_state(x, "fj_step");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (weights[i].size() != n) throw ValidationError("fj_step: weight matrix must be square");
        const double a = susceptibilities[i];
        if (!(a >= 0.0 && a <= 1.0)) {
            throw ValidationError("fj_step: susceptibilities must lie in [0, 1]");
        }
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += weights[i][j] * x[j];
        out[i] = a * acc + (1.0 - a) * x_init[i];
    }
    return out;
}

std::vector<double> rhs_general(const std::vector<double>& x, const GeneralParams& p) {
    const std::size_t n = p.size();
    if (x.size() != n) throw ValidationError("rhs_general: state size does not match params");
    require_finite_state(x, "rhs_general");
    std::vector<double> dx(n);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = -p.gamma[i] * (x[i] - p.mu[i]) + p.c[i] * (p.x0 - x[i]);
        const auto& w = p.topology.coupling_weights[i];
        for (std::size_t j = 0; j < n; ++j) {
            if (w[j] != 0.0) acc += w[j] * coupling(x[j] - x[i], p.lambda[i]);
        }
        dx[i] = acc;
    }
    return dx;
}

Vec3 rhs_chain3(const Vec3& x, const ModelParams& p) {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
        throw ValidationError("rhs_chain3: non-finite state");
    }
    const double ke = p.kappa + p.nu;   // ends listening to the center
    const double kc = p.kappa - p.nu;   // center listening to the ends
    Vec3 f;
    f[0] = -p.gamma1 * (x[0] - p.mu1) + ke * coupling(x[1] - x[0], p.lambda) +
           p.c1 * (p.x0 - x[0]);
    f[1] = -p.gamma2 * (x[1] - p.mu2) +
           kc * (coupling(x[0] - x[1], p.lambda) + coupling(x[2] - x[1], p.lambda)) +
           p.c2 * (p.x0 - x[1]);
    f[2] = -p.gamma3 * (x[2] - p.mu3) + ke * coupling(x[1] - x[2], p.lambda) +
           p.c3 * (p.x0 - x[2]);
    return f;
}

RsxState to_rsx(const Vec3& x, double t) {
    RsxState s;
    s.r = x[2] - x[0];
    s.s = x[2] - 2.0 * x[1] + x[0];
    s.xbar = (x[0] + x[1] + x[2]) / 3.0;
    s.t = t;
    return s;
}

Vec3 from_rsx(const RsxState& state) {
    const double x2 = state.xbar - state.s / 3.0;
    const double x1 = state.xbar + state.s / 6.0 - state.r / 2.0;
    const double x3 = state.xbar + state.s / 6.0 + state.r / 2.0;
    return {x1, x2, x3};
}

RsxState rsx_rhs(const RsxState& state, const ModelParams& p) {
    p.validate();
    const double c = p.leader_strength();
    if (p.gamma1 != 1.0 || p.gamma2 != 1.0 || p.gamma3 != 1.0) {
        throw ValidationError("rsx_rhs: reduced form assumes unit self-bias strengths");
    }
    if (p.mu2 != 0.0) {
        throw ValidationError("rsx_rhs: reduced form assumes mu2 = 0");
    }
    const double hp = coupling((state.r + state.s) / 2.0, p.lambda);  // h(x3 - x2)
    const double hm = coupling((state.r - state.s) / 2.0, p.lambda);  // h(x2 - x1)
    RsxState d;
    d.t = state.t;
    d.r = -state.r + (p.mu3 - p.mu1) - (p.kappa + p.nu) * (hp + hm) +
          c * (2.0 * state.xbar + state.s / 3.0 - 2.0 * p.x0);
    d.s = -state.s + (p.mu3 + p.mu1) - (3.0 * p.kappa - p.nu) * (hp - hm) + c * state.r;
    d.xbar = -state.xbar + (p.mu3 + p.mu1) / 3.0 - (2.0 * p.nu / 3.0) * (hp - hm) +
             c * state.r / 3.0;
    return d;
}

Mat3 jacobian_chain3(const Vec3& x, const ModelParams& p) {
    if (!std::isfinite(x[0]) || !std::isfinite(x[1]) || !std::isfinite(x[2])) {
        throw ValidationError("jacobian_chain3: non-finite state");
    }
    const double ke = p.kappa + p.nu;
    const double kc = p.kappa - p.nu;
    const double h21 = coupling_deriv(x[1] - x[0], p.lambda, 1);
    const double h12 = coupling_deriv(x[0] - x[1], p.lambda, 1);
    const double h32 = coupling_deriv(x[2] - x[1], p.lambda, 1);
    const double h23 = coupling_deriv(x[1] - x[2], p.lambda, 1);
    Mat3 J{};
    J[0][0] = -p.gamma1 - ke * h21 - p.c1;
    J[0][1] = ke * h21;
    J[0][2] = 0.0;
    J[1][0] = kc * h12;
    J[1][1] = -p.gamma2 - kc * (h12 + h32) - p.c2;
    J[1][2] = kc * h32;
    J[2][0] = 0.0;
    J[2][1] = ke * h23;
    J[2][2] = -p.gamma3 - ke * h23 - p.c3;
    return J;
}

}  // namespace triadyn
