#ifndef TRIADYN_MODEL_HPP
#define TRIADYN_MODEL_HPP

#include <array>
#include <cstddef>
#include <string>
#include <vector>

namespace triadyn {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

// Derivative convention used by the boundary formulas. The closed-form
// expressions are written in terms of derivatives of h(dmu/2) with respect
// to dmu, which carry a factor (1/2)^n relative to the plain analytic
// derivative h^(n) evaluated at dmu/2. "paper" selects the former, "true"
// the latter.
enum class DerivConvention { TrueDerivative, PaperComposite };

const char* to_string(DerivConvention conv);
DerivConvention parse_convention(const std::string& name);

// Parameters of the three-agent chain with an external leader at x0.
// End agents couple to the center with strength kappa + nu, the center
// couples back with kappa - nu.
struct ModelParams {
    double kappa = 0.0;  // uniform coupling strength, >= 0
    double nu = 0.0;     // end/center coupling asymmetry
    double c1 = 0.0;     // leadership strengths
    double c2 = 0.0;
    double c3 = 0.0;
    double x0 = 0.0;     // leader opinion
    double mu1 = 0.0;    // natural biases
    double mu2 = 0.0;
    double mu3 = 0.0;
    double gamma1 = 1.0;  // self-bias strengths, > 0
    double gamma2 = 1.0;
    double gamma3 = 1.0;
    double lambda = 1.0;  // attention width of the coupling, > 0

    double delta_mu() const { return mu3 - mu1; }
    bool has_leader() const { return c1 != 0.0 || c2 != 0.0 || c3 != 0.0; }
    // True when the leadership strengths follow the antisymmetric pattern
    // (C, 0, -C) the reduced equations assume.
    bool has_leader_pattern() const { return c2 == 0.0 && c1 == -c3; }
    // C of the (C, 0, -C) pattern; throws ValidationError otherwise.
    double leader_strength() const;

    void validate() const;

    // Symmetric biases (-dmu/2, 0, dmu/2) with pattern (C, 0, -C).
    static ModelParams canonical(double delta_mu, double kappa, double leader_c = 0.0,
                                 double x0 = 0.0, double nu = 0.0);
};

struct OpinionState {
    Vec3 x{};
    double t = 0.0;
};

// Transformed coordinates: r = x3 - x1 (discord), s = x3 - 2 x2 + x1
// (asymmetry of the center), xbar = mean opinion.
struct RsxState {
    double r = 0.0;
    double s = 0.0;
    double xbar = 0.0;
    double t = 0.0;
};

// Arbitrary interaction graph for the general right-hand side.
struct Topology {
    std::vector<std::vector<int>> adjacency;            // 0/1, zero diagonal
    std::vector<std::vector<double>> coupling_weights;  // k_ij >= 0, zero off the graph

    std::size_t size() const { return adjacency.size(); }
    void validate() const;

    static Topology chain(std::size_t n, double kappa);
    // The 3-chain with end weights kappa + nu and center weights kappa - nu.
    static Topology triad(double kappa, double nu);
};

// Per-agent parameters for the general N-agent system.
struct GeneralParams {
    std::vector<double> gamma;
    std::vector<double> mu;
    std::vector<double> c;
    std::vector<double> lambda;
    Topology topology;
    double x0 = 0.0;

    std::size_t size() const { return mu.size(); }
    void validate() const;

    static GeneralParams from_chain3(const ModelParams& p);
};

// Saturating attention kernel h(d) = d exp(-d^2 / (2 lambda^2)).
double coupling(double d, double lambda);

// Analytic derivative h^(order)(d) for order 1..4.
double coupling_deriv(double d, double lambda, int order);

// Derivative of h(dmu/2) with respect to dmu at lambda = 1, i.e.
// (1/2)^order * h^(order)(dmu/2), for order 1, 3 or 4. These are the
// composite forms the boundary formulas quote.
double paper_deriv(double delta_mu, int order);

// One synchronous step of the discrete bounded-confidence baseline:
// x_i <- a_i * sum_j w_ij x_j + (1 - a_i) * x_init_i.
std::vector<double> fj_step(const std::vector<double>& x,
                            const std::vector<double>& x_init,
                            const std::vector<double>& susceptibilities,
                            const std::vector<std::vector<double>>& weights);

std::vector<double> rhs_general(const std::vector<double>& x, const GeneralParams& p);

Vec3 rhs_chain3(const Vec3& x, const ModelParams& p);

RsxState to_rsx(const Vec3& x, double t = 0.0);
Vec3 from_rsx(const RsxState& state);

// Right-hand side of the chain dynamics in (r, s, xbar) coordinates.
// Requires unit self-bias strengths, mu2 = 0 and the (C, 0, -C) pattern;
// outside that family the printed reduced form is not the push-forward
// of rhs_chain3.
RsxState rsx_rhs(const RsxState& state, const ModelParams& p);

Mat3 jacobian_chain3(const Vec3& x, const ModelParams& p);

}  // namespace triadyn

#endif
