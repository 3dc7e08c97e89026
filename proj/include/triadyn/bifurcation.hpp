#ifndef TRIADYN_BIFURCATION_HPP
#define TRIADYN_BIFURCATION_HPP

#include <string>
#include <utility>
#include <vector>

#include "triadyn/model.hpp"

namespace triadyn {

// Imperfect-pitchfork reduction of the asymmetry dynamics,
// ds/dtau = A + R s - s^3 after rescaling time by tau_scale.
struct NormalForm {
    double A = 0.0;          // imperfection term, proportional to the leader strength
    double R = 0.0;          // linear coefficient
    double tau_scale = 0.0;  // (1/24)(3 kappa - nu) h'''(r/2)
    double r_used = 0.0;
    DerivConvention convention = DerivConvention::PaperComposite;
};

enum class BoundaryKind { K1, K2, K3, K4 };

const char* to_string(BoundaryKind k);

struct BoundaryParams {
    double c = 0.0;
    double x0 = 0.0;
    double nu = 0.0;
    DerivConvention convention = DerivConvention::PaperComposite;
};

struct BoundaryCurve {
    BoundaryKind kind = BoundaryKind::K1;
    std::vector<std::pair<double, double>> points;  // (dmu, kappa), dmu ascending
    BoundaryParams params;
};

struct DmuRange {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t n = 0;

    void validate() const;
    std::vector<double> grid() const;
};

// First-order correction theta to the symmetric high-discord equilibrium,
// r* = dmu + theta. Throws SingularityError when the expansion denominator
// 1 + (kappa + nu) h'(dmu/2) vanishes (|den| <= 1e-8).
double theta_shd(double delta_mu, const ModelParams& p, DerivConvention conv);

// Normal-form coefficients at frozen discord r. Throws SingularityError when
// the time rescaling factor vanishes (|tau_scale| < 1e-12).
NormalForm normal_form(double r, const ModelParams& p, DerivConvention conv);

// Discriminant of a x^3 + b x^2 + c x + d; positive iff three distinct
// real roots, negative iff one real root.
double cubic_discriminant(double a, double b, double c, double d);

// Fold of the SHD branch: smallest kappa > 0 where the discriminant of the
// leader-perturbed pitchfork vanishes, with theta evaluated self-consistently
// at each kappa. Solved by a bracketed bisection plus a secant polish.
double kappa1(double delta_mu, const ModelParams& p, DerivConvention conv);

// Saddle-node of the majority-rule branch (closed form).
double kappa2(double delta_mu, double c, double x0);

// Degenerate-cubic boundary of the reduced asymmetry equation (closed form).
double kappa3(double delta_mu, double c, double x0, double nu);

// kappa1..kappa3 sampled over a dmu grid. Points where a boundary is
// undefined are skipped and noted in skip_log; an entirely empty result
// throws NoRootError.
std::vector<BoundaryCurve> boundary_curves(const DmuRange& range, const ModelParams& p,
                                           DerivConvention conv,
                                           std::vector<std::string>* skip_log = nullptr);

}  // namespace triadyn

#endif
