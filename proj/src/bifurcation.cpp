#include "triadyn/bifurcation.hpp"

#include <cmath>
#include <optional>
#include <sstream>

#include "triadyn/errors.hpp"

namespace triadyn {

namespace {

// Order-n derivative of the coupling under the requested convention. The
// composite convention folds in the (1/2)^n from differentiating h(dmu/2)
// with respect to dmu.
double conv_deriv(double u, double lambda, int order, DerivConvention conv) {
    double v = coupling_deriv(u, lambda, order);
    if (conv == DerivConvention::PaperComposite) v *= std::pow(0.5, order);
    return v;
}

// Discriminant-vanishing condition for the fold of the symmetric branch,
// -32 (1 + (3k - nu) H1)^3 - 9 C^2 (dmu + theta)^2 (3k - nu) H3, with the
// derivatives H1, H3 corrected to first order in theta.
double kappa1_residual(double kappa, double delta_mu, const ModelParams& tpl,
                       DerivConvention conv) {
    ModelParams p = tpl;
    p.kappa = kappa;
    const double th = theta_shd(delta_mu, p, conv);
    const double u = delta_mu / 2.0;
    const double h1 = conv_deriv(u, p.lambda, 1, conv) +
                      conv_deriv(u, p.lambda, 2, conv) * th / 2.0;
    const double h3 = conv_deriv(u, p.lambda, 3, conv) +
                      conv_deriv(u, p.lambda, 4, conv) * th / 2.0;
    const double k3nu = 3.0 * kappa - p.nu;
    const double lin = 1.0 + k3nu * h1;
    const double c = p.c1;
    const double dt = delta_mu + th;
    return -32.0 * lin * lin * lin - 9.0 * c * c * dt * dt * k3nu * h3;
}

}  // namespace

const char* to_string(BoundaryKind k) {
    switch (k) {
        case BoundaryKind::K1: return "k1";
        case BoundaryKind::K2: return "k2";
        case BoundaryKind::K3: return "k3";
        case BoundaryKind::K4: return "k4";
    }
    return "k?";
}

void DmuRange::validate() const {
    if (!(lo > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
        throw ValidationError("dmu range must be positive and finite");
    }
    if (hi < lo) throw ValidationError("dmu range upper end below lower end");
    if (n < 1) throw ValidationError("dmu range needs at least one point");
    if (n == 1 && hi != lo) throw ValidationError("single-point dmu range must have hi == lo");
}

std::vector<double> DmuRange::grid() const {
    validate();
    std::vector<double> g(n);
    if (n == 1) {
        g[0] = lo;
        return g;
    }
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + step * static_cast<double>(i);
    g.back() = hi;
    return g;
}

double theta_shd(double delta_mu, const ModelParams& p, DerivConvention conv) {
    p.validate();
    if (!(delta_mu > 0.0)) throw ValidationError("theta_shd: delta_mu must be > 0");
    const double c = p.leader_strength();
    const double ke = p.kappa + p.nu;
    const double den = 1.0 + ke * conv_deriv(delta_mu / 2.0, p.lambda, 1, conv);
    if (std::abs(den) <= 1e-8) {
        std::ostringstream msg;
        msg << "theta_shd: expansion denominator vanishes at dmu = " << delta_mu
            << ", kappa = " << p.kappa;
        throw SingularityError(msg.str());
    }
    return -(2.0 * c * p.x0 + 2.0 * ke * coupling(delta_mu / 2.0, p.lambda)) / den;
}

NormalForm normal_form(double r, const ModelParams& p, DerivConvention conv) {
    p.validate();
    if (!std::isfinite(r)) throw ValidationError("normal_form: r must be finite");
    const double c = p.leader_strength();
    const double k3nu = 3.0 * p.kappa - p.nu;
    const double tau = k3nu * conv_deriv(r / 2.0, p.lambda, 3, conv) / 24.0;
    if (std::abs(tau) < 1e-12) {
        std::ostringstream msg;
        msg << "normal_form: time rescaling factor vanishes at r = " << r
            << ", kappa = " << p.kappa;
        throw SingularityError(msg.str());
    }
    NormalForm nf;
    nf.tau_scale = tau;
    nf.A = c * r / tau;
    nf.R = -(1.0 + k3nu * conv_deriv(r / 2.0, p.lambda, 1, conv)) / tau;
    nf.r_used = r;
    nf.convention = conv;
    return nf;
}

double cubic_discriminant(double a, double b, double c, double d) {
    if (a == 0.0) throw ValidationError("cubic_discriminant: leading coefficient is zero");
    return b * b * c * c - 4.0 * a * c * c * c - 4.0 * b * b * b * d -
           27.0 * a * a * d * d + 18.0 * a * b * c * d;
}

double kappa1(double delta_mu, const ModelParams& p, DerivConvention conv) {
    p.validate();
    if (!(delta_mu > 0.0)) throw ValidationError("kappa1: delta_mu must be > 0");
    (void)p.leader_strength();

    // Probe a log-spaced grid for the first sign change, skipping kappas where
    // the theta expansion itself is singular.
    constexpr double kLo = 0.05;
    constexpr double kHi = 50.0;
    constexpr int kProbes = 200;
    double prev_k = 0.0;
    double prev_v = 0.0;
    bool have_prev = false;
    for (int i = 0; i < kProbes; ++i) {
        const double k = kLo * std::pow(kHi / kLo, static_cast<double>(i) / (kProbes - 1));
        double v;
        try {
            v = kappa1_residual(k, delta_mu, p, conv);
        } catch (const SingularityError&) {
            have_prev = false;
            continue;
        }
        if (!std::isfinite(v)) {
            have_prev = false;
            continue;
        }
        if (v == 0.0) return k;
        if (have_prev && prev_v * v < 0.0) {
            // A sign change can also come from a pole of theta, so the refined
            // point is accepted only when the residual genuinely collapses.
            auto refine = [&](double a, double b, double fa,
                              double fb) -> std::optional<double> {
                const double f_edge = std::min(std::abs(fa), std::abs(fb));
                try {
                    for (int it = 0; it < 200 && (b - a) > 4e-16 * std::max(1.0, b); ++it) {
                        const double mid = 0.5 * (a + b);
                        const double fm = kappa1_residual(mid, delta_mu, p, conv);
                        if (fm == 0.0) return mid;
                        if (fa * fm < 0.0) {
                            b = mid;
                            fb = fm;
                        } else {
                            a = mid;
                            fa = fm;
                        }
                    }
                    // Secant polish inside the final bracket.
                    double best = std::abs(fa) <= std::abs(fb) ? a : b;
                    double fbest = std::abs(fa) <= std::abs(fb) ? fa : fb;
                    double x0 = a, f0 = fa, x1 = b, f1 = fb;
                    for (int it = 0; it < 3 && f1 != f0; ++it) {
                        const double x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
                        if (!(x2 >= a && x2 <= b)) break;
                        const double f2 = kappa1_residual(x2, delta_mu, p, conv);
                        x0 = x1;
                        f0 = f1;
                        x1 = x2;
                        f1 = f2;
                        if (std::abs(f2) < std::abs(fbest)) {
                            best = x2;
                            fbest = f2;
                        }
                    }
                    if (std::abs(fbest) <= 1e-9 * std::max(1.0, f_edge)) return best;
                } catch (const SingularityError&) {
                }
                return std::nullopt;
            };
            if (const auto root = refine(prev_k, k, prev_v, v)) return *root;
        }
        prev_k = k;
        prev_v = v;
        have_prev = true;
    }
    std::ostringstream msg;
    msg << "kappa1: no sign change of the fold condition for kappa in [" << kLo << ", "
        << kHi << "] at dmu = " << delta_mu;
    throw NoRootError(msg.str());
}

double kappa2(double delta_mu, double c, double x0) {
    if (!(delta_mu > 0.0)) throw ValidationError("kappa2: delta_mu must be > 0");
    if (!std::isfinite(c) || !std::isfinite(x0)) {
        throw ValidationError("kappa2: parameters must be finite");
    }
    const double q = (8.0 + 11.0 * c) * delta_mu;
    if (q == 0.0 || q + 8.0 == 0.0) {
        throw SingularityError("kappa2: degenerate asymmetry estimate");
    }
    const double s = 1.5 + 12.0 / q;
    const double num = (1.0 + 11.0 * c / 8.0) * delta_mu - 2.0 * c * x0 - (4.0 / 3.0) * s;
    return num / (4.0 * s) * std::exp(2.0 * s * s / 9.0);
}

double kappa3(double delta_mu, double c, double x0, double nu) {
    if (!(delta_mu > 0.0)) throw ValidationError("kappa3: delta_mu must be > 0");
    if (!std::isfinite(c) || !std::isfinite(x0) || !std::isfinite(nu)) {
        throw ValidationError("kappa3: parameters must be finite");
    }
    // Pitchfork condition solved at the approximate discord r = 2 + 4/(3 dmu).
    const double r = 2.0 + 4.0 / (3.0 * delta_mu);
    return (delta_mu - r - 2.0 * c * x0) / r * std::exp(r * r / 8.0) - nu;
}

std::vector<BoundaryCurve> boundary_curves(const DmuRange& range, const ModelParams& p,
                                           DerivConvention conv,
                                           std::vector<std::string>* skip_log) {
    range.validate();
    p.validate();
    const double c = p.leader_strength();
    const BoundaryParams bp{c, p.x0, p.nu, conv};
    std::vector<BoundaryCurve> curves = {
        {BoundaryKind::K1, {}, bp},
        {BoundaryKind::K2, {}, bp},
        {BoundaryKind::K3, {}, bp},
    };
    auto log_skip = [&](BoundaryKind kind, double dmu, const char* what) {
        if (!skip_log) return;
        std::ostringstream msg;
        msg << to_string(kind) << " skipped at dmu = " << dmu << ": " << what;
        skip_log->push_back(msg.str());
    };
    for (double dmu : range.grid()) {
        try {
            curves[0].points.emplace_back(dmu, kappa1(dmu, p, conv));
        } catch (const Error& e) {
            log_skip(BoundaryKind::K1, dmu, e.what());
        }
        try {
            curves[1].points.emplace_back(dmu, kappa2(dmu, c, p.x0));
        } catch (const Error& e) {
            log_skip(BoundaryKind::K2, dmu, e.what());
        }
        try {
            curves[2].points.emplace_back(dmu, kappa3(dmu, c, p.x0, p.nu));
        } catch (const Error& e) {
            log_skip(BoundaryKind::K3, dmu, e.what());
        }
    }
    if (curves[0].points.empty() && curves[1].points.empty() && curves[2].points.empty()) {
        throw NoRootError("boundary_curves: no boundary point could be computed on the grid");
    }
    return curves;
}

}  // namespace triadyn
