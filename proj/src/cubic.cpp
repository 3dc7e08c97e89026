#include "triadyn/cubic.hpp"

#include <algorithm>
#include <cmath>

#include "triadyn/errors.hpp"

namespace triadyn {

namespace {

// A couple of Newton steps on the monic cubic tighten whichever branch
// produced the root. Conjugate inputs stay exactly conjugate because all
// operations commute with conjugation.
std::complex<double> polish(std::complex<double> z, double p, double q, double r) {
    for (int it = 0; it < 3; ++it) {
        const std::complex<double> f = ((z + p) * z + q) * z + r;
        const std::complex<double> df = (3.0 * z + 2.0 * p) * z + q;
        if (std::abs(df) < 1e-300) break;
        const std::complex<double> step = f / df;
        if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
        z -= step;
    }
    return z;
}

}  // namespace

std::array<std::complex<double>, 3> solve_cubic(double a, double b, double c, double d) {
    if (a == 0.0) throw ValidationError("solve_cubic: leading coefficient is zero");
    for (double v : {a, b, c, d}) {
        if (!std::isfinite(v)) throw ValidationError("solve_cubic: non-finite coefficient");
    }
    const double p = b / a;
    const double q = c / a;
    const double r = d / a;

    // Depressed form t^3 + A t + B with x = t - p/3.
    const double ofs = p / 3.0;
    const double A = q - p * p / 3.0;
    const double B = (2.0 * p * p / 27.0 - q / 3.0) * p + r;

    std::array<std::complex<double>, 3> roots;
    const double disc = -(4.0 * A * A * A + 27.0 * B * B);
    if (disc >= 0.0) {
        // Three real roots via the trigonometric branch.
        if (A == 0.0) {
            roots.fill(std::complex<double>(-ofs, 0.0));
        } else {
            const double m = 2.0 * std::sqrt(-A / 3.0);
            const double cosarg = std::clamp(3.0 * B / (A * m), -1.0, 1.0);
            const double phi = std::acos(cosarg);
            for (int k = 0; k < 3; ++k) {
                const double t = m * std::cos((phi - 2.0 * M_PI * k) / 3.0);
                roots[k] = std::complex<double>(t - ofs, 0.0);
            }
        }
    } else {
        // One real root via Cardano, picking the larger-magnitude cube root
        // to avoid cancellation.
        const double S = std::sqrt(B * B / 4.0 + A * A * A / 27.0);
        const double u = std::cbrt(B > 0.0 ? -B / 2.0 - S : -B / 2.0 + S);
        const double v = (u != 0.0) ? -A / (3.0 * u) : 0.0;
        const double t0 = u + v;
        const double re = -t0 / 2.0;
        const double im = std::sqrt(3.0) / 2.0 * std::abs(u - v);
        roots[0] = std::complex<double>(t0 - ofs, 0.0);
        roots[1] = std::complex<double>(re - ofs, -im);
        roots[2] = std::complex<double>(re - ofs, im);
    }

    for (auto& z : roots) z = polish(z, p, q, r);

    // Keep real roots exactly real after polishing.
    for (auto& z : roots) {
        if (z.imag() == 0.0) z = std::complex<double>(z.real(), 0.0);
    }
    std::sort(roots.begin(), roots.end(), [](const auto& lhs, const auto& rhs) {
        const bool lr = lhs.imag() == 0.0;
        const bool rr = rhs.imag() == 0.0;
        if (lr != rr) return lr;
        if (lhs.real() != rhs.real()) return lhs.real() < rhs.real();
        return lhs.imag() < rhs.imag();
    });
    return roots;
}

}  // namespace triadyn
