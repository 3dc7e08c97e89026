#ifndef TRIADYN_CUBIC_HPP
#define TRIADYN_CUBIC_HPP

#include <array>
#include <complex>

namespace triadyn {

// All roots of a x^3 + b x^2 + c x + d with a != 0. Real roots come first,
// sorted ascending; a conjugate pair keeps the positive-imaginary root last.
std::array<std::complex<double>, 3> solve_cubic(double a, double b, double c, double d);

}  // namespace triadyn

#endif
