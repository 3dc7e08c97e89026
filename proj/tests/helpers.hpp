#ifndef TRIADYN_TESTS_HELPERS_HPP
#define TRIADYN_TESTS_HELPERS_HPP

#include <cstdint>
#include <random>

namespace testutil {

// Deterministic uniform draw; avoids distribution objects so sequences are
// identical across standard library implementations.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    double uniform(double lo, double hi) {
        const double u = static_cast<double>(gen_() >> 11) * 0x1.0p-53;
        return lo + (hi - lo) * u;
    }

    std::uint64_t next() { return gen_(); }

  private:
    std::mt19937_64 gen_;
};

}  // namespace testutil

#endif
