#include "expbasis/random.hpp"

#include <cmath>
#include <complex>

namespace expbasis {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
    return std::mt19937_64(splitmix64(splitmix64(seed) ^ trial));
}

Eigen::VectorXcd random_unit_vector(std::mt19937_64& rng, Eigen::Index dim) {
    // Box-Muller on raw 53-bit uniforms, so the stream does not depend on the
    // standard library's distribution implementations.
    auto uniform = [&rng] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    Eigen::VectorXcd v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * 3.14159265358979323846 * uniform();
        v(i) = std::polar(r, t);
    }
    return v / v.norm();
}

}  // namespace expbasis
