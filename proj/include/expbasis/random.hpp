#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace expbasis {

// Independent stream for trial t of a run seeded with seed; the draw of a
// trial never depends on which thread executes it.
std::mt19937_64 trial_stream(std::uint64_t seed, std::uint64_t trial);

// Uniform on the complex unit sphere of C^dim.
Eigen::VectorXcd random_unit_vector(std::mt19937_64& rng, Eigen::Index dim);

}  // namespace expbasis
