#pragma once

#include <cstdint>
#include <functional>
#include <random>

#include "freespectra/nc_core.hpp"

namespace freespectra {

// splitmix64 finalizer; used to derive independent stream seeds
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t counter) {
    return mix64(mix64(master) ^ mix64(counter + 0x632be59bd9b4e019ULL));
}

// One stream per (master seed, task counter); results do not depend on
// how tasks are scheduled across threads.
class Rng {
public:
    explicit Rng(std::uint64_t master, std::uint64_t counter = 0) : eng_(derive_seed(master, counter)) {}

    double normal() { return normal_(eng_); }
    double uniform() { return uniform_(eng_); }
    double uniform(double a, double b) { return a + (b - a) * uniform_(eng_); }
    cplx cnormal() {
        double re = normal(), im = normal();
        return {re / std::sqrt(2.0), im / std::sqrt(2.0)};
    }
    std::uint64_t bits() { return eng_(); }

    Mat gaussian(Eigen::Index r, Eigen::Index c);
    Vec unit_vector(Eigen::Index n);
    Mat unitary(Eigen::Index n);
    MatrixTuple tuple(int g, Eigen::Index n);

private:
    std::mt19937_64 eng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

// Worker count from FREESPECTRA_THREADS, else hardware concurrency.
unsigned thread_budget();

// Runs body(i) for i in [0, n); body must only write to slot i of its output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace freespectra
