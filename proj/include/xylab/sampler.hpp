#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "xylab/arcset.hpp"
#include "xylab/potential.hpp"
#include "xylab/transfer.hpp"
#include "xylab/wasserstein.hpp"

namespace xylab {

/// splitmix64: tiny splittable generator, full 64-bit state, published
/// constants. The seed fully determines the stream on every platform.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

struct ChainConfig {
    long length = 0;    // coordinates returned
    long burn_in = 0;   // extra leading chain steps generated and dropped
    std::uint64_t seed = 1;

    enum class Start { Stationary, FixedState };
    Start start = Start::Stationary;
    double start_angle = 0.0;  // FixedState only
};

/// A sampled trajectory in coordinate order (x0, x1, ...): the prepend chain
/// generates coordinates last-to-first, so the output is the generated window
/// reversed, with the burn-in portion dropped from the far end.
struct Chain {
    std::vector<double> angles;
    std::uint64_t seed = 0;
    std::vector<std::string> notes;  // degenerate transition rows, start snapping
};

/// Stationary Markov chain of the prepend kernel p(j|s) = e^{g(j,s)}/n: the
/// initial state is drawn from the stationary state masses, each step draws
/// the next cell by inverse CDF and reuses the same uniform for the jitter
/// within the cell, so samples follow the piecewise-constant cell density
/// exactly. Requires a single-node window (arity <= 2).
Chain sample_chain(const EigenSystem& es, const ChainConfig& cfg);

/// Birkhoff average of f along the chain against the Gibbs mean from the
/// eigensystem, with a batch-means standard error.
struct BirkhoffReport {
    double average = 0.0;
    double reference = 0.0;   // integral of f under the Gibbs state
    double std_error = 0.0;   // batch means, 32 batches
    double z_score = 0.0;
    long terms = 0;
};

BirkhoffReport birkhoff_check(const Chain& chain, const Potential& f, const EigenSystem& es);

/// W1 distance (radians) between the empirical coordinate distribution and the
/// stationary cell density.
struct MarginalReport {
    double w1 = 0.0;
    long samples = 0;
};

MarginalReport empirical_vs_marginal(const Chain& chain, const EigenSystem& es);

/// max_s |(P* mu)(s) - mu(s)|: the stationary marginal must be a fixed point
/// of the prepend transition, independent of any sampling.
double stationarity_residual(const EigenSystem& es);

/// Fraction of sliding windows of the chain lying in the set (windows shorter
/// than the set depth at the chain's end are excluded).
double box_frequency(const std::vector<double>& angles, const ArcSet& set);

}  // namespace xylab
