#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace graphguard {

// Error kinds surfaced by the pipeline. Everything derives from Error so
// callers can catch one base and still report the stage that failed.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ConfigError : Error {
    using Error::Error;
};
struct DataError : Error {
    using Error::Error;
};
struct ShapeError : Error {
    using Error::Error;
};
struct NumericError : Error {
    using Error::Error;
};
struct TrainError : Error {
    using Error::Error;
};
struct EvalError : Error {
    using Error::Error;
};

// Combines a base seed with a stream id into an independent sub-seed
// (splitmix64 finalizer). Used to split per-graph RNG streams.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Deterministic random source. mt19937_64 output is fixed by the standard;
// the helpers below avoid std::uniform_*_distribution, whose mapping is
// implementation-defined, so identical seeds give identical streams on
// every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n). Rejection sampling keeps it unbiased.
    std::int64_t uniform_int(std::int64_t n);

    // Standard normal via Box-Muller (no cached spare, to keep the stream
    // position a simple function of the call count).
    double normal();
    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    bool bernoulli(double p) { return uniform() < p; }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::int64_t i = static_cast<std::int64_t>(v.size()) - 1; i > 0; --i) {
            std::int64_t j = uniform_int(i + 1);
            std::swap(v[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(j)]);
        }
    }

    // k distinct values from {0, ..., n-1}, order random.
    std::vector<int> sample_without_replacement(int n, int k);

private:
    std::mt19937_64 engine_;
};

// Shortest decimal form that parses back to the same double. Used for all
// emitted CSV/JSON numbers so reports are byte-stable.
std::string format_double(double x);

}  // namespace graphguard
