#pragma once

#include <cstdint>

namespace depstat::mc {

/// Identifies one reproducible random stream. Identical (root_seed,
/// stream_id) yields bit-identical output regardless of thread count.
struct SeedSpec {
    std::uint64_t root_seed = 0;
    std::uint64_t stream_id = 0;

    SeedSpec substream(std::uint64_t id) const { return {root_seed, stream_id ^ (id * 0x9e3779b97f4a7c15ULL)}; }
};

/// Counter-based splittable generator: the state is derived by hashing
/// (root_seed, stream_id, counter) so any row of a panel can be generated
/// independently of scheduling order. Within one counter the generator walks
/// a splitmix64 sequence.
class Rng {
public:
    Rng(const SeedSpec& seed, std::uint64_t counter);

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1).
    double uniform();

    /// Standard normal via inverse-cdf of uniform().
    double normal();

    /// Gamma(shape, 1) by Marsaglia-Tsang; shape > 0.
    double gamma(double shape);

    /// Chi-square with nu > 0 degrees of freedom.
    double chi_square(double nu) { return 2.0 * gamma(0.5 * nu); }

private:
    std::uint64_t state_;
};

}  // namespace depstat::mc
