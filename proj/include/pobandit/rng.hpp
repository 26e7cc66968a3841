#pragma once

#include <cstdint>
#include <random>

namespace pobandit {

/// Reproducible random stream keyed by (seed, stream id).
///
/// The engine is mt19937_64 seeded through std::seed_seq with the four 32-bit
/// halves of (seed, stream id); both algorithms are fixed by the standard, so a
/// given key yields the same sequence on every conforming toolchain. Standard
/// normals use the Box-Muller transform and return the cosine branch first,
/// then the cached sine branch. Distribution objects from <random> are
/// avoided since their output is implementation-defined.
///
/// A stream is owned by a single worker and is never shared.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform();

    double standard_normal();

    // Number of standard normals produced so far.
    std::uint64_t normals_drawn() const noexcept { return normals_drawn_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double cached_normal_ = 0.0;
    bool has_cached_ = false;
    std::uint64_t normals_drawn_ = 0;
};

}  // namespace pobandit
