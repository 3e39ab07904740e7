#pragma once

#include <cstdint>
#include <random>

namespace qfboot {

/// Counter-style address of a random stream. The same (seed, stream,
/// substream) triple always yields the same draw sequence, so Monte Carlo
/// replication `stream` and bootstrap replicate `substream` see identical
/// numbers regardless of which thread runs them.
struct RngState {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    std::uint64_t substream = 0;

    [[nodiscard]] RngState with_stream(std::uint64_t s) const noexcept { return {seed, s, substream}; }
    [[nodiscard]] RngState with_substream(std::uint64_t s) const noexcept { return {seed, stream, s}; }

    friend bool operator==(const RngState&, const RngState&) = default;
};

using Engine = std::mt19937_64;

/// Scrambles the triple through SplitMix64 rounds into a single engine seed.
[[nodiscard]] std::uint64_t derive_key(const RngState& state) noexcept;

[[nodiscard]] Engine make_engine(const RngState& state);

}  // namespace qfboot
