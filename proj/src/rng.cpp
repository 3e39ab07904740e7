#include "qfboot/rng.hpp"

namespace qfboot {

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_key(const RngState& state) noexcept {
    std::uint64_t h = splitmix64(state.seed);
    h = splitmix64(h ^ splitmix64(state.stream + 0x632BE59BD9B4E019ULL));
    h = splitmix64(h ^ splitmix64(state.substream + 0x8CB92BA72F3D8DD7ULL));
    return h;
}

Engine make_engine(const RngState& state) { return Engine(derive_key(state)); }

}  // namespace qfboot
