#pragma once

#include <cstdint>
#include <random>

namespace ftlab {

/// SplitMix64 finalizer; a bijective 64-bit mixer.
constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed for task `index` of stream `stream` under a master seed. Every
/// Monte Carlo draw gets its own engine seeded this way, so results do not
/// depend on which thread ran the draw.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream,
                                    std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stream)) + index);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::uint64_t stream,
                          std::uint64_t index) {
  return Engine(derive_seed(master, stream, index));
}

/// Stream identifiers, kept distinct so different uses of one master seed
/// never share a generator.
namespace streams {
inline constexpr std::uint64_t field_draw = 1;
inline constexpr std::uint64_t xi_draw = 2;
inline constexpr std::uint64_t synthetic_phase = 3;
inline constexpr std::uint64_t regularity = 4;
}  // namespace streams

}  // namespace ftlab
