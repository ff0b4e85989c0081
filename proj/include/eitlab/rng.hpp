#pragma once

#include <cstdint>

// Counter-based randomness: every random quantity in the project is a pure
// keyed hash of (seed, domain tag, coordinates).  No generator state is
// carried around, so any value can be recomputed in isolation and streaming
// vs random access agree bit for bit.

namespace eitlab::rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

// splitmix64 finalizer; full avalanche on 64 bits
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// absorb one word into a running state (sponge-like, one mix per word)
inline constexpr std::uint64_t absorb(std::uint64_t state, std::uint64_t v) noexcept {
  return mix64(state + kGolden + v);
}

inline constexpr std::uint64_t hash2(std::uint64_t seed, std::uint64_t a,
                                     std::uint64_t b) noexcept {
  return absorb(absorb(absorb(seed, a), b), 0);
}

inline constexpr std::uint64_t hash3(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c) noexcept {
  return absorb(absorb(absorb(absorb(seed, a), b), c), 0);
}

inline constexpr std::uint64_t hash4(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                                     std::uint64_t c, std::uint64_t d) noexcept {
  return absorb(absorb(absorb(absorb(absorb(seed, a), b), c), d), 0);
}

// domain tags; distinct consumers never share a hash stream
namespace tag {
inline constexpr std::uint64_t kSpin = 0x73'70'69'6eull;         // fresh vertex spins
inline constexpr std::uint64_t kOffsetDigit = 0x6f'66'66'73ull;  // stationary offset digits
inline constexpr std::uint64_t kSample = 0x73'6d'70'6cull;       // per-sample sub-seeds
inline constexpr std::uint64_t kPairA = 0x70'72'61'61ull;        // first path of a pair
inline constexpr std::uint64_t kPairB = 0x70'72'62'62ull;        // second path of a pair
inline constexpr std::uint64_t kWalkW = 0x77'77'77'30ull;        // first half-coordinate walk
inline constexpr std::uint64_t kWalkWs = 0x77'77'77'31ull;       // second half-coordinate walk
inline constexpr std::uint64_t kEdge = 0x65'64'67'65ull;         // percolation edge status
inline constexpr std::uint64_t kSite = 0x73'69'74'65ull;         // percolation site status
inline constexpr std::uint64_t kStep = 0x73'74'65'70ull;         // lattice walk steps
inline constexpr std::uint64_t kReplica = 0x72'65'70'6cull;      // replica sub-seeds
inline constexpr std::uint64_t kSrw = 0x73'72'77'30ull;          // simple-walk steps
}  // namespace tag

// derive an independent sub-seed (new domain) from a parent seed
inline constexpr std::uint64_t subseed(std::uint64_t seed, std::uint64_t domain_tag,
                                       std::uint64_t index) noexcept {
  return hash2(seed, domain_tag, index);
}

// uniform double in [0,1) from a hash word, 53-bit resolution
inline constexpr double u01(std::uint64_t h) noexcept {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// uniform integer in [0,n); bias is O(2^-64), fine for n in the millions
inline constexpr std::uint32_t uniform_below(std::uint64_t h, std::uint32_t n) noexcept {
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(h) * n) >> 64);
}

// fair +/-1 from the top bit
inline constexpr int sign_bit(std::uint64_t h) noexcept {
  return (h >> 63) ? -1 : 1;
}

}  // namespace eitlab::rng
