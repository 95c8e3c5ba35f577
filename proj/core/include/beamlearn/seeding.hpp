// Seed splitting shared by every stochastic component.
//
// A child seed is derived as splitmix64(parent ^ splitmix64(stream + index)), so the
// stream for (run, draw) never depends on how many threads run or in what order.
#pragma once

#include <cstdint>

namespace beamlearn {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class SeedStream : std::uint64_t {
  scenario = 0x1000,
  run = 0x2000,
  permutation = 0x3000,
  selection = 0x4000,
  synthetic = 0x5000,
};

constexpr std::uint64_t derive_seed(std::uint64_t parent, SeedStream stream, std::uint64_t index) {
  return splitmix64(parent ^ splitmix64(static_cast<std::uint64_t>(stream) * 0x100000001b3ULL + index));
}

}  // namespace beamlearn
