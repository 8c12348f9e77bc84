//===--- support.h - Hashing, random numbers and file helpers ---*- C++ -*-===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//
///
/// \file
/// Small utilities shared by the pipeline stages. The random number helpers
/// avoid std::uniform_int_distribution and std::shuffle so that sampled
/// splits and Monte-Carlo estimates are identical across standard library
/// implementations.
///
//===----------------------------------------------------------------------===//

#ifndef IRCLONE_SUPPORT_H
#define IRCLONE_SUPPORT_H

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace irclone {

/// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view S,
                                std::uint64_t H = 0xcbf29ce484222325ULL) {
  for (unsigned char C : S) {
    H ^= C;
    H *= 0x100000001b3ULL;
  }
  return H;
}

/// Hex rendering of fnv1a64, 16 digits.
std::string fnvHex(std::string_view S);

/// One step of the SplitMix64 generator; advances `State`.
std::uint64_t splitmix64(std::uint64_t &State);

/// Independent seed for sub-stream `Stream` of a master seed.
std::uint64_t deriveSeed(std::uint64_t Master, std::uint64_t Stream);

class Rng {
public:
  explicit Rng(std::uint64_t Seed) : Engine(Seed) {}

  std::uint64_t next() { return Engine(); }

  /// Uniform integer in [0, N); N must be positive.
  std::uint64_t below(std::uint64_t N);

  /// Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  template <typename T> void shuffle(std::vector<T> &V) {
    for (std::size_t I = V.size(); I > 1; --I)
      std::swap(V[I - 1], V[below(I)]);
  }

  /// `K` distinct elements of `V` in random order (partial Fisher-Yates).
  template <typename T>
  std::vector<T> sample(std::vector<T> V, std::size_t K) {
    for (std::size_t I = 0; I < K && I < V.size(); ++I)
      std::swap(V[I], V[I + below(V.size() - I)]);
    V.resize(std::min(K, V.size()));
    return V;
  }

private:
  std::mt19937_64 Engine;
};

std::string readFile(const std::filesystem::path &P);

/// Writes through a temporary sibling and renames it into place.
void writeFileAtomic(const std::filesystem::path &P, std::string_view Data);

} // namespace irclone

#endif // IRCLONE_SUPPORT_H
