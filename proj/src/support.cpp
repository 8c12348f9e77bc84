//===--- support.cpp - Hashing, random numbers and file helpers -----------===//
//
// Part of the irclone project, under the Apache License v2.0 with LLVM
// Exceptions. See LICENSE file for license information.
// SPDX-License-Identifier: Apache-2.0 WITH LLVM-exception
//
//===----------------------------------------------------------------------===//

#include "irclone/support.h"

#include <atomic>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <unistd.h>

namespace irclone {

std::string fnvHex(std::string_view S) {
  char Buf[17];
  std::snprintf(Buf, sizeof(Buf), "%016llx",
                static_cast<unsigned long long>(fnv1a64(S)));
  return Buf;
}

std::uint64_t splitmix64(std::uint64_t &State) {
  std::uint64_t Z = (State += 0x9e3779b97f4a7c15ULL);
  Z = (Z ^ (Z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  Z = (Z ^ (Z >> 27)) * 0x94d049bb133111ebULL;
  return Z ^ (Z >> 31);
}

std::uint64_t deriveSeed(std::uint64_t Master, std::uint64_t Stream) {
  std::uint64_t S = Master;
  std::uint64_t A = splitmix64(S);
  S = A ^ (Stream * 0xd1b54a32d192ed03ULL);
  return splitmix64(S);
}

std::uint64_t Rng::below(std::uint64_t N) {
  if (N == 0)
    throw std::invalid_argument("Rng::below(0)");
  // Lemire's nearly divisionless method: unbiased, one multiply per draw.
  unsigned __int128 M = static_cast<unsigned __int128>(next()) * N;
  auto Low = static_cast<std::uint64_t>(M);
  if (Low < N) {
    std::uint64_t Threshold = (0 - N) % N;
    while (Low < Threshold) {
      M = static_cast<unsigned __int128>(next()) * N;
      Low = static_cast<std::uint64_t>(M);
    }
  }
  return static_cast<std::uint64_t>(M >> 64);
}

std::string readFile(const std::filesystem::path &P) {
  std::ifstream In(P, std::ios::binary);
  if (!In)
    throw std::runtime_error("cannot read '" + P.string() + "'");
  std::ostringstream SS;
  SS << In.rdbuf();
  return SS.str();
}

void writeFileAtomic(const std::filesystem::path &P, std::string_view Data) {
  static std::atomic<unsigned> Counter{0};
  std::filesystem::path Dir = P.parent_path();
  if (!Dir.empty())
    std::filesystem::create_directories(Dir);
  std::filesystem::path Tmp = P;
  Tmp += ".tmp." + std::to_string(::getpid()) + "." +
         std::to_string(Counter++);
  {
    std::ofstream Out(Tmp, std::ios::binary | std::ios::trunc);
    if (!Out)
      throw std::runtime_error("cannot write '" + Tmp.string() + "'");
    Out.write(Data.data(), static_cast<std::streamsize>(Data.size()));
    if (!Out)
      throw std::runtime_error("short write to '" + Tmp.string() + "'");
  }
  std::error_code EC;
  std::filesystem::rename(Tmp, P, EC);
  if (EC) {
    std::filesystem::remove(Tmp);
    throw std::runtime_error("cannot rename into '" + P.string() +
                             "': " + EC.message());
  }
}

} // namespace irclone
