// Copyright (C) 2026 The sparsecue Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sparsecue {

using Engine = std::mt19937_64;

// All randomness descends from one user seed through named substreams, so a
// change to one consumer never shifts the draws seen by another.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream,
                          std::uint64_t a = 0, std::uint64_t b = 0);

inline Engine make_engine(std::uint64_t seed, std::string_view stream,
                          std::uint64_t a = 0, std::uint64_t b = 0) {
  return Engine(derive_seed(seed, stream, a, b));
}

}  // namespace sparsecue
