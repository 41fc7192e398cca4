/*
 * (C) Copyright 2026 The EnFF-DA Authors
 *
 * This software is licensed under the terms of the Apache Licence Version 2.0
 * which can be obtained at http://www.apache.org/licenses/LICENSE-2.0.
 */

#include "enff/core/rng.hpp"

namespace enff {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t mix_key(std::uint64_t seed, std::uint64_t step, std::uint64_t member,
                      Purpose purpose) {
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ step);
  h = splitmix64(h ^ (member + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
  return h;
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t step, std::uint64_t member,
                     Purpose purpose)
    : engine_(mix_key(seed, step, member, purpose)) {}

StateVec RngStream::normal_vector(Index d) {
  StateVec v(d);
  for (Index i = 0; i < d; ++i) v[i] = normal();
  return v;
}

}  // namespace enff
