//------------------------------------------------------------------------------
//
//   Copyright 2026 The regunc Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace regunc {

/// Counter-based generator: the i-th draw of a stream is a pure function of
/// (key, i). Streams are keyed by hashing a user seed with a stream id such
/// as a voxel index or trial number, so results never depend on evaluation
/// order or thread count.
class CounterRng
{
public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept
    : key_(Mix(Mix(seed) ^ (stream + 0x632BE59BD9B4E019ULL)))
  {}

  static constexpr std::uint64_t Mix(std::uint64_t z) noexcept
  {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t NextU64() noexcept
  {
    ++counter_;
    return Mix(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double NextUniform() noexcept
  {
    return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1].
  double NextOpenUniform() noexcept
  {
    return (static_cast<double>(NextU64() >> 11) + 1.0) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n) by rejection, n > 0.
  std::uint64_t NextBelow(std::uint64_t n) noexcept
  {
    std::uint64_t const limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t       v;
    do
    {
      v = NextU64();
    } while (v >= limit);
    return v % n;
  }

  /// Standard normal via Box-Muller; the second variate is discarded so each
  /// call consumes exactly two counters.
  double NextNormal() noexcept
  {
    double const u1 = NextOpenUniform();
    double const u2 = NextUniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Gamma(shape, 1) by Marsaglia-Tsang, with the shape < 1 boost.
  double NextGamma(double shape) noexcept
  {
    if (shape < 1.0)
    {
      double const u = NextOpenUniform();
      return NextGamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    double const d = shape - 1.0 / 3.0;
    double const c = 1.0 / std::sqrt(9.0 * d);
    for (;;)
    {
      double x, v;
      do
      {
        x = NextNormal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v               = v * v * v;
      double const u  = NextOpenUniform();
      double const x2 = x * x;
      if (u < 1.0 - 0.0331 * x2 * x2 || std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v)))
      {
        return d * v;
      }
    }
  }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace regunc
