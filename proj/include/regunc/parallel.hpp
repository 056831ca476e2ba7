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

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace regunc {

/// Runs body(i) for i in [0, n) on up to `threads` workers using contiguous
/// static chunks. threads <= 0 means hardware concurrency. Bodies must write
/// only to slots owned by their index. The first exception thrown (lowest
/// chunk wins) is rethrown on the calling thread.
template <typename Body>
void ParallelFor(std::size_t n, int threads, Body &&body)
{
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(n, 1));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      body(i);
    }
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread>        pool;
  pool.reserve(workers);
  std::size_t const chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w)
  {
    pool.emplace_back([&, w] {
      std::size_t const begin = w * chunk;
      std::size_t const end   = std::min(n, begin + chunk);
      try
      {
        for (std::size_t i = begin; i < end; ++i)
        {
          body(i);
        }
      }
      catch (...)
      {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto &t : pool)
  {
    t.join();
  }
  for (auto const &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

}  // namespace regunc
