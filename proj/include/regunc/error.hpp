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

#include <stdexcept>
#include <string>

namespace regunc {

/// Failure classes. The numeric values double as CLI exit codes.
enum class ErrorKind : int
{
  kInvalid = 1,  // precondition violated by a caller
  kConfig  = 2,
  kIo      = 3,
  kNumeric = 4,
};

class Error : public std::runtime_error
{
public:
  Error(ErrorKind kind, std::string const &what)
    : std::runtime_error(what)
    , kind_(kind)
  {}

  ErrorKind kind() const noexcept
  {
    return kind_;
  }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void Fail(ErrorKind kind, std::string const &what)
{
  throw Error(kind, what);
}

}  // namespace regunc
