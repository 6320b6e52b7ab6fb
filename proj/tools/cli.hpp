/*
Copyright (c) 2026 The tribell developers.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

  http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#ifndef TRIBELL_CLI_HPP
#define TRIBELL_CLI_HPP

#include <iosfwd>

namespace tribell::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitUsage = 2;      // malformed input
inline constexpr int kExitViolation = 3;  // confirmed bound violations

/// Parses and runs one command line. argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace tribell::cli

#endif  // TRIBELL_CLI_HPP
