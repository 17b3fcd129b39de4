// Copyright 2026 The FUSE Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fuse/parallel.hpp"

#include <charconv>
#include <cstdlib>
#include <cstring>

namespace fuse {

std::size_t worker_count() {
  static const std::size_t cached = [] {
    std::size_t requested = 0;
    if (const char* env = std::getenv("FUSE_THREADS")) {
      std::from_chars(env, env + std::strlen(env), requested);
    }
    if (requested == 0) requested = std::thread::hardware_concurrency();
    return requested == 0 ? std::size_t{1} : requested;
  }();
  return cached;
}

}  // namespace fuse
