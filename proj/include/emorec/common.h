// Copyright 2026 The Emorec Authors
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

#ifndef EMOREC_COMMON_H_
#define EMOREC_COMMON_H_

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace emorec {

// Error taxonomy. The CLI maps these to exit codes: validation/parse
// problems exit 1, I/O problems exit 2, bad arguments exit 64.
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

class ArgError : public std::runtime_error {
 public:
  explicit ArgError(const std::string& msg) : std::runtime_error(msg) {}
};

// Formats a double with 9 significant digits (the on-disk numeric format).
std::string format_g9(double v);

// SplitMix64 step; used to derive independent per-task seeds from a master
// seed so that parallel execution stays deterministic.
std::uint64_t splitmix64(std::uint64_t& state);

// Derives a child seed for stream `index` of a master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Deterministic RNG with portable bounded draws. std::mt19937_64 output is
// fully specified by the standard; the distributions are not, so bounded
// ints and unit doubles are generated here instead.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Unbiased integer in [0, n). n must be > 0.
  std::uint64_t next_index(std::uint64_t n);

  // Double in [0, 1) with 53 random bits.
  double next_unit();

  // Double in [-1, 1).
  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  // Standard normal via Box-Muller (deterministic, no cached spare).
  double next_gaussian();

 private:
  std::mt19937_64 engine_;
};

// Runs fn(i) for i in [0, n) across `threads` workers (0 = hardware
// concurrency). Work is split in contiguous blocks; fn must be safe to call
// concurrently for distinct i and results must not depend on scheduling.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace emorec

#endif  // EMOREC_COMMON_H_
