// Copyright 2026 The qtem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>

namespace qtem::physcore {

inline constexpr const char *kRngAlgorithm = "philox4x32-10";

/// Identifies one reproducible random stream.
struct RngSpec {
    std::string algorithm = kRngAlgorithm;
    std::uint64_t master_seed = 0;
    std::uint64_t stream_index = 0;
};

/// Philox4x32 with 10 rounds (Salmon et al., SC'11). Pure function of
/// (counter, key); matches the Random123 known-answer vectors.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Counter-based random stream. The key is the master seed; the counter is
/// (block index, stream index), so streams with different indices never share
/// a block and any stream can be created without touching the others.
///
/// Satisfies std::uniform_random_bit_generator.
class StreamRng {
   public:
    using result_type = std::uint64_t;

    explicit StreamRng(const RngSpec &spec);
    StreamRng(std::uint64_t master_seed, std::uint64_t stream_index)
        : StreamRng(RngSpec{kRngAlgorithm, master_seed, stream_index}) {
    }

    static constexpr result_type min() {
        return 0;
    }
    static constexpr result_type max() {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()();

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform();

    /// True with probability p (p <= 0 never, p >= 1 always; no draw is
    /// consumed in either case).
    bool bernoulli(double p);

    const RngSpec &spec() const {
        return spec_;
    }

   private:
    void refill();

    RngSpec spec_;
    std::array<std::uint32_t, 2> key_{};
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int used_ = 4;  // 32-bit words consumed from buffer_
};

}  // namespace qtem::physcore
