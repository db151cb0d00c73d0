/*
   Copyright 2026 The mmtail developers

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

#pragma once

#include <cstdint>

namespace mmtail {

// splitmix64 finalizer; also used as the per-stream key mixer.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// xoshiro256++ with splitmix64 seeding.
//
// Stream derivation contract (scheme tag "xoshiro256pp-sm64-v1"):
// the stream for Monte Carlo sample (seed, state, index) is keyed by
//   k = mix64(mix64(mix64(seed) ^ (state + 1)) ^ (index + 1))
// and the four words of state are the next four splitmix64 outputs from k.
// The derivation depends only on (seed, state, index), never on thread
// scheduling, so batches are bit-identical for any worker count.
class Rng {
public:
    explicit Rng(std::uint64_t key) {
        std::uint64_t z = key;
        for (auto& w : s_) {
            z += 0x9e3779b97f4a7c15ULL;
            std::uint64_t x = z;
            x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
            x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
            w = x ^ (x >> 31);
        }
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // uniform on [0, 1), 53-bit mantissa
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t state, std::uint64_t index) {
    return mix64(mix64(mix64(seed) ^ (state + 1)) ^ (index + 1));
}

inline Rng stream_for(std::uint64_t seed, std::uint64_t state, std::uint64_t index) {
    return Rng(stream_key(seed, state, index));
}

} // namespace mmtail
