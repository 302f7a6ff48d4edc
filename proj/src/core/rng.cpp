// SPDX-License-Identifier: Apache-2.0
#include "qrn/core/rng.hpp"

namespace qrn {

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 step applied to base ^ golden-ratio-spread index.
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace qrn
