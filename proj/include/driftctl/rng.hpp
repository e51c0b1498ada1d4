#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace driftctl {

// Philox4x32-10 counter-based generator feeding a Box-Muller transform.
// A stream is addressed by (seed, trial_index) alone, so any trial can be
// generated on any thread in any order and always sees the same noise. Draw
// order within a trial is part of the contract: callers must consume normals
// in a fixed sequence.
class TrialStream {
   public:
    TrialStream(std::uint64_t seed, std::uint64_t trial_index)
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          trial_{trial_index} {}

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const std::array<std::uint32_t, 4> w = next_block();
        const std::uint64_t a =
            w[0] | (static_cast<std::uint64_t>(w[1]) << 32);
        const std::uint64_t b =
            w[2] | (static_cast<std::uint64_t>(w[3]) << 32);
        // (0, 1]: the +1 keeps the log argument away from zero
        const double u1 = ((a >> 11) + 1) * 0x1.0p-53;
        const double u2 = (b >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double angle = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(angle);
        have_spare_ = true;
        return r * std::cos(angle);
    }

   private:
    std::array<std::uint32_t, 4> next_block() {
        std::array<std::uint32_t, 4> ctr{
            static_cast<std::uint32_t>(block_),
            static_cast<std::uint32_t>(block_ >> 32),
            static_cast<std::uint32_t>(trial_),
            static_cast<std::uint32_t>(trial_ >> 32)};
        ++block_;
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
                   static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
                   static_cast<std::uint32_t>(p0)};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t trial_;
    std::uint64_t block_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace driftctl
