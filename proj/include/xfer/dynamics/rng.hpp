#pragma once

#include <array>
#include <cstdint>

namespace xfer {

/// Philox4x32-10 block function (Salmon et al., counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

/// Inverse standard normal CDF (Wichura's AS241, about 1e-16 relative accuracy). Requires 0 < p < 1.
double normal_quantile(double p);

/// Independent stream families derived from one seed.
enum class StreamPurpose : std::uint32_t {
    TestPoints = 1,
    Noise = 2,
    Samples = 3,
    InitialGuess = 4,
};

/// Counter-based random stream addressed by (seed, purpose, a, b). Streams with different addresses are
/// independent, and a stream's output depends only on its address, never on scheduling.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t a = 0, std::uint32_t b = 0);

    std::uint64_t next_u64();
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    double uniform();
    double normal() { return normal_quantile(uniform()); }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t a_, b_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int used_ = 2;
};

}  // namespace xfer
