#include "xfer/dynamics/rng.hpp"

#include <cmath>

namespace xfer {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

double poly(const double* c, int n, double r) {
    double acc = c[0];
    for (int k = 1; k < n; ++k) acc = acc * r + c[k];
    return acc;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c, std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = std::uint64_t(kM0) * c[0];
        const std::uint64_t p1 = std::uint64_t(kM1) * c[2];
        const std::uint32_t hi0 = std::uint32_t(p0 >> 32), lo0 = std::uint32_t(p0);
        const std::uint32_t hi1 = std::uint32_t(p1 >> 32), lo1 = std::uint32_t(p1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kW0;
        k[1] += kW1;
    }
    return c;
}

double normal_quantile(double p) {
    static constexpr double a[] = {2.5090809287301226727e+3, 3.3430575583588128105e+4, 6.7265770927008700853e+4,
                                   4.5921953931549871457e+4, 1.3731693765509461125e+4, 1.9715909503065514427e+3,
                                   1.3314166789178437745e+2, 3.3871328727963666080e+0};
    static constexpr double b[] = {5.2264952788528545610e+3, 2.8729085735721942674e+4, 3.9307895800092710610e+4,
                                   2.1213794301586595867e+4, 5.3941960214247511077e+3, 6.8718700749205790830e+2,
                                   4.2313330701600911252e+1, 1.0};
    static constexpr double c[] = {7.7454501427834140764e-4, 2.2723844989269184583e-2, 2.4178072517745061177e-1,
                                   1.2704582524523683826e+0, 3.6478483247632046050e+0, 5.7694972214606914055e+0,
                                   4.6303378461565452959e+0, 1.4234371107496835773e+0};
    static constexpr double d[] = {1.0507500716444168432e-9, 5.4759380849953449460e-4, 1.5198666563616457197e-2,
                                   1.4810397642748007459e-1, 6.8976733498510000455e-1, 1.6763848301838038494e+0,
                                   2.0531916266377588219e+0, 1.0};
    static constexpr double e[] = {2.0103343992922881327e-7, 2.7115555687434875782e-5, 1.2426609473880784386e-3,
                                   2.6532189526576123093e-2, 2.9656057182850489123e-1, 1.7848265399172913358e+0,
                                   5.4637849111641143699e+0, 6.6579046435011037772e+0};
    static constexpr double f[] = {2.0442631033899397856e-15, 1.4215117583164458887e-7, 1.8463183175100546818e-5,
                                   7.8686913114561325910e-4, 1.4875361290850614853e-2, 1.3692988092273580531e-1,
                                   5.9983220655588793769e-1, 1.0};
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(a, 8, r) / poly(b, 8, r);
    }
    double r = q <= 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double x;
    if (r <= 5.0) {
        r -= 1.6;
        x = poly(c, 8, r) / poly(d, 8, r);
    } else {
        r -= 5.0;
        x = poly(e, 8, r) / poly(f, 8, r);
    }
    return q < 0.0 ? -x : x;
}

RandomStream::RandomStream(std::uint64_t seed, StreamPurpose purpose, std::uint32_t a, std::uint32_t b)
    : a_(a), b_(b) {
    const std::uint64_t k = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(purpose)));
    key_ = {std::uint32_t(k), std::uint32_t(k >> 32)};
}

std::uint64_t RandomStream::next_u64() {
    if (used_ == 2) {
        buf_ = philox4x32({std::uint32_t(block_), std::uint32_t(block_ >> 32), a_, b_}, key_);
        ++block_;
        used_ = 0;
    }
    const std::uint64_t out = std::uint64_t(buf_[2 * used_]) | (std::uint64_t(buf_[2 * used_ + 1]) << 32);
    ++used_;
    return out;
}

double RandomStream::uniform() { return (double(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

}  // namespace xfer
