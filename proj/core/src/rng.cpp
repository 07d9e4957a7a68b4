#include "pbitrc/rng.hpp"

namespace pbitrc {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

__extension__ typedef unsigned __int128 uint128;

inline std::uint32_t lo32(std::uint64_t v) noexcept { return static_cast<std::uint32_t>(v); }
inline std::uint32_t hi32(std::uint64_t v) noexcept { return static_cast<std::uint32_t>(v >> 32); }

inline std::uint64_t join(std::uint32_t hi, std::uint32_t lo) noexcept {
    return (static_cast<std::uint64_t>(hi) << 32) | lo;
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

std::array<std::uint32_t, 2> derive_key(std::uint64_t seed, RngDomain domain) noexcept {
    const std::uint64_t k =
        splitmix64(seed ^ splitmix64(0xA0761D6478BD642Full * (static_cast<std::uint64_t>(domain) + 1)));
    return {lo32(k), hi32(k)};
}

double RngStream::uniform_pm1() const noexcept {
    const auto out = philox4x32({lo32(node_id), hi32(node_id), lo32(step), hi32(step)},
                                derive_key(seed, RngDomain::NodeNoise));
    return -1.0 + 2.0 * to_unit_interval(join(out[0], out[1]));
}

CounterEngine::CounterEngine(std::uint64_t seed, RngDomain domain, std::uint64_t substream) noexcept
    : key_(derive_key(seed, domain)), substream_(substream) {}

CounterEngine::result_type CounterEngine::operator()() noexcept {
    const auto out =
        philox4x32({lo32(index_), hi32(index_), lo32(substream_), hi32(substream_)}, key_);
    ++index_;
    return join(out[0], out[1]);
}

std::uint64_t CounterEngine::below(std::uint64_t n) noexcept {
    if (n <= 1) {
        return 0;
    }
    uint128 m = static_cast<uint128>((*this)()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t threshold = (0 - n) % n;
        while (low < threshold) {
            m = static_cast<uint128>((*this)()) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

} // namespace pbitrc
