#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace rsinsure {

inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Sub-streams of one path. The regime and loss streams are shared by an
// antithetic pair; only the Gaussian sign differs.
enum class Stream : std::uint64_t { regime = 1, loss_time = 2, loss_size = 3, gaussian = 4 };

// Counter-based generator: output k of a stream is mix64(key + k * golden).
// Keys depend only on (seed, path, stream), so paths can be generated in any
// order and still reproduce bit for bit.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}
    CounterRng(std::uint64_t seed, std::uint64_t path, Stream stream) noexcept
        : key_(derive_key(seed, path, stream)) {}

    static constexpr std::uint64_t derive_key(std::uint64_t seed, std::uint64_t path,
                                              Stream stream) noexcept {
        std::uint64_t k = mix64(seed + 0x9e3779b97f4a7c15ULL);
        k = mix64(k ^ (path * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
        return mix64(k ^ (static_cast<std::uint64_t>(stream) * 0xaef17502108ef2d9ULL));
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        return mix64(key_ + (counter_++) * 0x9e3779b97f4a7c15ULL);
    }

    // uniform on [0, 1) with 53 random bits
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    // uniform on (0, 1)
    double open_uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    // inverse-CDF exponential; rate <= 0 gives +inf
    double exponential(double rate) noexcept {
        if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
        return -std::log1p(-uniform()) / rate;
    }

    std::uint64_t counter() const noexcept { return counter_; }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace rsinsure
