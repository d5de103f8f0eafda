#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace truthrl {

// Seeded stream with a fixed draw discipline: every primitive below consumes a
// documented number of engine outputs, so results do not depend on the
// standard library's distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // One draw, 53-bit resolution, in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // One draw, in [0, n).
    std::uint64_t index(std::uint64_t n) {
        auto i = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
        return i < n ? i : n - 1;
    }

    // One draw.
    bool bernoulli(double p) { return uniform() < p; }

    // Two draws (Box-Muller, cosine branch only).
    double normal();

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Order-sensitive combination of seed components.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t component);
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> path);
inline Rng derive_stream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    return Rng(derive_seed(seed, path));
}

inline constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
std::uint64_t fnv1a64(std::string_view data, std::uint64_t hash = kFnvOffset);
std::uint64_t tag(std::string_view label);

// Fisher-Yates, one index() draw per position from the back.
template <class T>
void shuffle(std::span<T> items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        auto j = static_cast<std::size_t>(rng.index(i));
        using std::swap;
        swap(items[i - 1], items[j]);
    }
}

}  // namespace truthrl
