// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 pathloss-kit contributors

#ifndef PATHLOSS_COMMON_HPP
#define PATHLOSS_COMMON_HPP

#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace pathloss {

inline constexpr double speed_of_light_mps = 299792458.0;

/// Error type thrown by every operation in this library. The message is a
/// single line suitable for machine parsing on stderr.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(message);
}

/// 2-D planar point in meters. All coordinates in this library live in one
/// arbitrary projected system shared by rasters, towers and measurements.
struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline double distance_2d(const Point& a, const Point& b) {
    return std::hypot(b.x - a.x, b.y - a.y);
}

// ---------------------------------------------------------------------------
// Number formatting
// ---------------------------------------------------------------------------

/// Shortest decimal form that parses back to the same double. Used by every
/// text writer so that save -> load round-trips are exact and reruns are
/// byte-identical.
inline std::string format_double(double value) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view token, const std::string& context) {
    double value = 0.0;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc() || res.ptr != last)
        throw Error("invalid number '" + std::string(token) + "' " + context);
    return value;
}

inline long long parse_int(std::string_view token, const std::string& context) {
    long long value = 0;
    auto res = std::from_chars(token.data(), token.data() + token.size(), value);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size())
        throw Error("invalid integer '" + std::string(token) + "' " + context);
    return value;
}

// ---------------------------------------------------------------------------
// Digests and seed derivation
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 14695981039346656037ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

/// Sub-seed for one named purpose ("split:A", "grid", "tree:17", ...).
/// Every random draw in the library flows from one top-level seed through
/// this function, so runs are reproducible purpose by purpose.
inline std::uint64_t derive_seed(std::uint64_t base, std::string_view purpose) {
    return splitmix64(base ^ fnv1a64(purpose));
}

// ---------------------------------------------------------------------------
// Deterministic random numbers
// ---------------------------------------------------------------------------

/// mt19937_64 with hand-rolled distributions. The engine's output sequence is
/// fixed by the standard; the standard library's distributions are not, so the
/// uniform/normal transforms are spelled out here to make results portable.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Unbiased integer in [0, n) by rejection.
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw Error("Rng::below: n must be positive");
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t v = next_u64();
        while (v >= limit) v = next_u64();
        return v % n;
    }

    /// Box-Muller without a cached spare: one call consumes two draws.
    double normal(double mean, double sigma) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sigma * r * std::cos(2.0 * M_PI * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------
// Thread cap
// ---------------------------------------------------------------------------

inline std::atomic<int>& thread_cap_storage() {
    static std::atomic<int> cap{0};  // 0 = hardware concurrency
    return cap;
}

inline void set_max_threads(int n) { thread_cap_storage().store(n); }

inline int max_threads() {
    int cap = thread_cap_storage().load();
    if (cap <= 0) cap = static_cast<int>(std::thread::hardware_concurrency());
    return cap > 0 ? cap : 1;
}

/// Static partition of [0, n) over at most max_threads() workers. Each index
/// is visited exactly once; fn must only write state owned by its index, so
/// results do not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(max_threads()), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

}  // namespace pathloss

#endif  // PATHLOSS_COMMON_HPP
