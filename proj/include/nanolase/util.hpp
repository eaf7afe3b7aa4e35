// util.hpp - small shared helpers (hashing, bounded concurrency)
#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nanolase {

inline std::uint64_t fnv1a64(const void* data, std::size_t n,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* b = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < n; ++i) {
        h ^= b[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t hash_double(double x, std::uint64_t seed) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    return fnv1a64(&bits, sizeof bits, seed);
}

// Worker count for sweeps: hardware concurrency capped at 8, further capped
// by NANOLASE_THREADS when set.
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    unsigned n = hw > 8 ? 8u : hw;
    if (const char* s = std::getenv("NANOLASE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(s, &end, 10);
        if (end != s && v >= 1 && static_cast<unsigned>(v) < n)
            n = static_cast<unsigned>(v);
    }
    return n;
}

// Runs fn(i) for i in [0, n). Results must be written to per-index slots so
// the outcome is identical regardless of scheduling. The lowest-index
// exception is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t n, F&& fn) {
    const std::size_t workers = std::min<std::size_t>(thread_budget(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex mtx;
    std::vector<std::pair<std::size_t, std::exception_ptr>> errors;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(mtx);
                errors.emplace_back(i, std::current_exception());
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (!errors.empty()) {
        std::size_t best = 0;
        for (std::size_t k = 1; k < errors.size(); ++k)
            if (errors[k].first < errors[best].first) best = k;
        std::rethrow_exception(errors[best].second);
    }
}

}  // namespace nanolase
