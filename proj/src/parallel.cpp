#include "quasidisk/parallel.hpp"

#include <atomic>
#include <charconv>
#include <cstdlib>
#include <cstring>

namespace quasidisk {
namespace {

std::size_t initial_thread_count() {
    if (const char* env = std::getenv("QUASIDISK_THREADS")) {
        std::size_t n = 0;
        const char* end = env + std::strlen(env);
        const auto [ptr, ec] = std::from_chars(env, end, n);
        if (ec == std::errc{} && ptr == end && n > 0) return n;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

std::atomic<std::size_t>& workers() {
    static std::atomic<std::size_t> n{initial_thread_count()};
    return n;
}

}  // namespace

std::size_t thread_count() { return workers().load(std::memory_order_relaxed); }

void set_thread_count(std::size_t n) { workers().store(n == 0 ? initial_thread_count() : n, std::memory_order_relaxed); }

}  // namespace quasidisk
