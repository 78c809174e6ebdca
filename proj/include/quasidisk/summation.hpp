#pragma once

#include <cstddef>
#include <span>

namespace quasidisk {

// Pairwise (cascade) summation. The association order depends only on the
// length of the input, so results are reproducible across thread counts.
template <class T>
T pairwise_sum(std::span<const T> values) {
    constexpr std::size_t kBlock = 32;
    if (values.size() <= kBlock) {
        T acc{};
        for (const T& v : values) acc += v;
        return acc;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

}  // namespace quasidisk
