#pragma once

#include <cstdint>
#include <random>

#include "quasidisk/expr.hpp"

namespace testing_support {

inline constexpr std::uint64_t kSeed = 0x5eed2024ULL;

// Random polynomial with dyadic coefficients, so sums and products of the
// coefficients stay exact in double precision.
inline quasidisk::MappingExpr random_poly(std::mt19937_64& rng, int max_degree, int max_terms = 6) {
    std::uniform_int_distribution<int> nterms(1, max_terms);
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> num(-16, 16);
    std::map<quasidisk::Monomial, quasidisk::cd> terms;
    const int n = nterms(rng);
    for (int k = 0; k < n; ++k) {
        const int a = deg(rng);
        const int b = std::uniform_int_distribution<int>(0, max_degree - a)(rng);
        terms[{a, b}] += quasidisk::cd(num(rng) / 8.0, num(rng) / 8.0);
    }
    return quasidisk::MappingExpr(terms);
}

inline quasidisk::cd random_point(std::mt19937_64& rng, double radius = 0.95) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return std::polar(radius * std::sqrt(u(rng)), 2.0 * std::acos(-1.0) * u(rng));
}

}  // namespace testing_support
