#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "quasidisk/bounds.hpp"

using namespace quasidisk;

namespace {

constexpr double kPi = std::numbers::pi;

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

std::vector<cd> sample_curve(const std::function<cd(double)>& f, int n) {
    std::vector<cd> pts(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) pts[k] = f(2 * kPi * k / n);
    return pts;
}

CurveSamples circle(int n, double R = 1.0) {
    return CurveSamples(sample_curve([R](double t) { return std::polar(R, t); }, n));
}

CurveSamples unit_square(int per_side) {
    std::vector<cd> pts;
    const cd corners[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    for (int s = 0; s < 4; ++s)
        for (int k = 0; k < per_side; ++k) pts.push_back(corners[s] + (corners[(s + 1) % 4] - corners[s]) * (double(k) / per_side));
    return CurveSamples(std::move(pts));
}

}  // namespace

TEST_CASE("constant chain matches the extended-precision recomputation") {
    for (double K : {1.0, 1.5, 2.0})
        for (double Kp : {0.0, 1.0, 144.0})
            for (double g : {0.0, 1.0, 4.0}) {
                CAPTURE(K);
                CAPTURE(Kp);
                CAPTURE(g);
                const oracle::Chain o = oracle::chain(K, Kp, g);
                const BoundSet b = lipschitz_M(K, Kp, g);
                CHECK(rel_close(b.mu, o.mu, 1e-10));
                CHECK(rel_close(b.p_s, o.p_s, 1e-10));
                CHECK(rel_close(b.m2, o.m2, 1e-10));
                // log10 c0 is ~1e2: relative 1e-10 on c0 is an absolute 1e-10 / ln 10 on its log.
                CHECK(std::abs(b.log10_c0 - o.log10_c0) * std::log(10.0) <= 1e-10);
                CHECK(std::abs(b.log10_lip_M - o.log10_lip_M) * std::log(10.0) <= 1e-10);
                CHECK(rel_close(b.c1_value, o.c1_value, 1e-10));
                CHECK(b.c1.has_value() == o.c1_present);
                CHECK(std::abs(b.colip.log10_n2 - o.log10_n2) * std::log(10.0) <= 1e-10);
                CHECK(rel_close(b.colip.n2, o.n2, 1e-10));
                CHECK(rel_close(b.colip.n1, o.n1, 1e-10));
                CHECK(rel_close(b.colip.N, o.N, 1e-10));
            }
}

TEST_CASE("mu") {
    CHECK(mu(1.0) == doctest::Approx(1.0 / ((1 + kPi) * (1 + kPi))).epsilon(1e-15));
    CHECK(mu(1.0) == doctest::Approx(0.058299554591864686).epsilon(1e-14));
    CHECK(mu(2.0) == doctest::Approx(mu(1.0) / 2).epsilon(1e-15));
    CHECK(mu(1.0) > mu(10.0));
    CHECK(mu(10.0) > mu(100.0));
    CHECK(mu(100.0) > 0.0);
    CHECK_THROWS_AS(mu(0.5), InputError);
    CHECK_THROWS_AS(mu(NAN), InputError);
}

TEST_CASE("P_S") {
    const double want = 4 * (1 + kPi) * std::pow(2.0, mu(1.0)) * std::sqrt(2 * kPi * kPi / std::log(2.0));
    CHECK(p_s(1.0, 0.0) == doctest::Approx(want).epsilon(1e-14));
    CHECK(p_s(1.0, 0.0) == doctest::Approx(92.05).epsilon(1e-3));
    CHECK(p_s(1.0, 0.0) == p_s(1.0, 1.0));
    for (double K : {1.0, 2.0, 5.0}) {
        double prev = 0.0;
        for (double Kp : {0.0, 1.0, 10.0, 100.0, 1e3, 1e4, 1e5}) {
            const double v = p_s(K, Kp);
            CHECK(v >= prev);
            prev = v;
        }
    }
    CHECK_THROWS_AS(p_s(1.0, -1.0), InputError);
    CHECK_THROWS_AS(p_s(0.9, 0.0), InputError);
}

TEST_CASE("circle power integral") {
    CHECK(std::abs(circle_power_integral(0.0) - 1.0) <= 1e-12);
    CHECK(std::abs(circle_power_integral(2.0) - 2.0) <= 1e-12);
    CHECK(circle_power_integral(1.0) == doctest::Approx(4 / kPi).epsilon(1e-12));
    for (double p : {-0.99, -0.9, -0.5, 0.3, 7.0, 40.0})
        CHECK(circle_power_integral(p) == doctest::Approx(oracle::circle_power(p)).epsilon(1e-10));
    CHECK(log_circle_power_integral(1e4) == doctest::Approx(oracle::log_circle_power(1e4)).epsilon(1e-10));
    CHECK_THROWS_AS(circle_power_integral(-1.0), InputError);
    CHECK_THROWS_AS(circle_power_integral(-3.0), InputError);
}

TEST_CASE("property: the circle power integral does not depend on the anchor angle") {
    for (double p : {mu(1.0) * mu(1.0) - 1, -0.5, 1.0, 3.5}) {
        double lo = INFINITY, hi = -INFINITY;
        for (int k = 0; k < 8; ++k) {
            const double v = circle_power_integral_at(p, 2 * kPi * k / 8 + 0.1);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CHECK(hi - lo <= 1e-10 * hi);
        CHECK(lo == doctest::Approx(circle_power_integral(p)).epsilon(1e-10));
    }
}

TEST_CASE("Lipschitz constant and branch selection") {
    const BoundSet b = lipschitz_M(1.0, 0.0, 0.0);
    CHECK(b.log10_c0 == doctest::Approx((1 + kPi) * (1 + kPi) * std::log10(b.m2)).epsilon(1e-12));
    CHECK(b.log10_c0 == doctest::Approx(69.50).epsilon(1e-3));
    // (1 - mu) m2 is in the thousands for every K >= 1 we tried, so the min branch never triggers.
    for (double K : {1.0, 1.5, 2.0, 5.0, 10.0, 50.0}) {
        const BoundSet s = lipschitz_M(K, 0.0, 0.0);
        CHECK((1 - s.mu) * s.m2 >= 1.0);
        CHECK_FALSE(s.c1.has_value());
        CHECK(s.log10_lip_M == s.log10_c0);
        CHECK(s.log10_lip_M >= 0.0);
    }
    double prev = -INFINITY;
    for (double g : {0.0, 0.1, 1.0, 10.0, 1e3, 1e6}) {
        const double v = lipschitz_M(1.5, 2.0, g).log10_lip_M;
        CHECK(v >= prev);
        prev = v;
    }
    const BoundSet mid = lipschitz_M(2.0, 3.0, 0.0);
    CHECK(mid.log10_c0 == doctest::Approx(172.98).epsilon(1e-4));
    CHECK(mid.lip_M == doctest::Approx(std::pow(10.0, mid.log10_lip_M)).epsilon(1e-10));
    const BoundSet huge = lipschitz_M(5.0, 0.0, 0.0);
    CHECK(huge.log10_c0 > 308);
    CHECK(std::isinf(huge.lip_M));
    CHECK(std::isfinite(huge.log10_lip_M));
    CHECK_THROWS_AS(lipschitz_M(1.0, 0.0, -1.0), InputError);
}

TEST_CASE("coLipschitz constants") {
    for (double K : {1.0, 1.5, 3.0})
        for (double Kp : {0.0, 5.0, 1e3}) {
            const CoLipschitzBounds c = colipschitz_N(K, Kp, 0.0);
            CHECK(c.log10_n2 <= c.log10_n2_upper);
        }
    const CoLipschitzBounds big = colipschitz_N(1.0, 0.0, 1e6);
    CHECK(big.N < 0);
    CHECK_FALSE(big.positive);
    const CoLipschitzBounds base = colipschitz_N(1.0, 0.0, 0.0);
    CHECK(base.N == base.n1);
    CHECK(base.n1 == base.n2);
    CHECK(base.positive == (base.N > 0));
    // n2 underflows here, but N = n2 / K^2 is still positive.
    const CoLipschitzBounds tiny = colipschitz_N(5.0, 0.0, 0.0);
    CHECK(tiny.n2 == 0.0);
    CHECK(tiny.log10_n2 < -300);
    CHECK(tiny.positive);
    CHECK_FALSE(colipschitz_N(5.0, 0.0, 1e-3).positive);
}

TEST_CASE("curve samples") {
    CHECK_THROWS_AS(CurveSamples({0.0, 1.0}), InputError);
    CHECK_THROWS_AS(CurveSamples({0.0, 1.0, 1.0, cd(0, 1)}), InputError);
    // A segment traversed there and back.
    CHECK_THROWS_AS(CurveSamples({0.0, 0.5, 1.0, 0.5}), InputError);
    // Figure eight.
    CHECK_THROWS_AS(CurveSamples({0.0, cd(1, 1), cd(1, 0), cd(0, 1)}), InputError);
    const CurveSamples c = circle(64);
    CHECK(c.length() == doctest::Approx(2 * 64 * std::sin(kPi / 64)));
    CHECK(std::abs(c.at(c.length() + c.arc()[3]) - c.points()[3]) < 1e-14);
    const auto [s, d] = c.project(cd(1.1, 0));
    CHECK(s == doctest::Approx(0.0));
    CHECK(d == doctest::Approx(0.1));
}

TEST_CASE("chord-arc constant") {
    CHECK(std::abs(chord_arc_constant(circle(1024)) - kPi / 2) <= 1e-3);
    // Arc of half the square between the midpoints of opposite sides is 2, chord 1.
    const CurveSamples sq = unit_square(64);
    const double v = chord_arc_constant(sq);
    CHECK(v >= std::sqrt(2.0));
    const double dense = oracle::chord_arc_dense(
        [](double t) {
            const double u = 4 * t / (2 * kPi);
            const int s = std::min(3, static_cast<int>(u));
            const cd corners[] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}, {0, 0}};
            return corners[s] + (corners[s + 1] - corners[s]) * (u - s);
        },
        256);
    CHECK(v == doctest::Approx(dense).epsilon(1e-9));
    CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
    CHECK_THROWS_AS(chord_arc_constant(circle(8)), InputError);
}

TEST_CASE("property: chord-arc constant is scale invariant and at least one") {
    const auto ellipse = [](double t) { return cd(2 * std::cos(t), std::sin(t)); };
    const auto blob = [](double t) { return std::polar(1 + 0.2 * std::cos(3 * t), t); };
    for (const auto& f : {std::function<cd(double)>(ellipse), std::function<cd(double)>(blob)}) {
        const std::vector<cd> pts = sample_curve(f, 256);
        std::vector<cd> scaled = pts;
        for (cd& p : scaled) p *= 5.0;
        const double a = chord_arc_constant(CurveSamples(pts));
        CHECK(a >= 1.0);
        CHECK(std::abs(chord_arc_constant(CurveSamples(scaled)) - a) <= 1e-12);
        CHECK(a == doctest::Approx(oracle::chord_arc_dense(f, 256)).epsilon(1e-3));
    }
}

TEST_CASE("well-distributed points") {
    const auto p = well_distributed_points(circle(3 * 256));
    CHECK(std::abs(p[0] - 1.0) < 1e-12);
    CHECK(std::abs(p[1] - std::polar(1.0, 2 * kPi / 3)) < 1e-12);
    CHECK(std::abs(p[2] - std::polar(1.0, 4 * kPi / 3)) < 1e-12);

    const CurveSamples el(sample_curve([](double t) { return cd(2 * std::cos(t), std::sin(t)); }, 1000));
    const auto q = well_distributed_points(el);
    const double s1 = el.project(q[1]).first, s2 = el.project(q[2]).first;
    const double L = el.length();
    CHECK(std::abs(s1 - L / 3) <= 1e-6 * L);
    CHECK(std::abs(s2 - s1 - L / 3) <= 1e-6 * L);
    CHECK(std::abs(L - s2 - L / 3) <= 1e-6 * L);
}

TEST_CASE("normalized boundary maps") {
    // Dense enough that the polygon stays within 1e-6 of the circle.
    const CurveSamples circ = circle(4096);
    const BoundaryData id = BoundaryData::from_expr(MappingExpr::identity(), 1024);
    const NormalizationReport r = normalized_check(id, circ);
    CHECK(r.is_normalized);
    CHECK(r.gap <= 1e-8 * r.length);

    const BoundaryData sym =
        BoundaryData::from_psi_function([](double t) { return t + 0.5 * std::sin(3 * t); }, 1024);
    CHECK(normalized_check(sym, circ).is_normalized);

    CHECK_THROWS_AS(normalized_check(BoundaryData::from_expr(parse("z^2"), 1024), circ), DomainError);
    CHECK_THROWS_AS(normalized_check(BoundaryData::from_expr(parse("1.1*z"), 1024), circ), InputError);
}

TEST_CASE("Hoelder seminorm") {
    CHECK(holder_seminorm(circle(1024), 1, 1.0) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(holder_seminorm(circle(1024, 3.0), 1, 1.0) == doctest::Approx(1.0 / 3).epsilon(1e-3));
    CHECK(holder_seminorm(circle(1024), 1, 0.5) <= 2.0);
    CHECK(holder_seminorm(circle(1024), 2, 1.0) == doctest::Approx(1.0).epsilon(1e-2));
    CHECK_THROWS_AS(holder_seminorm(circle(32), 1, 1.0), InputError);
    CHECK_THROWS_AS(holder_seminorm(circle(1024), 3, 1.0), InputError);
    CHECK_THROWS_AS(holder_seminorm(circle(1024), 1, 0.0), InputError);
}
