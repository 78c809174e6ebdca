#include <cmath>
#include <sstream>

#include "doctest.h"
#include "quasidisk/qrclass.hpp"
#include "support.hpp"

using namespace quasidisk;

namespace {

const MappingExpr kDoubleCover = parse("2*|z|^4*z^2 - |z|^10*z^2");
const MappingExpr kFixing1 = parse("(3*z - z*|z|^2)/2");

}  // namespace

TEST_CASE("qr_deficiency on worked examples") {
    const SampleGrid grid;
    CHECK(qr_deficiency(QRProfile::sample(kDoubleCover, grid), 1.0) <= 144.0);
    CHECK(qr_deficiency(QRProfile::sample(kFixing1, grid), 1.0) <= 2.25);
    for (double K : {1.0, 2.0, 7.5}) CHECK(qr_deficiency(QRProfile::sample(MappingExpr::identity(), grid), K) == 0.0);
}

TEST_CASE("qr_deficiency rejects bad input") {
    const QRProfile empty({}, SampleGrid{});
    CHECK_THROWS_AS(qr_deficiency(empty, 1.0), InputError);
    const QRProfile p = QRProfile::sample(MappingExpr::identity(), {.n_r = 2, .n_theta = 2});
    CHECK_THROWS_AS(qr_deficiency(p, 0.5), InputError);
}

TEST_CASE("Pareto frontier") {
    const SampleGrid grid;
    const std::vector<double> ks{1, 2, 4, 8};
    const ParetoFrontier id = pareto_frontier(QRProfile::sample(MappingExpr::identity(), grid), ks);
    for (const auto& p : id.points) CHECK(p.kprime_min == 0.0);

    const ParetoFrontier dc = pareto_frontier(QRProfile::sample(kDoubleCover, grid), ks);
    CHECK(dc.monotone);
    CHECK(dc.points.front().kprime_min <= 144.0);
    for (std::size_t i = 1; i < dc.points.size(); ++i) CHECK(dc.points[i].kprime_min <= dc.points[i - 1].kprime_min);

    // Constant coefficients: |grad w|^2 = 2.25, J = 0.75 everywhere.
    const std::vector<double> kk{1, 2, 3, 4};
    const ParetoFrontier lin = pareto_frontier(QRProfile::sample(parse("z + 0.5*conj(z)"), grid), kk);
    for (const auto& p : lin.points) CHECK(p.kprime_min == doctest::Approx(std::max(0.0, 2.25 - 0.75 * p.K)));
    CHECK(lin.points[2].kprime_min == doctest::Approx(0.0));

    const QRProfile p = QRProfile::sample(kFixing1, {.n_r = 4, .n_theta = 4});
    CHECK_THROWS_AS(pareto_frontier(p, std::vector<double>{}), InputError);
    CHECK_THROWS_AS(pareto_frontier(p, std::vector<double>{2, 1}), InputError);
    CHECK_THROWS_AS(pareto_frontier(p, std::vector<double>{0.5, 1}), InputError);
}

TEST_CASE("property: frontier is nonincreasing and consistent with the gradient inequality") {
    std::mt19937_64 rng(testing_support::kSeed + 20);
    const std::vector<double> ks{1, 1.25, 1.5, 2, 3, 5, 10, 100};
    for (int k = 0; k < 20; ++k) {
        // Sense-preserving: a dominant holomorphic part keeps J > 0.
        const MappingExpr e = MappingExpr::identity().scaled(8.0) + testing_support::random_poly(rng, 5, 3);
        const QRProfile p = QRProfile::sample(e, {.n_r = 20, .n_theta = 32});
        const ParetoFrontier f = pareto_frontier(p, ks);
        if (!sense_preserving_check(p).all_positive) continue;
        CHECK(f.monotone);
        for (std::size_t i = 1; i < f.points.size(); ++i) CHECK(f.points[i].kprime_min <= f.points[i - 1].kprime_min);
        for (const auto& pt : f.points) {
            CHECK(pt.kprime_min == qr_deficiency(p, pt.K));
            CHECK(lemma11_check(p, pt.K, pt.kprime_min).holds);
        }
    }
}

TEST_CASE("property: qr_deficiency does not decrease under grid refinement") {
    std::mt19937_64 rng(testing_support::kSeed + 21);
    for (int k = 0; k < 10; ++k) {
        const MappingExpr e = testing_support::random_poly(rng, 8);
        // Tripling both counts keeps every coarse point: radius (j + 1/2) h
        // is fine radius 3j + 1 and angle 2 pi k / n is fine angle 3k.
        const SampleGrid coarse{.n_r = 10, .n_theta = 16, .margin = 1e-2};
        const SampleGrid fine{.n_r = 30, .n_theta = 48, .margin = 1e-2};
        for (double K : {1.0, 2.0}) {
            const double c = qr_deficiency(QRProfile::sample(e, coarse), K);
            CHECK(qr_deficiency(QRProfile::sample(e, fine), K) >= c - 1e-12 * (1 + c));
        }
    }
}

TEST_CASE("dilatation blow-up on shrinking circles") {
    const std::vector<double> margins{1e-1, 1e-2, 1e-3};
    const auto dc = k_qr_blowup(kDoubleCover, margins);
    REQUIRE(dc.size() == 3);
    CHECK(dc[0].ratio < dc[1].ratio);
    CHECK(dc[1].ratio < dc[2].ratio);
    // On |z| = r the maximal dilatation is (2 - r^6) / (6 (1 - r^6)) once
    // 4 - 5 r^6 < 0; it is about 28 at margin 1e-3, not above 1e3.
    const double r6 = std::pow(1 - 1e-3, 6);
    CHECK(dc[2].ratio == doctest::Approx((2 - r6) / (6 * (1 - r6))).epsilon(1e-6));

    const auto fx = k_qr_blowup(kFixing1, margins);
    CHECK(fx[0].ratio < fx[1].ratio);
    CHECK(fx[1].ratio < fx[2].ratio);

    for (const auto& s : k_qr_blowup(MappingExpr::identity(), margins)) CHECK(s.ratio == doctest::Approx(1.0));

    const auto rev = k_qr_blowup(parse("conj(z)"), margins);
    CHECK(std::isnan(rev[0].ratio));
    CHECK(rev[0].excluded == 256);

    CHECK_THROWS_AS(k_qr_blowup(kFixing1, std::vector<double>{1e-2, 1e-1}), InputError);
    CHECK_THROWS_AS(k_qr_blowup(kFixing1, std::vector<double>{0.6}), InputError);
}

TEST_CASE("properness on shrinking circles") {
    const std::vector<double> margins{1e-1, 1e-2, 1e-3};
    const auto dc = properness_check(kDoubleCover, margins);
    CHECK(dc[0] < dc[1]);
    CHECK(dc[1] < dc[2]);
    CHECK(dc[2] >= 0.99);
    const auto id = properness_check(MappingExpr::identity(), margins);
    for (std::size_t i = 0; i < margins.size(); ++i) CHECK(id[i] == doctest::Approx(1 - margins[i]).epsilon(1e-15));
    const auto bump = properness_check(parse("z*(1 - abs2(z))"), margins);
    CHECK(bump[2] < bump[1]);
    CHECK(bump[2] < 0.003);
}

TEST_CASE("gradient inequality implied by the quasiregularity constants") {
    const SampleGrid grid;
    const Lemma11Report dc = lemma11_check(QRProfile::sample(kDoubleCover, grid), 1, 144);
    CHECK(dc.holds);
    CHECK(lemma11_check(QRProfile::sample(kFixing1, grid), 1, 2.25).holds);
    const Lemma11Report id = lemma11_check(QRProfile::sample(MappingExpr::identity(), grid), 1, 0);
    CHECK(id.holds);
    CHECK(id.worst_margin == doctest::Approx(0.0));
    // The boundary-fixing map violates the inequality with no additive slack.
    CHECK_FALSE(lemma11_check(QRProfile::sample(kFixing1, grid), 1, 0).holds);
}

TEST_CASE("sense preservation") {
    const SampleGrid grid;
    const SensePreservingReport fx = sense_preserving_check(QRProfile::sample(kFixing1, grid));
    CHECK(fx.all_positive);
    CHECK(fx.min_jac > 0);
    CHECK(sense_preserving_check(QRProfile::sample(MappingExpr::identity(), grid)).min_jac == doctest::Approx(1));
    const SensePreservingReport cj = sense_preserving_check(QRProfile::sample(parse("conj(z)"), grid));
    CHECK_FALSE(cj.all_positive);
    CHECK(cj.min_jac == doctest::Approx(-1));
}

TEST_CASE("QR profile invariants") {
    std::mt19937_64 rng(testing_support::kSeed + 22);
    for (int k = 0; k < 10; ++k) {
        const QRProfile p = QRProfile::sample(testing_support::random_poly(rng, 8), {.n_r = 10, .n_theta = 16});
        for (const QRPoint& q : p.points()) {
            CHECK(q.grad_sq >= 0);
            CHECK(q.grad_sq >= std::abs(q.jac) * (1 - 1e-12));
        }
    }
}

TEST_CASE("frontier CSV") {
    std::ostringstream os;
    const ParetoFrontier f = pareto_frontier(QRProfile::sample(parse("z + 0.5*conj(z)"), {.n_r = 4, .n_theta = 4}),
                                             std::vector<double>{1, 3});
    write_frontier_csv(os, f);
    CHECK(os.str() == "K,kprime_min\n1,1.5\n3,0\n");
}
