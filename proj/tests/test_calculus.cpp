#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"
#include "oracles.hpp"
#include "quasidisk/calculus.hpp"
#include "quasidisk/parallel.hpp"
#include "support.hpp"

using namespace quasidisk;
using testing_support::random_point;
using testing_support::random_poly;

namespace {

const MappingExpr kDoubleCover = parse("2*|z|^4*z^2 - |z|^10*z^2");
const MappingExpr kFixing1 = parse("(3*z - z*|z|^2)/2");

double rel(cd a, cd b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

}  // namespace

TEST_CASE("SampleGrid points follow the documented layout") {
    const SampleGrid g{.n_r = 4, .n_theta = 8, .margin = 0.1};
    CHECK(g.size() == 32);
    CHECK(g.radius(0) == doctest::Approx(0.5 * 0.9 / 4));
    CHECK(g.radius(3) == doctest::Approx(3.5 * 0.9 / 4));
    CHECK(g.angle(2) == doctest::Approx(std::numbers::pi / 2));
    CHECK(std::abs(g.point(2 * 8 + 3) - std::polar(g.radius(2), g.angle(3))) < 1e-15);
    const SampleGrid def;
    for (std::size_t i = 0; i < def.size(); i += 97) {
        CHECK(std::abs(def.point(i)) <= 1 - def.margin);
        CHECK(std::abs(def.point(i)) > 0);
    }
    const SampleGrid ann{.n_r = 10, .n_theta = 16, .margin = 1e-3, .r_min = 0.3};
    CHECK(ann.radius(0) > 0.3);
    CHECK(ann.radius(9) < 0.999);
    CHECK_THROWS_AS((SampleGrid{.n_r = 0}).validate(), InputError);
    CHECK_THROWS_AS((SampleGrid{.margin = 0.5}).validate(), InputError);
    CHECK_THROWS_AS((SampleGrid{.margin = 0.0}).validate(), InputError);
}

TEST_CASE("jet_at on worked examples") {
    const WirtingerJet j0 = jet_at(kFixing1, 0.0);
    CHECK(std::abs(j0.w) == 0.0);
    CHECK(std::abs(j0.wz - 1.5) < 1e-15);
    CHECK(std::abs(j0.wzbar) == 0.0);
    CHECK(std::abs(j0.lap) == 0.0);

    const cd z(0.3, -0.7);
    const WirtingerJet id = jet_at(MappingExpr::identity(), z);
    CHECK(id.w == z);
    CHECK(id.wz == cd(1.0));
    CHECK(id.wzbar == cd(0.0));
    CHECK(id.lap == cd(0.0));

    const double r = 0.8;
    const WirtingerJet j = jet_at(kDoubleCover, std::polar(r, 0.4));
    CHECK(std::abs(j.wz) == doctest::Approx(8 * std::pow(r, 5) - 7 * std::pow(r, 11)).epsilon(1e-13));
    CHECK(std::abs(j.wzbar) == doctest::Approx(std::abs(4 * std::pow(r, 5) - 5 * std::pow(r, 11))).epsilon(1e-13));
}

TEST_CASE("grad_stats arithmetic") {
    GradStats s = grad_stats({0.0, 1.0, 0.0, 0.0});
    CHECK(s.grad_norm == 1.0);
    CHECK(s.l_grad == 1.0);
    CHECK(s.jac == 1.0);
    s = grad_stats({0.0, 3.0, cd(0, 4), 0.0});
    CHECK(s.grad_norm == doctest::Approx(7));
    CHECK(s.l_grad == doctest::Approx(1));
    CHECK(s.jac == doctest::Approx(-7));
    for (double r : {0.1, 0.5, 0.9, 0.999}) {
        const GradStats t = grad_stats(jet_at(kFixing1, std::polar(r, 1.3)));
        CHECK(t.grad_norm == doctest::Approx((3 - r * r) / 2).epsilon(1e-14));
        CHECK(t.l_grad == doctest::Approx(3 * (1 - r * r) / 2).epsilon(1e-12));
    }
}

TEST_CASE("operator_norm_2x2 against an angle sweep") {
    SingularValues sv = operator_norm_2x2({1, 0, 0, 1});
    CHECK(sv.norm == doctest::Approx(1));
    CHECK(sv.l == doctest::Approx(1));
    sv = operator_norm_2x2({2, 0, 0, 1});
    CHECK(sv.norm == doctest::Approx(2));
    CHECK(sv.l == doctest::Approx(1));
    sv = operator_norm_2x2({0, 0, 0, 0});
    CHECK(sv.norm == 0.0);
    CHECK(sv.l == 0.0);

    std::mt19937_64 rng(testing_support::kSeed + 10);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int k = 0; k < 20; ++k) {
        const Matrix2 A{u(rng), u(rng), u(rng), u(rng)};
        const auto [hi, lo] = oracle::singular_values_sweep(A.a, A.b, A.c, A.d, 100000);
        const SingularValues s = operator_norm_2x2(A);
        CHECK(std::abs(s.norm - hi) <= 1e-8 * std::max(1.0, hi));
        CHECK(std::abs(s.l - lo) <= 1e-8 * std::max(1.0, hi));
    }
}

TEST_CASE("fd_jet on simple maps") {
    const WirtingerJet sq = fd_jet([](cd z) { return z * z; }, cd(1, 1), 1e-4);
    CHECK(std::abs(sq.wz - cd(2, 2)) < 1e-7);
    CHECK(std::abs(sq.wzbar) < 1e-7);
    const WirtingerJet cj = fd_jet([](cd z) { return std::conj(z); }, cd(0.2, 0.1), 1e-4);
    CHECK(std::abs(cj.wz) < 1e-7);
    CHECK(std::abs(cj.wzbar - 1.0) < 1e-7);
    const WirtingerJet ab = fd_jet([](cd z) { return cd(std::norm(z)); }, cd(0.2, 0.1));
    CHECK(std::abs(ab.lap - 4.0) < 1e-6);
    CHECK_THROWS_AS(fd_jet([](cd z) { return std::abs(z) < 0.5 ? cd(NAN) : z; }, cd(0.5, 0)), DomainError);
}

TEST_CASE("fd_jet agrees with jet_at on the double-cover map") {
    std::mt19937_64 rng(testing_support::kSeed + 11);
    const PointEval f = [](cd z) { return kDoubleCover.eval(z); };
    for (int k = 0; k < 30; ++k) {
        const cd z = random_point(rng);
        const WirtingerJet a = jet_at(kDoubleCover, z), b = fd_jet(f, z);
        CHECK(rel(b.wz, a.wz) <= 1e-6);
        CHECK(rel(b.wzbar, a.wzbar) <= 1e-6);
        CHECK(rel(b.lap, a.lap) <= 1e-6);
    }
}

TEST_CASE("property: fd_jet agrees with jet_at on random polynomials of degree <= 12") {
    std::mt19937_64 rng(testing_support::kSeed + 12);
    double worst = 0.0;
    for (int p = 0; p < 10; ++p) {
        const MappingExpr e = random_poly(rng, 12);
        const PointEval f = [&e](cd z) { return e.eval(z); };
        for (int k = 0; k < 30; ++k) {
            const cd z = random_point(rng);
            const WirtingerJet a = jet_at(e, z), b = fd_jet(f, z);
            worst = std::max({worst, rel(b.wz, a.wz), rel(b.wzbar, a.wzbar)});
        }
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("property: Laplacian equals four times the FD mixed partial") {
    std::mt19937_64 rng(testing_support::kSeed + 13);
    for (int p = 0; p < 10; ++p) {
        const MappingExpr e = random_poly(rng, 10);
        const PointEval f = [&e](cd z) { return e.eval(z); };
        for (int k = 0; k < 10; ++k) {
            const cd z = random_point(rng, 0.9);
            CHECK(rel(fd_jet(f, z).lap, laplacian(e).eval(z)) <= 1e-5);
        }
    }
}

TEST_CASE("property: |J| = |grad w| l(grad w) and the real Jacobian has singular values (|grad w|, l)") {
    std::mt19937_64 rng(testing_support::kSeed + 14);
    for (int p = 0; p < 10; ++p) {
        const MappingExpr e = random_poly(rng, 8);
        for (const GridSample& s : sample_grid(e, {.n_r = 8, .n_theta = 16, .margin = 1e-2})) {
            const GradStats& g = s.stats;
            CHECK(g.grad_norm >= g.l_grad);
            CHECK(std::abs(std::abs(g.jac) - g.grad_norm * g.l_grad) <= 1e-10 * std::max(1.0, std::abs(g.jac)));
            const SingularValues sv = operator_norm_2x2(real_jacobian(s.jet));
            CHECK(std::abs(sv.norm - g.grad_norm) <= 1e-9 * std::max(1.0, g.grad_norm));
            CHECK(std::abs(sv.l - g.l_grad) <= 1e-9 * std::max(1.0, g.grad_norm));
        }
    }
}

TEST_CASE("Lipschitz and coLipschitz estimates") {
    const SampleGrid grid;
    CHECK(lipschitz_estimate(MappingExpr::identity(), grid).value == doctest::Approx(1));
    CHECK(colipschitz_estimate(MappingExpr::identity(), grid).value == doctest::Approx(1));
    const GridEstimate lip = lipschitz_estimate(kDoubleCover, grid);
    CHECK(lip.value < 12);
    CHECK(lip.grid.n_r == grid.n_r);
    CHECK(lipschitz_estimate(kFixing1, grid).value <= 1.5);

    double prev = INFINITY;
    for (double m : {1e-2, 1e-3, 1e-4}) {
        const double c = colipschitz_estimate(kFixing1, {.margin = m}).value;
        CHECK(c < prev);
        prev = c;
    }
    CHECK(prev < 0.05);
}

TEST_CASE("grid reductions break ties at the lowest index") {
    const GridEstimate e = lipschitz_estimate(MappingExpr::identity(), {.n_r = 5, .n_theta = 7});
    CHECK(e.index == 0);
    CHECK(std::abs(e.witness - SampleGrid{.n_r = 5, .n_theta = 7}.point(0)) == 0.0);
}

TEST_CASE("PDE inequality |Delta w| <= M |grad w|^2 + N") {
    const SampleGrid grid;
    CHECK(pde_inequality_check(kDoubleCover, 1, 76, grid).holds);
    for (double M : {1.0, 10.0, 1e3, 1e6}) {
        const InequalityReport r = pde_inequality_check(kDoubleCover, M, 0, grid);
        CHECK_FALSE(r.holds);
        if (M >= 1e3) CHECK(std::abs(r.witness) < 0.3);
    }
    CHECK(pde_inequality_check(parse("z^5 - 3*z^2 + 1"), 0, 0, grid).holds);
}

TEST_CASE("product inequality |Delta w| <= M |w_z w_zbar|") {
    const SampleGrid grid;
    for (double M : {1.0, 1e3, 1e6}) {
        const InequalityReport r = product_inequality_check(kDoubleCover, M, grid);
        CHECK_FALSE(r.holds);
        // Near 0 the ratio |Delta w| / |w_z w_zbar| behaves like 2 / r^6, so
        // violations live inside r < (2/M)^(1/6).
        CHECK(std::abs(r.witness) < 1.05 * std::pow(2.0 / M, 1.0 / 6.0));
    }
    CHECK(product_inequality_check(parse("z^3 + conj(z)^2"), 0.0, grid).holds);
    CHECK_FALSE(product_inequality_check(parse("abs2(z)"), 1.0, grid).holds);
}

TEST_CASE("polar decomposition quantities") {
    const SampleGrid ann{.n_r = 60, .n_theta = 64, .margin = 1e-3, .r_min = 0.3};
    const PolarDecompositionReport id = polar_decomposition_check(MappingExpr::identity(), 1, 0, ann);
    CHECK(id.holds);
    for (double r : {0.4, 0.9}) {
        const PolarQuantities q = polar_quantities(jet_at(MappingExpr::identity(), std::polar(r, 2.0)));
        CHECK(q.grad_rho == doctest::Approx(1));
        CHECK(q.rho_grad_s == doctest::Approx(1));
        const PolarQuantities q2 = polar_quantities(jet_at(parse("z^2"), std::polar(r, 2.0)));
        CHECK(q2.grad_rho == doctest::Approx(2 * r));
    }
    CHECK(polar_decomposition_check(parse("z^2"), 1, 0, ann).holds);
    CHECK(polar_decomposition_check(kDoubleCover, 1, 144, ann).holds);
    CHECK_THROWS_AS(polar_decomposition_check(parse("z - 0.4995"), 1, 0, {.n_r = 1, .n_theta = 1, .margin = 1e-3}),
                    DomainError);
}

TEST_CASE("property: l(grad w) <= |grad rho| <= |grad w| away from zeros of w") {
    std::mt19937_64 rng(testing_support::kSeed + 15);
    for (int p = 0; p < 10; ++p) {
        const MappingExpr e = random_poly(rng, 8);
        for (int k = 0; k < 50; ++k) {
            const WirtingerJet j = jet_at(e, random_point(rng));
            if (std::abs(j.w) < kZeroOfW) continue;
            const PolarQuantities q = polar_quantities(j);
            CHECK(q.l_grad <= q.grad_rho + 1e-9 * (1 + q.grad_norm));
            CHECK(q.grad_rho <= q.grad_norm + 1e-9 * (1 + q.grad_norm));
        }
    }
}

TEST_CASE("rho-harmonic residuals") {
    const SampleGrid grid{.n_r = 40, .n_theta = 64};
    const LogRhoW zero = [](cd) { return cd(0); };
    CHECK(rho_harmonic_residual(parse("z^3 + 2*conj(z)"), zero, grid) < 1e-12);
    const LogRhoW phi = phi_harmonic_weight([](cd w) { return 2.0 + w * w; }, [](cd w) { return 2.0 * w; });
    CHECK(rho_harmonic_residual(MappingExpr::identity(), phi, grid) == 0.0);

    // w = z + conj(z)^2/4 is injective on the disk. Choosing (log rho)_w
    // so that the equation holds at every image point drives the residual to 0.
    const MappingExpr w = parse("z + conj(z)^2/4");
    const MappingExpr wz = d_z(w), wzb = d_zbar(w), lap = laplacian(w);
    const auto preimage = [&w](cd target) {
        cd z = target;
        for (int it = 0; it < 60; ++it) {
            const WirtingerJet j = jet_at(w, z);
            // Solve wz dz + wzbar conj(dz) = target - w(z).
            const cd r = target - j.w;
            const cd det = std::norm(j.wz) - std::norm(j.wzbar);
            z += (std::conj(j.wz) * r - j.wzbar * std::conj(r)) / det;
        }
        return z;
    };
    const LogRhoW manufactured = [&](cd target) {
        const cd z = preimage(target);
        return -(lap.eval(z) / 4.0) / (wz.eval(z) * wzb.eval(z));
    };
    const SampleGrid ann{.n_r = 10, .n_theta = 16, .margin = 0.05, .r_min = 0.2};
    CHECK(rho_harmonic_residual(w, manufactured, ann) <= 1e-8);
}

TEST_CASE("approximately analytic constant") {
    const SampleGrid grid;
    CHECK(approx_analytic_constant(parse("z + 2"), grid).value == doctest::Approx(0.0));
    const double r = 1 - 1e-3;
    CHECK(approx_analytic_constant(parse("2 + abs2(z)"), grid).value ==
          doctest::Approx(0.999 * (1 - 0.5 / 200) / (2 + std::pow(0.999 * (1 - 0.5 / 200), 2))).epsilon(1e-6));
    CHECK(approx_analytic_constant(parse("2 + abs2(z)"), grid).value < r / (2 + r * r));
    const GridEstimate c = approx_analytic_constant(parse("conj(z)"), {.r_min = 0.5});
    CHECK(c.value == doctest::Approx(2.0).epsilon(3e-3));
    CHECK_THROWS_AS(approx_analytic_constant(parse("z - 0.4995"), {.n_r = 1, .n_theta = 1, .margin = 1e-3}),
                    DomainError);
}

TEST_CASE("grid evaluation is independent of the worker count") {
    const SampleGrid grid{.n_r = 50, .n_theta = 64};
    set_thread_count(1);
    const auto one = sample_grid(kDoubleCover, grid);
    const GridEstimate lip1 = lipschitz_estimate(kDoubleCover, grid);
    set_thread_count(4);
    const auto four = sample_grid(kDoubleCover, grid);
    const GridEstimate lip4 = lipschitz_estimate(kDoubleCover, grid);
    set_thread_count(0);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].jet.w == four[i].jet.w);
    CHECK(lip1.value == lip4.value);
    CHECK(lip1.index == lip4.index);
}

TEST_CASE("grid CSV has the documented header and one row per point") {
    std::ostringstream os;
    write_grid_csv(os, sample_grid(kFixing1, {.n_r = 3, .n_theta = 4}));
    const std::string s = os.str();
    CHECK(s.rfind("r,theta,grad_norm,l_grad,jac,lap_abs\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 13);
}
