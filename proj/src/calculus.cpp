#include "quasidisk/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>

#include "quasidisk/parallel.hpp"

namespace quasidisk {

void SampleGrid::validate() const {
    if (n_r < 1 || n_theta < 1) throw InputError("grid needs n_r >= 1 and n_theta >= 1");
    if (!(margin > 0.0 && margin < 0.5)) throw InputError("grid margin must lie in (0, 0.5)");
    if (!(r_min >= 0.0 && r_min < 1.0 - margin)) throw InputError("grid r_min must lie in [0, 1 - margin)");
}

double SampleGrid::radius(int j) const { return r_min + (j + 0.5) * (1.0 - margin - r_min) / n_r; }

double SampleGrid::angle(int k) const { return 2.0 * std::numbers::pi * k / n_theta; }

cd SampleGrid::point(std::size_t index) const {
    const int j = static_cast<int>(index / static_cast<std::size_t>(n_theta));
    const int k = static_cast<int>(index % static_cast<std::size_t>(n_theta));
    return std::polar(radius(j), angle(k));
}

JetEvaluator::JetEvaluator(MappingExpr e)
    : e_(std::move(e)), wz_(d_z(e_)), wzbar_(d_zbar(e_)), lap_(laplacian(e_)), max_a_(e_.max_a()), max_b_(e_.max_b()) {}

WirtingerJet JetEvaluator::operator()(cd z) const {
    const PowerTable pt(z, max_a_, max_b_);
    return {pt.eval(e_), pt.eval(wz_), pt.eval(wzbar_), pt.eval(lap_)};
}

WirtingerJet jet_at(const MappingExpr& e, cd z) { return JetEvaluator(e)(z); }

GradStats grad_stats(const WirtingerJet& j) {
    const double a = std::abs(j.wz);
    const double b = std::abs(j.wzbar);
    return {a + b, std::abs(a - b), (a - b) * (a + b)};
}

Matrix2 real_jacobian(const WirtingerJet& j) {
    // w_x = w_z + w_zbar, w_y = i (w_z - w_zbar)
    const cd wx = j.wz + j.wzbar;
    const cd wy = cd(0.0, 1.0) * (j.wz - j.wzbar);
    return {wx.real(), wy.real(), wx.imag(), wy.imag()};
}

SingularValues operator_norm_2x2(const Matrix2& A) {
    // Eigenvalues of A^T A from its trace and determinant.
    const double s = A.a * A.a + A.b * A.b + A.c * A.c + A.d * A.d;
    const double det = A.a * A.d - A.b * A.c;
    const double p = A.a * A.a + A.c * A.c - A.b * A.b - A.d * A.d;
    const double q = 2.0 * (A.a * A.b + A.c * A.d);
    const double disc = std::hypot(p, q);
    const double smax = std::sqrt(0.5 * (s + disc));
    const double smin = smax > 0.0 ? std::abs(det) / smax : 0.0;
    return {smax, smin};
}

WirtingerJet fd_jet(const PointEval& f, cd z, const FdSteps& steps) {
    if (!(steps.h > 0.0) || !(steps.h_lap > 0.0)) throw InputError("finite-difference steps must be positive");
    auto call = [&](cd p) {
        const cd v = f(p);
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DomainError("nonfinite evaluation at z = (" + std::to_string(p.real()) + ", " +
                              std::to_string(p.imag()) + ") during finite differencing");
        return v;
    };
    const cd I(0.0, 1.0);
    const cd w0 = call(z);

    auto gradient = [&](double h) {
        const cd wx = (call(z + h) - call(z - h)) / (2.0 * h);
        const cd wy = (call(z + I * h) - call(z - I * h)) / (2.0 * h);
        return std::pair{wx, wy};
    };
    const auto [wx1, wy1] = gradient(steps.h);
    const auto [wx2, wy2] = gradient(0.5 * steps.h);
    const cd wx = (4.0 * wx2 - wx1) / 3.0;
    const cd wy = (4.0 * wy2 - wy1) / 3.0;

    auto five_point = [&](double h) {
        return (call(z + h) + call(z - h) + call(z + I * h) + call(z - I * h) - 4.0 * w0) / (h * h);
    };
    const cd lap = (4.0 * five_point(0.5 * steps.h_lap) - five_point(steps.h_lap)) / 3.0;

    return {w0, 0.5 * (wx - I * wy), 0.5 * (wx + I * wy), lap};
}

WirtingerJet fd_jet(const PointEval& f, cd z, double h) { return fd_jet(f, z, FdSteps{h, std::max(h, 1e-3)}); }

std::vector<GridSample> sample_grid(const MappingExpr& e, const SampleGrid& grid) {
    grid.validate();
    const JetEvaluator jet(e);
    std::vector<GridSample> out(grid.size());
    parallel_for(out.size(), [&](std::size_t i) {
        const cd z = grid.point(i);
        const WirtingerJet j = jet(z);
        out[i] = {z, j, grad_stats(j)};
    });
    return out;
}

namespace {

// Deterministic arg-max in index order; ties keep the lowest index.
template <class Value>
GridEstimate arg_extremum(const std::vector<GridSample>& samples, const SampleGrid& grid, Value value, bool maximize) {
    if (samples.empty()) throw InputError("empty grid");
    GridEstimate best{value(samples[0]), samples[0].z, 0, grid};
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double v = value(samples[i]);
        if (maximize ? v > best.value : v < best.value) best = {v, samples[i].z, i, grid};
    }
    return best;
}

template <class Margin>
InequalityReport inequality(const std::vector<GridSample>& samples, const SampleGrid& grid, Margin margin) {
    const GridEstimate worst = arg_extremum(samples, grid, margin, true);
    return {worst.value <= kInequalityTolerance, worst.value, worst.witness};
}

}  // namespace

GridEstimate lipschitz_estimate(const MappingExpr& e, const SampleGrid& grid) {
    return arg_extremum(sample_grid(e, grid), grid, [](const GridSample& s) { return s.stats.grad_norm; }, true);
}

GridEstimate colipschitz_estimate(const MappingExpr& e, const SampleGrid& grid) {
    return arg_extremum(sample_grid(e, grid), grid, [](const GridSample& s) { return s.stats.l_grad; }, false);
}

InequalityReport pde_inequality_check(const MappingExpr& e, double M, double N, const SampleGrid& grid) {
    if (M < 0.0 || N < 0.0) throw InputError("M and N must be nonnegative");
    return inequality(sample_grid(e, grid), grid, [&](const GridSample& s) {
        return std::abs(s.jet.lap) - M * s.stats.grad_norm * s.stats.grad_norm - N;
    });
}

InequalityReport product_inequality_check(const MappingExpr& e, double M, const SampleGrid& grid) {
    if (M < 0.0) throw InputError("M must be nonnegative");
    return inequality(sample_grid(e, grid), grid,
                      [&](const GridSample& s) { return std::abs(s.jet.lap) - M * std::abs(s.jet.wz * s.jet.wzbar); });
}

PolarQuantities polar_quantities(const WirtingerJet& j) {
    const Matrix2 J = real_jacobian(j);
    const double u = j.w.real();
    const double v = j.w.imag();
    const double rho = std::abs(j.w);
    PolarQuantities q;
    q.rho = rho;
    const SingularValues sv = operator_norm_2x2(J);
    q.grad_norm = sv.norm;
    q.l_grad = sv.l;
    if (rho == 0.0) return q;
    // grad rho = w^T (grad w) / |w|
    const double rx = (u * J.a + v * J.c) / rho;
    const double ry = (u * J.b + v * J.d) / rho;
    q.grad_rho = std::hypot(rx, ry);
    // rho grad S = grad w - (w/|w|) (w^T grad w)/|w|
    const double nu = u / rho;
    const double nv = v / rho;
    const Matrix2 P{J.a - nu * rx, J.b - nu * ry, J.c - nv * rx, J.d - nv * ry};
    q.rho_grad_s = operator_norm_2x2(P).norm;
    return q;
}

PolarDecompositionReport polar_decomposition_check(const MappingExpr& e, double K, double Kp, const SampleGrid& grid) {
    if (K < 1.0 || Kp < 0.0) throw InputError("need K >= 1 and K' >= 0");
    const auto samples = sample_grid(e, grid);
    const double sk = std::sqrt(Kp);
    PolarDecompositionReport rep;
    rep.worst_grad_bound = rep.worst_lower_angle = rep.worst_upper_angle = rep.worst_sandwich =
        -std::numeric_limits<double>::infinity();
    double worst_any = -std::numeric_limits<double>::infinity();
    for (const auto& s : samples) {
        if (std::abs(s.jet.w) < kZeroOfW)
            throw DomainError("w vanishes on the grid near z = (" + std::to_string(s.z.real()) + ", " +
                              std::to_string(s.z.imag()) + ")");
        const PolarQuantities q = polar_quantities(s.jet);
        const double m1 = q.grad_norm - K * q.grad_rho - sk;
        const double m2 = (q.grad_rho - sk) / K - q.rho_grad_s;
        const double m3 = q.rho_grad_s - K * q.grad_rho - sk;
        const double m4 = std::max(q.l_grad - q.grad_rho, q.grad_rho - q.grad_norm);
        rep.worst_grad_bound = std::max(rep.worst_grad_bound, m1);
        rep.worst_lower_angle = std::max(rep.worst_lower_angle, m2);
        rep.worst_upper_angle = std::max(rep.worst_upper_angle, m3);
        rep.worst_sandwich = std::max(rep.worst_sandwich, m4);
        const double any = std::max({m1, m2, m3, m4});
        if (any > worst_any) {
            worst_any = any;
            rep.witness = s.z;
        }
    }
    rep.holds = worst_any <= 1e-9;
    return rep;
}

double rho_harmonic_residual(const MappingExpr& e, const LogRhoW& logrho_w, const SampleGrid& grid) {
    const auto samples = sample_grid(e, grid);
    double worst = 0.0;
    for (const auto& s : samples) {
        const cd r = 0.25 * s.jet.lap + logrho_w(s.jet.w) * s.jet.wz * s.jet.wzbar;
        worst = std::max(worst, std::abs(r));
    }
    return worst;
}

LogRhoW phi_harmonic_weight(std::function<cd(cd)> phi, std::function<cd(cd)> dphi) {
    return [phi = std::move(phi), dphi = std::move(dphi)](cd w) { return dphi(w) / (2.0 * phi(w)); };
}

GridEstimate approx_analytic_constant(const MappingExpr& h, const SampleGrid& grid) {
    const auto samples = sample_grid(h, grid);
    for (const auto& s : samples)
        if (std::abs(s.jet.w) < 1e-12)
            throw DomainError("h vanishes on the grid near z = (" + std::to_string(s.z.real()) + ", " +
                              std::to_string(s.z.imag()) + ")");
    return arg_extremum(samples, grid, [](const GridSample& s) { return std::abs(s.jet.wzbar) / std::abs(s.jet.w); },
                        true);
}

void write_grid_csv(std::ostream& out, const std::vector<GridSample>& samples) {
    out << "r,theta,grad_norm,l_grad,jac,lap_abs\n";
    out << std::setprecision(17);
    for (const auto& s : samples) {
        double theta = std::arg(s.z);
        if (theta < 0.0) theta += 2.0 * std::numbers::pi;
        out << std::abs(s.z) << ',' << theta << ',' << s.stats.grad_norm << ',' << s.stats.l_grad << ','
            << s.stats.jac << ',' << std::abs(s.jet.lap) << '\n';
    }
}

}  // namespace quasidisk
