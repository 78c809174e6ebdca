#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "quasidisk/expr.hpp"

namespace quasidisk {

/// Values of a mapping and its Wirtinger derivatives at one point.
struct WirtingerJet {
    cd w;
    cd wz;
    cd wzbar;
    cd lap;  // Delta w = 4 w_{z zbar}
};

/// |grad w| = |w_z| + |w_zbar|, l(grad w) = ||w_z| - |w_zbar||, J_w = |w_z|^2 - |w_zbar|^2.
struct GradStats {
    double grad_norm = 0.0;
    double l_grad = 0.0;
    double jac = 0.0;
};

/// Polar sample grid r_j e^{i theta_k} on the disk (or an annulus when r_min > 0):
///   r_j = r_min + (j + 1/2) (1 - margin - r_min) / n_r,  theta_k = 2 pi k / n_theta.
/// Points are ordered radius-major: index = j * n_theta + k.
struct SampleGrid {
    int n_r = 200;
    int n_theta = 256;
    double margin = 1e-3;
    double r_min = 0.0;

    void validate() const;
    std::size_t size() const { return static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta); }
    double radius(int j) const;
    double angle(int k) const;
    cd point(std::size_t index) const;
};

class JetEvaluator {
public:
    explicit JetEvaluator(MappingExpr e);
    WirtingerJet operator()(cd z) const;
    const MappingExpr& mapping() const { return e_; }

private:
    MappingExpr e_, wz_, wzbar_, lap_;
    int max_a_ = 0;
    int max_b_ = 0;
};

WirtingerJet jet_at(const MappingExpr& e, cd z);
GradStats grad_stats(const WirtingerJet& j);

/// Row-major real 2x2 matrix [[a, b], [c, d]].
struct Matrix2 {
    double a = 0, b = 0, c = 0, d = 0;
};

/// Real Jacobian [[u_x, u_y], [v_x, v_y]] of w = u + i v.
Matrix2 real_jacobian(const WirtingerJet& j);

struct SingularValues {
    double norm = 0.0;  // max |A h| over |h| = 1
    double l = 0.0;     // min |A h| over |h| = 1
};

SingularValues operator_norm_2x2(const Matrix2& A);

using PointEval = std::function<cd(cd)>;

/// Steps for the finite-difference jet. First derivatives use central
/// differences at h; the 5-point Laplacian uses h_lap. Each is followed by one
/// Richardson step against half the step.
struct FdSteps {
    double h = 1e-5;
    double h_lap = 1e-3;
};

WirtingerJet fd_jet(const PointEval& f, cd z, const FdSteps& steps = {});
WirtingerJet fd_jet(const PointEval& f, cd z, double h);

struct GridSample {
    cd z;
    WirtingerJet jet;
    GradStats stats;
};

std::vector<GridSample> sample_grid(const MappingExpr& e, const SampleGrid& grid);

/// A sup or inf over grid points. It is an estimate of the true extremum and
/// carries the grid it was taken on.
struct GridEstimate {
    double value = 0.0;
    cd witness;
    std::size_t index = 0;
    SampleGrid grid;
};

/// sup of |grad w| over the grid (a lower estimate of the Lipschitz bound).
GridEstimate lipschitz_estimate(const MappingExpr& e, const SampleGrid& grid);
/// inf of l(grad w) over the grid (an upper estimate of the coLipschitz bound).
GridEstimate colipschitz_estimate(const MappingExpr& e, const SampleGrid& grid);

struct InequalityReport {
    bool holds = true;
    double worst_margin = 0.0;  // sup of (lhs - rhs)
    cd witness;
};

inline constexpr double kInequalityTolerance = 1e-10;

/// |Delta w| <= M |grad w|^2 + N on the grid.
InequalityReport pde_inequality_check(const MappingExpr& e, double M, double N, const SampleGrid& grid);
/// |Delta w| <= M |w_z w_zbar| on the grid.
InequalityReport product_inequality_check(const MappingExpr& e, double M, const SampleGrid& grid);

/// Quantities of the polar decomposition w = rho S at one point.
struct PolarQuantities {
    double rho = 0.0;
    double grad_rho = 0.0;    // |grad rho|, norm of the 1x2 row
    double rho_grad_s = 0.0;  // rho |grad S|
    double grad_norm = 0.0;
    double l_grad = 0.0;
};

PolarQuantities polar_quantities(const WirtingerJet& j);

inline constexpr double kZeroOfW = 1e-9;

struct PolarDecompositionReport {
    bool holds = true;
    double worst_grad_bound = 0.0;   // sup |grad w| - K |grad rho| - sqrt(K')
    double worst_lower_angle = 0.0;  // sup (|grad rho| - sqrt(K'))/K - rho |grad S|
    double worst_upper_angle = 0.0;  // sup rho |grad S| - K |grad rho| - sqrt(K')
    double worst_sandwich = 0.0;     // sup max(l - |grad rho|, |grad rho| - |grad w|)
    cd witness;                      // point of the largest violation among the above
};

/// Throws DomainError if |w| < kZeroOfW at a grid point.
PolarDecompositionReport polar_decomposition_check(const MappingExpr& e, double K, double Kp, const SampleGrid& grid);

/// (log rho)_w composed with w, as a function of the image point w.
using LogRhoW = std::function<cd(cd)>;

/// sup over the grid of |w_{z zbar} + logrho_w(w) w_z w_zbar|.
double rho_harmonic_residual(const MappingExpr& e, const LogRhoW& logrho_w, const SampleGrid& grid);

/// The weight phi'/(2 phi) that turns the rho-harmonic equation into the
/// phi-harmonic one for rho = |phi|.
LogRhoW phi_harmonic_weight(std::function<cd(cd)> phi, std::function<cd(cd)> dphi);

/// Least C with |h_zbar| <= C |h| on the grid. Throws DomainError where |h| < 1e-12.
GridEstimate approx_analytic_constant(const MappingExpr& h, const SampleGrid& grid);

/// CSV columns: r,theta,grad_norm,l_grad,jac,lap_abs
void write_grid_csv(std::ostream& out, const std::vector<GridSample>& samples);

}  // namespace quasidisk
