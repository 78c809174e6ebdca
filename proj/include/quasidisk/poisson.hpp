#pragma once

// Poisson extension P[f], Green potential G[g] and the solution w = P[f] - G[g]
// of Delta w = g in the unit disk with boundary values f.

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "quasidisk/calculus.hpp"

namespace quasidisk {

/// Boundary values f(e^{i theta_k}) at theta_k = 2 pi k / n, n a power of two >= 16.
/// When every sample is unimodular the angular lift psi (f = e^{i psi}) is kept
/// together with its degree: psi(theta + 2 pi) = psi(theta) + 2 pi degree.
class BoundaryData {
public:
    static BoundaryData from_samples(std::vector<cd> samples);
    static BoundaryData from_function(const std::function<cd(double)>& f, int n);
    static BoundaryData from_expr(const MappingExpr& e, int n);
    /// psi_k sampled at theta_k; samples become e^{i psi_k}.
    static BoundaryData from_psi(std::vector<double> psi);
    static BoundaryData from_psi_function(const std::function<double(double)>& psi, int n);
    /// CSV with columns theta,re,im (header optional); thetas must be the uniform nodes.
    static BoundaryData read_csv(std::istream& in);

    int size() const { return static_cast<int>(samples_.size()); }
    std::span<const cd> samples() const { return samples_; }
    double theta(int k) const;

    bool has_psi() const { return !psi_.empty(); }
    std::span<const double> psi() const { return psi_; }
    int degree() const { return degree_; }
    bool psi_increasing() const;
    /// Spectral derivative of psi at the sample angles. Throws InputError without psi.
    const std::vector<double>& dpsi() const;

    /// Fourier coefficient F_m of the trigonometric interpolant, |m| <= n/2
    /// (the Nyquist term is split evenly between +n/2 and -n/2).
    cd coefficient(int m) const;
    /// Trigonometric interpolant at an arbitrary angle.
    cd value_at(double theta) const;

    void write_csv(std::ostream& out) const;

private:
    explicit BoundaryData(std::vector<cd> samples);
    void lift_psi();

    std::vector<cd> samples_;
    std::vector<cd> coeffs_;  // DFT / n, standard FFT order
    std::vector<double> psi_;
    std::vector<double> dpsi_;
    int degree_ = 0;
};

/// Source term g of Delta w = g, given as a polynomial or as samples on the
/// midpoint polar grid rho_i = (i + 1/2)/n_r, phi_j = 2 pi j / n_theta.
class SourceField {
public:
    static SourceField from_expr(MappingExpr g);
    static SourceField from_polar_samples(int n_r, int n_theta, std::vector<cd> values);
    static SourceField zero() { return from_expr(MappingExpr{}); }

    cd operator()(cd w) const;
    /// |g|_inf estimate: max over a dense sample times (1 + 1e-3).
    double sup_norm() const { return sup_norm_; }
    bool is_zero() const { return zero_; }
    const std::optional<MappingExpr>& expr() const { return expr_; }

private:
    SourceField() = default;
    void estimate_sup();

    std::optional<MappingExpr> expr_;
    int n_r_ = 0;
    int n_theta_ = 0;
    std::vector<cd> values_;
    double sup_norm_ = 0.0;
    bool zero_ = false;
};

struct QuadratureParams {
    int n_theta = 512;           // global angular nodes
    int n_r = 256;               // global radial nodes (midpoint rule)
    double epsilon_split = 0.05; // radius of the locally treated disk around z
    int local_angles = 32;
    int local_radial = 20;       // Gauss-Legendre nodes in t with rho = rho_max t^2
    // When set, every potential evaluation is repeated with 2 n_r and a
    // NonconvergenceError is thrown if the two differ by more than this.
    std::optional<double> tolerance;

    void validate() const;
};

struct GreenGradient {
    cd gz;
    cd gzbar;
};

/// G(z, w) = (1/2 pi) log |(1 - z conj w)/(z - w)|.
double green_kernel(cd z, cd w);
/// d/dz G(z, w) = (1/4 pi) (-conj w/(1 - z conj w) - 1/(z - w)); d/dzbar G is its conjugate.
cd green_kernel_dz(cd z, cd w);

class GreenOperator {
public:
    GreenOperator(SourceField g, QuadratureParams q = {});
    ~GreenOperator();
    GreenOperator(GreenOperator&&) noexcept;
    GreenOperator& operator=(GreenOperator&&) noexcept;

    const SourceField& source() const { return g_; }
    const QuadratureParams& params() const { return q_; }

    /// G[g](z) for |z| < 1.
    cd potential(cd z) const;
    /// (d/dz G[g], d/dzbar G[g]) by differentiating the kernel under the integral.
    GreenGradient gradient(cd z) const;

    struct GridValues {
        std::vector<cd> potential;
        std::vector<GreenGradient> gradient;
    };
    /// All grid points at once. Uses FFT convolution along the angle when
    /// grid.n_theta divides n_theta, otherwise pointwise evaluation.
    GridValues on_grid(const SampleGrid& grid) const;

private:
    struct Impl;
    SourceField g_;
    QuadratureParams q_;
    std::unique_ptr<Impl> impl_;
};

/// Poisson integral of the trigonometric interpolant of f, |z| < 1.
cd poisson_extend(const BoundaryData& f, cd z);
/// True when |z| is close enough to 1 that poisson_extend loses accuracy
/// for this sample count.
bool poisson_near_boundary(const BoundaryData& f, cd z);

cd green_potential(const SourceField& g, cd z, const QuadratureParams& q = {});
GreenGradient green_gradient(const SourceField& g, cd z, const QuadratureParams& q = {});

class PoissonSolution {
public:
    PoissonSolution(BoundaryData f, SourceField g, QuadratureParams q = {});

    cd operator()(cd z) const;
    const BoundaryData& boundary() const { return f_; }
    const GreenOperator& green() const { return green_; }

private:
    BoundaryData f_;
    GreenOperator green_;
};

cd solve(const BoundaryData& f, const SourceField& g, cd z, const QuadratureParams& q = {});

struct LemmaCReport {
    double g_sup = 0.0;
    // Interior gradient bound on the grid: sup max(|G_z|, |G_zbar|) <= g_sup / 3 + tol.
    double interior_sup = 0.0;
    double interior_bound = 0.0;
    bool interior_holds = true;
    cd interior_witness;
    // Boundary gradient bound at r = 1 - 1e-4: max <= (g_sup / 4) (1 + slack).
    double boundary_radius = 1.0 - 1e-4;
    double boundary_sup = 0.0;
    double boundary_bound = 0.0;
    bool boundary_holds = true;
    // Radial convergence of grad G along r = 0.9, 0.99, 0.999:
    // worst ratio of successive gradient increments (must be < 1).
    double radial_worst_ratio = 0.0;
    bool radial_holds = true;

    bool holds() const { return interior_holds && boundary_holds && radial_holds; }
};

inline constexpr double kLemmaCInteriorTolerance = 1e-3;
inline constexpr double kLemmaCBoundarySlack = 0.05;

LemmaCReport lemma_c_verifier(const GreenOperator& green, const SampleGrid& grid,
                              std::span<const double> boundary_thetas);

/// (1/2 pi) int |f(e^{i theta_k}) - f(e^{i phi})|^2 / |e^{i theta_k} - e^{i phi}|^2 d phi
/// by the periodic trapezoid rule on the sample nodes; the singular node takes
/// its limit psi'(theta_k)^2. Requires psi.
double boundary_energy(const BoundaryData& f, int theta_index);

struct BoundaryJacobianReport {
    bool holds = true;
    double worst_margin = 0.0;  // sup |J - psi' E| - psi' g_sup / 2
    int worst_index = 0;
};

/// Checks |J_w(e^{i theta_k}) - psi'(theta_k) E(theta_k)| <= psi'(theta_k) g_sup / 2
/// for boundary Jacobian values supplied per sample index.
BoundaryJacobianReport boundary_jacobian_check(const BoundaryData& f, std::span<const double> boundary_jacobian,
                                               double g_sup);

inline constexpr double kHeinzTolerance = 1e-6;

struct HeinzReport {
    double min_value = 0.0;  // min |P_z|^2 + |P_zbar|^2 over the grid
    cd witness;
    bool holds = true;       // min_value >= 1/pi^2 - kHeinzTolerance
};

/// Requires psi of degree 1, strictly increasing.
HeinzReport heinz_check(const BoundaryData& f, const SampleGrid& grid);

}  // namespace quasidisk
