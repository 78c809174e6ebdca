#pragma once

// The explicit Lipschitz / coLipschitz constant chain in terms of (K, K', |g|_inf),
// and polyline utilities for closed curves (chord-arc constant, Hoelder seminorm,
// well-distributed points).

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "quasidisk/poisson.hpp"

namespace quasidisk {

/// mu = 1 / (K (1 + pi)^2).
double mu(double K);
/// P_S = 4 (1 + pi) 2^mu sqrt(max(2 pi^2 K / log 2, 2 pi K' / (K (1 + pi)^2 + 4))).
double p_s(double K, double Kp);

/// (1/2 pi) int_0^{2 pi} |e^{i theta} - e^{i phi}|^p d phi for p > -1.
double circle_power_integral(double p);
double log_circle_power_integral(double p);
/// Same integral evaluated with the singular point at phi = theta, splitting
/// [0, 2 pi] there instead of using rotation invariance.
double circle_power_integral_at(double p, double theta);

/// M_2 = K P_S^{1 + mu} I(mu^2 - 1) with I the circle power integral.
double m2(double K, double Kp);
double log_m2(double K, double Kp);
/// (base - (1 - mu) M_2) / (1 - (1 - mu) M_2), base = M_2 + (K/2 + 7/6)|g| + sqrt(K').
/// The bound it represents only applies when (1 - mu) M_2 < 1.
double c1_value(double K, double Kp, double g_sup);

struct CoLipschitzBounds {
    double n2 = 0.0;
    double log10_n2 = 0.0;
    double log10_n2_upper = 0.0;  // log10 of P_S^{-2/mu} 2^{2/mu - 2}
    double n1 = 0.0;              // n2 - |g|/2 - sqrt(K')
    double N = 0.0;               // n1 / K^2 - sqrt(K') / K - 7/6 |g|
    bool positive = false;        // N > 0
};

CoLipschitzBounds colipschitz_N(double K, double Kp, double g_sup);

/// Values too large for a double are kept as log10 with value set to +inf.
struct BoundSet {
    double K = 1.0;
    double Kp = 0.0;
    double g_sup = 0.0;
    double mu = 0.0;
    double p_s = 0.0;
    double m2 = 0.0;
    double c0 = 0.0;
    double log10_c0 = 0.0;
    std::optional<double> c1;  // present iff (1 - mu) m2 < 1
    double c1_value = 0.0;     // the raw formula, for reference
    double lip_M = 0.0;
    double log10_lip_M = 0.0;
    CoLipschitzBounds colip;
};

BoundSet lipschitz_M(double K, double Kp, double g_sup);

/// Closed polyline through the given points (the last point connects back to
/// the first). Rejects fewer than 3 points, coincident neighbours and
/// self-intersections.
class CurveSamples {
public:
    explicit CurveSamples(std::vector<cd> points);

    std::span<const cd> points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    /// arc[k] = length from points[0] to points[k]; arc[size()] = total length.
    std::span<const double> arc() const { return arc_; }
    double length() const { return arc_.back(); }
    /// Point at arc position s (taken modulo the length).
    cd at(double s) const;
    /// Arc position of the polyline point nearest to p and its distance.
    std::pair<double, double> project(cd p) const;

private:
    std::vector<cd> points_;
    std::vector<double> arc_;
};

/// max over sample pairs of d_gamma(z1, z2) / |z1 - z2|, with d_gamma the
/// shorter arc between the points.
double chord_arc_constant(const CurveSamples& c);

/// Points at arc fractions 0, 1/3, 2/3 starting from the first sample.
std::array<cd, 3> well_distributed_points(const CurveSamples& c);

struct NormalizationReport {
    bool is_normalized = false;
    double gap = 0.0;       // min over start angles of max |arc gap - length/3|
    double t0 = 0.0;        // start angle achieving it
    double length = 0.0;
};

/// Searches the boundary sample angles for a well-distributed triple on the
/// circle whose image is well-distributed on image_curve. Requires every
/// boundary sample within 1e-6 of the curve and degree one along it.
NormalizationReport normalized_check(const BoundaryData& f, const CurveSamples& image_curve);

/// Discrete Hoelder seminorm of the n-th arc-length derivative (n = 1 or 2).
double holder_seminorm(const CurveSamples& c, int n, double alpha);

}  // namespace quasidisk
