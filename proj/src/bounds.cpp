#include "quasidisk/bounds.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

namespace quasidisk {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kLn10 = std::numbers::ln10;
constexpr double kQuadTolerance = 1e-14;

template <class F>
double integrate(F f, double a, double b) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, kQuadTolerance, &err);
}

void check_K(double K) {
    if (!(K >= 1.0) || !std::isfinite(K)) throw InputError("K must be a finite number >= 1");
}

void check_Kp(double Kp) {
    if (!(Kp >= 0.0) || !std::isfinite(Kp)) throw InputError("K' must be a finite number >= 0");
}

void check_g(double g) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw InputError("|g|_inf must be a finite number >= 0");
}

void check_p(double p) {
    if (!(p > -1.0) || !std::isfinite(p)) throw InputError("circle power integral needs p > -1");
}

// (2 sin(s/2) / s)^p, continuous at s = 0.
double sinc_power(double s, double p) {
    const double ratio = s < 1e-4 ? 1.0 - s * s / 24.0 : 2.0 * std::sin(0.5 * s) / s;
    return std::pow(ratio, p);
}

// int_0^L (2 sin(s/2))^p ds, singular at s = 0 when p < 0 (L <= pi).
double integrate_from_singularity(double p, double L) {
    if (L <= 0.0) return 0.0;
    if (p >= 0.0) return integrate([p](double s) { return std::pow(2.0 * std::sin(0.5 * s), p); }, 0.0, L);
    // s = L u^{1/(p+1)} turns s^p ds into L^{p+1}/(p+1) du.
    const double q = 1.0 / (p + 1.0);
    const double inner = integrate([&](double u) { return sinc_power(L * std::pow(u, q), p); }, 0.0, 1.0);
    return std::pow(L, p + 1.0) / (p + 1.0) * inner;
}

// log(exp(a) + exp(b)).
double log_add(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

// log of a sum of nonnegative terms given as logs.
double log_sum(std::initializer_list<double> logs) {
    double acc = -std::numeric_limits<double>::infinity();
    for (double l : logs) acc = log_add(acc, l);
    return acc;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : -std::numeric_limits<double>::infinity(); }

double exp_or_inf(double l) { return l > 709.0 ? std::numeric_limits<double>::infinity() : std::exp(l); }

}  // namespace

double mu(double K) {
    check_K(K);
    return 1.0 / (K * (1.0 + kPi) * (1.0 + kPi));
}

double p_s(double K, double Kp) {
    check_K(K);
    check_Kp(Kp);
    const double m = mu(K);
    const double a = 2.0 * kPi * kPi * K / std::numbers::ln2;
    const double b = 2.0 * kPi * Kp / (K * (1.0 + kPi) * (1.0 + kPi) + 4.0);
    return 4.0 * (1.0 + kPi) * std::exp2(m) * std::sqrt(std::max(a, b));
}

double log_circle_power_integral(double p) {
    check_p(p);
    if (p == 0.0) return 0.0;
    // I(p) = 2^{p+1}/pi * int_0^{pi/2} sin^p x dx
    double j = 0.0;
    if (p > 0.0) {
        j = integrate([p](double x) { return std::pow(std::sin(x), p); }, 0.0, 0.5 * kPi);
    } else {
        // x = (pi/2) u^{1/(p+1)}: int_0^{pi/2} x^p (sin x / x)^p dx
        const double q = 1.0 / (p + 1.0);
        const double inner = integrate(
            [&](double u) {
                const double x = 0.5 * kPi * std::pow(u, q);
                return x < 1e-4 ? std::pow(1.0 - x * x / 6.0, p) : std::pow(std::sin(x) / x, p);
            },
            0.0, 1.0);
        j = std::pow(0.5 * kPi, p + 1.0) / (p + 1.0) * inner;
    }
    return (p + 1.0) * std::numbers::ln2 - std::log(kPi) + std::log(j);
}

double circle_power_integral(double p) { return std::exp(log_circle_power_integral(p)); }

double circle_power_integral_at(double p, double theta) {
    check_p(p);
    theta = std::fmod(theta, kTwoPi);
    if (theta < 0.0) theta += kTwoPi;
    // Split [0, 2 pi] at the singular point phi = theta and at the midpoints of
    // the two resulting arcs; the pieces touching theta (or 0 and 2 pi, when
    // theta = 0) go through the endpoint substitution.
    const double left = theta;             // [0, theta]
    const double right = kTwoPi - theta;  // [theta, 2 pi]
    auto plain = [&](double a, double b) {
        if (b <= a) return 0.0;
        return integrate([&](double phi) { return std::pow(2.0 * std::abs(std::sin(0.5 * (phi - theta))), p); }, a, b);
    };
    double total = 0.0;
    total += integrate_from_singularity(p, 0.5 * left);   // [theta/2, theta]
    total += integrate_from_singularity(p, 0.5 * right);  // [theta, theta + right/2]
    if (theta == 0.0) {
        total += integrate_from_singularity(p, 0.5 * right);  // [pi, 2 pi] ends at the singular point 2 pi
    } else {
        total += plain(0.0, 0.5 * left);
        total += plain(theta + 0.5 * right, kTwoPi);
    }
    return total / kTwoPi;
}

double log_m2(double K, double Kp) {
    const double m = mu(K);
    return std::log(K) + (1.0 + m) * std::log(p_s(K, Kp)) + log_circle_power_integral(m * m - 1.0);
}

double m2(double K, double Kp) { return exp_or_inf(log_m2(K, Kp)); }

namespace {

// log of M_2 + (K/2 + 7/6)|g| + sqrt(K').
double log_c_base(double K, double Kp, double g_sup) {
    return log_sum({log_m2(K, Kp), safe_log((0.5 * K + 7.0 / 6.0) * g_sup), safe_log(std::sqrt(Kp))});
}

}  // namespace

double c1_value(double K, double Kp, double g_sup) {
    check_g(g_sup);
    const double m = mu(K);
    const double M2 = m2(K, Kp);
    const double base = M2 + (0.5 * K + 7.0 / 6.0) * g_sup + std::sqrt(Kp);
    const double a = (1.0 - m) * M2;
    return (base - a) / (1.0 - a);
}

CoLipschitzBounds colipschitz_N(double K, double Kp, double g_sup) {
    check_g(g_sup);
    const double m = mu(K);
    const double e = 2.0 / m;
    const double lps = std::log(p_s(K, Kp));
    CoLipschitzBounds b;
    const double ln2 = -e * lps + log_circle_power_integral(e - 2.0);
    b.n2 = std::exp(ln2);
    b.log10_n2 = ln2 / kLn10;
    b.log10_n2_upper = (-e * lps + (e - 2.0) * std::numbers::ln2) / kLn10;
    b.n1 = b.n2 - 0.5 * g_sup - std::sqrt(Kp);
    b.N = b.n1 / (K * K) - std::sqrt(Kp) / K - 7.0 / 6.0 * g_sup;
    // With g = K' = 0, N = n2 / K^2 > 0 even when n2 underflows.
    b.positive = b.N > 0.0 || (g_sup == 0.0 && Kp == 0.0);
    return b;
}

BoundSet lipschitz_M(double K, double Kp, double g_sup) {
    check_K(K);
    check_Kp(Kp);
    check_g(g_sup);
    BoundSet s;
    s.K = K;
    s.Kp = Kp;
    s.g_sup = g_sup;
    s.mu = mu(K);
    s.p_s = p_s(K, Kp);
    s.m2 = m2(K, Kp);
    const double exponent = K * (1.0 + kPi) * (1.0 + kPi);
    const double log_c0 = exponent * log_c_base(K, Kp, g_sup);
    s.c0 = exp_or_inf(log_c0);
    s.log10_c0 = log_c0 / kLn10;
    s.c1_value = c1_value(K, Kp, g_sup);
    s.lip_M = s.c0;
    s.log10_lip_M = s.log10_c0;
    if ((1.0 - s.mu) * s.m2 < 1.0) {
        s.c1 = s.c1_value;
        if (*s.c1 < s.c0) {
            s.lip_M = *s.c1;
            s.log10_lip_M = std::log10(*s.c1);
        }
    }
    s.colip = colipschitz_N(K, Kp, g_sup);
    return s;
}

// ---------------------------------------------------------------------------
// Curves

namespace {

double cross(cd a, cd b) { return a.real() * b.imag() - a.imag() * b.real(); }
double dot(cd a, cd b) { return a.real() * b.real() + a.imag() * b.imag(); }

int orientation(cd a, cd b, cd c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

bool on_segment(cd a, cd b, cd p) {
    return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
           std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

bool segments_intersect(cd p1, cd p2, cd q1, cd q2) {
    const int o1 = orientation(p1, p2, q1);
    const int o2 = orientation(p1, p2, q2);
    const int o3 = orientation(q1, q2, p1);
    const int o4 = orientation(q1, q2, p2);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(p1, p2, q1)) return true;
    if (o2 == 0 && on_segment(p1, p2, q2)) return true;
    if (o3 == 0 && on_segment(q1, q2, p1)) return true;
    if (o4 == 0 && on_segment(q1, q2, p2)) return true;
    return false;
}

}  // namespace

CurveSamples::CurveSamples(std::vector<cd> points) : points_(std::move(points)) {
    const std::size_t n = points_.size();
    if (n < 3) throw InputError("a closed curve needs at least 3 samples");
    double scale = 0.0;
    for (const cd& p : points_) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) throw InputError("nonfinite curve sample");
        scale = std::max(scale, std::abs(p));
    }
    arc_.assign(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double step = std::abs(points_[(k + 1) % n] - points_[k]);
        if (!(step > 1e-15 * std::max(scale, 1.0)))
            throw InputError("coincident adjacent curve samples at index " + std::to_string(k));
        arc_[k + 1] = arc_[k] + step;
    }
    // Simplicity: adjacent segments may not fold back, others may not meet.
    for (std::size_t i = 0; i < n; ++i) {
        const cd a = points_[i];
        const cd b = points_[(i + 1) % n];
        const cd c = points_[(i + 2) % n];
        if (cross(b - a, c - b) == 0.0 && dot(b - a, c - b) < 0.0)
            throw InputError("curve folds back on itself at sample " + std::to_string((i + 1) % n));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const cd p1 = points_[i];
        const cd p2 = points_[(i + 1) % n];
        const double xmin = std::min(p1.real(), p2.real()), xmax = std::max(p1.real(), p2.real());
        const double ymin = std::min(p1.imag(), p2.imag()), ymax = std::max(p1.imag(), p2.imag());
        for (std::size_t j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue;  // shares points[0]
            const cd q1 = points_[j];
            const cd q2 = points_[(j + 1) % n];
            if (std::max(q1.real(), q2.real()) < xmin || std::min(q1.real(), q2.real()) > xmax ||
                std::max(q1.imag(), q2.imag()) < ymin || std::min(q1.imag(), q2.imag()) > ymax)
                continue;
            if (segments_intersect(p1, p2, q1, q2))
                throw InputError("curve is not simple: segments " + std::to_string(i) + " and " + std::to_string(j) +
                                 " intersect");
        }
    }
}

cd CurveSamples::at(double s) const {
    const double L = length();
    s = std::fmod(s, L);
    if (s < 0.0) s += L;
    const auto it = std::upper_bound(arc_.begin(), arc_.end(), s);
    const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(it - arc_.begin()) - 1, size() - 1);
    const cd a = points_[k];
    const cd b = points_[(k + 1) % size()];
    const double t = (s - arc_[k]) / (arc_[k + 1] - arc_[k]);
    return a + t * (b - a);
}

std::pair<double, double> CurveSamples::project(cd p) const {
    double best_d = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    const std::size_t n = size();
    for (std::size_t k = 0; k < n; ++k) {
        const cd a = points_[k];
        const cd d = points_[(k + 1) % n] - a;
        const double t = std::clamp(dot(p - a, d) / std::norm(d), 0.0, 1.0);
        const double dist = std::abs(p - (a + t * d));
        if (dist < best_d) {
            best_d = dist;
            best_s = arc_[k] + t * (arc_[k + 1] - arc_[k]);
        }
    }
    return {best_s, best_d};
}

double chord_arc_constant(const CurveSamples& c) {
    if (c.size() < 16) throw InputError("chord-arc estimate needs at least 16 samples");
    const double L = c.length();
    if (!(L > 0.0)) throw InputError("degenerate curve of zero length");
    const auto pts = c.points();
    const auto arc = c.arc();
    double best = 1.0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            const double ds = arc[j] - arc[i];
            const double d = std::min(ds, L - ds);
            best = std::max(best, d / std::abs(pts[i] - pts[j]));
        }
    }
    return best;
}

std::array<cd, 3> well_distributed_points(const CurveSamples& c) {
    const double L = c.length();
    if (!(L > 0.0)) throw InputError("degenerate curve of zero length");
    return {c.at(0.0), c.at(L / 3.0), c.at(2.0 * L / 3.0)};
}

NormalizationReport normalized_check(const BoundaryData& f, const CurveSamples& image_curve) {
    const double L = image_curve.length();
    const int n = f.size();
    const auto samples = f.samples();
    std::vector<double> pos(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const auto [s, d] = image_curve.project(samples[k]);
        if (d > 1e-6) throw InputError("boundary sample " + std::to_string(k) + " lies off the image curve");
        pos[k] = s;
    }
    auto wrap = [L](double x) {  // into (-L/2, L/2]
        x = std::fmod(x, L);
        if (x > 0.5 * L) x -= L;
        if (x <= -0.5 * L) x += L;
        return x;
    };
    double travel = 0.0;
    for (int k = 0; k < n; ++k) travel += wrap(pos[(k + 1) % n] - pos[k]);
    const long degree = std::lround(travel / L);
    if (std::abs(degree) != 1)
        throw DomainError("boundary map winds " + std::to_string(degree) +
                          " times around the image curve; a homeomorphism winds once");
    const double sign = static_cast<double>(degree);
    auto forward = [&](double a, double b) {  // arc from a to b along the orientation, in [0, L)
        double x = std::fmod(sign * (b - a), L);
        if (x < 0.0) x += L;
        return x;
    };

    NormalizationReport rep;
    rep.length = L;
    rep.gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n; ++k) {
        const double t0 = f.theta(k);
        const double s0 = pos[k];
        const double s1 = image_curve.project(f.value_at(t0 + kTwoPi / 3.0)).first;
        const double s2 = image_curve.project(f.value_at(t0 + 2.0 * kTwoPi / 3.0)).first;
        const double g0 = forward(s0, s1);
        const double g1 = forward(s1, s2);
        const double g2 = forward(s2, s0);
        const double dev = std::max({std::abs(g0 - L / 3.0), std::abs(g1 - L / 3.0), std::abs(g2 - L / 3.0)});
        if (dev < rep.gap) {
            rep.gap = dev;
            rep.t0 = t0;
        }
    }
    rep.is_normalized = rep.gap <= 1e-3 * L;
    return rep;
}

double holder_seminorm(const CurveSamples& c, int order, double alpha) {
    if (order != 1 && order != 2) throw InputError("Hoelder seminorm supports derivative orders 1 and 2");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InputError("Hoelder exponent must lie in (0, 1]");
    const auto pts = c.points();
    const auto arc = c.arc();
    const std::size_t n = pts.size();
    const double L = c.length();
    for (std::size_t k = 0; k < n; ++k)
        if (arc[k + 1] - arc[k] > 1e-2 * L)
            throw InputError("curve samples too sparse for derivative estimates (arc step above 1% of length)");
    std::vector<cd> d(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double h1 = arc[k == 0 ? n : k] - arc[k == 0 ? n - 1 : k - 1];
        const double h2 = arc[k + 1] - arc[k];
        const cd gm = pts[(k + n - 1) % n];
        const cd g0 = pts[k];
        const cd gp = pts[(k + 1) % n];
        const double den = h1 * h2 * (h1 + h2);
        if (order == 1)
            d[k] = (h1 * h1 * gp - h2 * h2 * gm + (h2 * h2 - h1 * h1) * g0) / den;
        else
            d[k] = 2.0 * (h1 * gp - (h1 + h2) * g0 + h2 * gm) / den;
    }
    double best = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            best = std::max(best, std::abs(d[i] - d[j]) / std::pow(arc[j] - arc[i], alpha));
    return best;
}

}  // namespace quasidisk
