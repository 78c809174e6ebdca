#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "quasidisk/calculus.hpp"

namespace quasidisk {

struct QRPoint {
    cd z;
    double grad_sq = 0.0;  // |grad w|^2
    double jac = 0.0;
    double l_grad = 0.0;
};

/// Per-point quasiregularity data over a sample grid.
class QRProfile {
public:
    QRProfile(std::vector<QRPoint> points, SampleGrid grid);
    static QRProfile sample(const MappingExpr& e, const SampleGrid& grid);

    std::span<const QRPoint> points() const { return points_; }
    const SampleGrid& grid() const { return grid_; }
    bool empty() const { return points_.empty(); }

private:
    std::vector<QRPoint> points_;
    SampleGrid grid_;
};

/// Least K' >= 0 with |grad w|^2 <= K J_w + K' at every profile point.
double qr_deficiency(const QRProfile& p, double K);

struct FrontierPoint {
    double K = 1.0;
    double kprime_min = 0.0;
};

struct ParetoFrontier {
    std::vector<FrontierPoint> points;
    // True when kprime_min is nonincreasing in K. Always the case for
    // sense-preserving profiles; a point with J_w < 0 can break it.
    bool monotone = true;
};

ParetoFrontier pareto_frontier(const QRProfile& p, std::span<const double> k_values);
void write_frontier_csv(std::ostream& out, const ParetoFrontier& f);

struct BlowupSample {
    double margin = 0.0;
    double ratio = 0.0;        // sup of grad_sq / jac over sense-preserving points on |z| = 1 - margin
    std::size_t excluded = 0;  // points with jac <= 0
};

/// Dilatation on shrinking circles. A diverging sequence witnesses that no
/// finite K works with K' = 0.
std::vector<BlowupSample> k_qr_blowup(const MappingExpr& e, std::span<const double> margins, int n_theta = 256);

/// min |w| on each circle |z| = 1 - margin.
std::vector<double> properness_check(const MappingExpr& e, std::span<const double> margins, int n_theta = 256);

struct Lemma11Report {
    bool holds = true;
    double worst_margin = 0.0;  // sup (grad_norm - K l_grad - sqrt(K'))
    cd witness;
};

inline constexpr double kLemma11Tolerance = 1e-9;

Lemma11Report lemma11_check(const QRProfile& p, double K, double Kp);

struct SensePreservingReport {
    bool all_positive = true;
    double min_jac = 0.0;
    cd witness;
};

SensePreservingReport sense_preserving_check(const QRProfile& p);

}  // namespace quasidisk
