#include "quasidisk/qrclass.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <ostream>

#include "quasidisk/parallel.hpp"

namespace quasidisk {
namespace {

void require_nonempty(const QRProfile& p) {
    if (p.empty()) throw InputError("empty quasiregularity profile");
}

void validate_margins(std::span<const double> margins) {
    if (margins.empty()) throw InputError("no margins given");
    for (std::size_t i = 0; i < margins.size(); ++i) {
        if (!(margins[i] > 0.0 && margins[i] < 0.5)) throw InputError("margins must lie in (0, 0.5)");
        if (i > 0 && !(margins[i] < margins[i - 1])) throw InputError("margins must be strictly decreasing");
    }
}

// Jets on the circle |z| = r at n equally spaced angles.
std::vector<WirtingerJet> circle_jets(const JetEvaluator& jet, double r, int n) {
    std::vector<WirtingerJet> out(static_cast<std::size_t>(n));
    parallel_for(out.size(), [&](std::size_t k) { out[k] = jet(std::polar(r, 2.0 * std::numbers::pi * k / n)); });
    return out;
}

}  // namespace

QRProfile::QRProfile(std::vector<QRPoint> points, SampleGrid grid) : points_(std::move(points)), grid_(grid) {}

QRProfile QRProfile::sample(const MappingExpr& e, const SampleGrid& grid) {
    const auto samples = sample_grid(e, grid);
    std::vector<QRPoint> pts;
    pts.reserve(samples.size());
    for (const auto& s : samples)
        pts.push_back({s.z, s.stats.grad_norm * s.stats.grad_norm, s.stats.jac, s.stats.l_grad});
    return QRProfile(std::move(pts), grid);
}

double qr_deficiency(const QRProfile& p, double K) {
    require_nonempty(p);
    if (!(K >= 1.0)) throw InputError("K must be >= 1");
    double worst = 0.0;
    for (const auto& q : p.points()) worst = std::max(worst, q.grad_sq - K * q.jac);
    return worst;
}

ParetoFrontier pareto_frontier(const QRProfile& p, std::span<const double> k_values) {
    require_nonempty(p);
    if (k_values.empty()) throw InputError("no K values given");
    for (std::size_t i = 0; i < k_values.size(); ++i) {
        if (!(k_values[i] >= 1.0)) throw InputError("K values must be >= 1");
        if (i > 0 && k_values[i] < k_values[i - 1]) throw InputError("K values must be sorted ascending");
    }
    ParetoFrontier f;
    for (double K : k_values) {
        const double kp = qr_deficiency(p, K);
        if (!f.points.empty() && kp > f.points.back().kprime_min) f.monotone = false;
        f.points.push_back({K, kp});
    }
    return f;
}

void write_frontier_csv(std::ostream& out, const ParetoFrontier& f) {
    out << "K,kprime_min\n" << std::setprecision(17);
    for (const auto& pt : f.points) out << pt.K << ',' << pt.kprime_min << '\n';
}

std::vector<BlowupSample> k_qr_blowup(const MappingExpr& e, std::span<const double> margins, int n_theta) {
    validate_margins(margins);
    if (n_theta < 1) throw InputError("n_theta must be positive");
    const JetEvaluator jet(e);
    std::vector<BlowupSample> out;
    for (double m : margins) {
        BlowupSample s{m, 0.0, 0};
        bool any = false;
        for (const auto& j : circle_jets(jet, 1.0 - m, n_theta)) {
            const GradStats g = grad_stats(j);
            if (g.jac <= 0.0) {
                ++s.excluded;
                continue;
            }
            s.ratio = std::max(s.ratio, g.grad_norm * g.grad_norm / g.jac);
            any = true;
        }
        if (!any) s.ratio = std::numeric_limits<double>::quiet_NaN();
        out.push_back(s);
    }
    return out;
}

std::vector<double> properness_check(const MappingExpr& e, std::span<const double> margins, int n_theta) {
    validate_margins(margins);
    if (n_theta < 1) throw InputError("n_theta must be positive");
    std::vector<double> out;
    for (double m : margins) {
        std::vector<double> mods(static_cast<std::size_t>(n_theta));
        parallel_for(mods.size(), [&](std::size_t k) {
            mods[k] = std::abs(e.eval(std::polar(1.0 - m, 2.0 * std::numbers::pi * k / n_theta)));
        });
        out.push_back(*std::min_element(mods.begin(), mods.end()));
    }
    return out;
}

Lemma11Report lemma11_check(const QRProfile& p, double K, double Kp) {
    require_nonempty(p);
    if (!(K >= 1.0) || !(Kp >= 0.0)) throw InputError("need K >= 1 and K' >= 0");
    const double sk = std::sqrt(Kp);
    Lemma11Report rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (const auto& q : p.points()) {
        const double m = std::sqrt(q.grad_sq) - K * q.l_grad - sk;
        if (m > rep.worst_margin) {
            rep.worst_margin = m;
            rep.witness = q.z;
        }
    }
    rep.holds = rep.worst_margin <= kLemma11Tolerance;
    return rep;
}

SensePreservingReport sense_preserving_check(const QRProfile& p) {
    require_nonempty(p);
    SensePreservingReport rep;
    rep.min_jac = std::numeric_limits<double>::infinity();
    for (const auto& q : p.points()) {
        if (q.jac < rep.min_jac) {
            rep.min_jac = q.jac;
            rep.witness = q.z;
        }
    }
    rep.all_positive = rep.min_jac > 0.0;
    return rep;
}

}  // namespace quasidisk
