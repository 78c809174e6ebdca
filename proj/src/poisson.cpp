#include "quasidisk/poisson.hpp"

#include <algorithm>
#include <boost/math/special_functions/legendre.hpp>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fft.hpp"
#include "quasidisk/parallel.hpp"
#include "quasidisk/summation.hpp"

namespace quasidisk {

using detail::FftPlan;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double principal_step(cd from, cd to) { return std::arg(to / from); }

std::string point_text(cd z) {
    std::ostringstream os;
    os << std::setprecision(6) << '(' << z.real() << ", " << z.imag() << ')';
    return os.str();
}

// Smooth partition of unity on [0, 1]: 1 near 0, 0 from 1 on.
double cutoff(double s) {
    if (s <= 0.0) return 1.0;
    if (s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / (1.0 - s));
    const double b = std::exp(-1.0 / s);
    return a / (a + b);
}

}  // namespace

// ---------------------------------------------------------------------------
// BoundaryData

BoundaryData::BoundaryData(std::vector<cd> samples) : samples_(std::move(samples)) {
    if (samples_.size() < 16 || !is_power_of_two(samples_.size()))
        throw InputError("boundary data needs a power-of-two sample count >= 16, got " +
                         std::to_string(samples_.size()));
    for (const cd& v : samples_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("nonfinite boundary sample");
    coeffs_ = detail::dft(samples_, FftPlan::Direction::kForward);
    const double inv = 1.0 / static_cast<double>(samples_.size());
    for (cd& c : coeffs_) c *= inv;
}

BoundaryData BoundaryData::from_samples(std::vector<cd> samples) {
    BoundaryData b(std::move(samples));
    const bool unimodular =
        std::all_of(b.samples_.begin(), b.samples_.end(), [](cd v) { return std::abs(std::abs(v) - 1.0) <= 1e-12; });
    if (unimodular) b.lift_psi();
    return b;
}

BoundaryData BoundaryData::from_function(const std::function<cd(double)>& f, int n) {
    if (n < 1) throw InputError("sample count must be positive");
    std::vector<cd> s(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) s[k] = f(kTwoPi * k / n);
    return from_samples(std::move(s));
}

BoundaryData BoundaryData::from_expr(const MappingExpr& e, int n) {
    return from_function([&](double t) { return e.eval(std::polar(1.0, t)); }, n);
}

BoundaryData BoundaryData::from_psi(std::vector<double> psi) {
    std::vector<cd> s(psi.size());
    for (std::size_t k = 0; k < psi.size(); ++k) {
        if (!std::isfinite(psi[k])) throw InputError("nonfinite psi sample");
        s[k] = std::polar(1.0, psi[k]);
    }
    BoundaryData b(std::move(s));
    const int n = b.size();
    const double closing = psi[n - 1] + principal_step(b.samples_[n - 1], b.samples_[0]) - psi[0];
    b.degree_ = static_cast<int>(std::lround(closing / kTwoPi));
    b.psi_ = std::move(psi);
    b.lift_psi();
    return b;
}

BoundaryData BoundaryData::from_psi_function(const std::function<double(double)>& psi, int n) {
    if (n < 1) throw InputError("sample count must be positive");
    std::vector<double> p(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) p[k] = psi(kTwoPi * k / n);
    return from_psi(std::move(p));
}

void BoundaryData::lift_psi() {
    const int n = size();
    if (psi_.empty()) {
        psi_.resize(static_cast<std::size_t>(n));
        psi_[0] = std::arg(samples_[0]);
        for (int k = 1; k < n; ++k) psi_[k] = psi_[k - 1] + principal_step(samples_[k - 1], samples_[k]);
        const double closing = psi_[n - 1] + principal_step(samples_[n - 1], samples_[0]) - psi_[0];
        degree_ = static_cast<int>(std::lround(closing / kTwoPi));
    }
    // Spectral derivative of the periodic part psi - degree * theta.
    std::vector<cd> u(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) u[k] = psi_[k] - degree_ * theta(k);
    auto U = detail::dft(u, FftPlan::Direction::kForward);
    for (int k = 0; k < n; ++k) {
        const int m = k <= n / 2 ? k : k - n;
        U[k] = (2 * std::abs(m) == n) ? cd(0.0) : U[k] * cd(0.0, static_cast<double>(m)) / static_cast<double>(n);
    }
    const auto du = detail::dft(U, FftPlan::Direction::kBackward);
    dpsi_.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) dpsi_[k] = du[k].real() + degree_;
}

double BoundaryData::theta(int k) const { return kTwoPi * k / size(); }

bool BoundaryData::psi_increasing() const {
    if (psi_.empty()) return false;
    for (std::size_t k = 1; k < psi_.size(); ++k)
        if (!(psi_[k] > psi_[k - 1])) return false;
    return psi_.front() + kTwoPi * degree_ > psi_.back();
}

const std::vector<double>& BoundaryData::dpsi() const {
    if (dpsi_.empty()) throw InputError("boundary data has no angular lift psi");
    return dpsi_;
}

cd BoundaryData::coefficient(int m) const {
    const int n = size();
    if (2 * std::abs(m) > n) return 0.0;
    const cd c = coeffs_[static_cast<std::size_t>((m % n + n) % n)];
    return 2 * std::abs(m) == n ? 0.5 * c : c;
}

cd BoundaryData::value_at(double t) const {
    const int n = size();
    cd acc = coeffs_[0];
    for (int m = 1; m < n / 2; ++m) acc += coefficient(m) * std::polar(1.0, m * t) + coefficient(-m) * std::polar(1.0, -m * t);
    acc += coeffs_[static_cast<std::size_t>(n / 2)] * std::cos(0.5 * n * t);
    return acc;
}

BoundaryData BoundaryData::read_csv(std::istream& in) {
    std::vector<double> thetas;
    std::vector<cd> values;
    std::string line;
    int lineno = 0;
    auto parse_field = [&](std::string_view s, double& out) {
        while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        return ec == std::errc{} && p == s.data() + s.size();
    };
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line == "\r") continue;
        std::vector<std::string_view> fields;
        std::string_view rest(line);
        for (;;) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) break;
            rest.remove_prefix(comma + 1);
        }
        double t = 0, re = 0, im = 0;
        const bool ok = fields.size() == 3 && parse_field(fields[0], t) && parse_field(fields[1], re) &&
                        parse_field(fields[2], im);
        if (!ok) {
            if (thetas.empty() && lineno == 1) continue;  // header
            throw InputError("boundary CSV line " + std::to_string(lineno) + ": expected theta,re,im");
        }
        thetas.push_back(t);
        values.emplace_back(re, im);
    }
    const std::size_t n = values.size();
    for (std::size_t k = 0; k < n; ++k)
        if (std::abs(thetas[k] - kTwoPi * static_cast<double>(k) / static_cast<double>(n)) > 1e-9)
            throw InputError("boundary CSV thetas must be the uniform nodes 2 pi k / n");
    return from_samples(std::move(values));
}

void BoundaryData::write_csv(std::ostream& out) const {
    out << "theta,re,im\n" << std::setprecision(17);
    for (int k = 0; k < size(); ++k) out << theta(k) << ',' << samples_[k].real() << ',' << samples_[k].imag() << '\n';
}

cd poisson_extend(const BoundaryData& f, cd z) {
    if (!(std::abs(z) <= 1.0)) throw DomainError("poisson_extend needs |z| <= 1, got z = " + point_text(z));
    const int n = f.size();
    const int h = n / 2;
    // sum_{m >= 0} F_m z^m + sum_{m > 0} F_{-m} conj(z)^m by Horner.
    cd pos = 0.0;
    cd neg = 0.0;
    const cd zb = std::conj(z);
    for (int m = h - 1; m >= 1; --m) {
        pos = pos * z + f.coefficient(m);
        neg = neg * zb + f.coefficient(-m);
    }
    pos = pos * z + f.coefficient(0);
    neg = neg * zb;
    const cd nyq = f.coefficient(h) * (std::pow(z, h) + std::pow(zb, h));
    return pos + neg + nyq;
}

bool poisson_near_boundary(const BoundaryData&, cd z) { return std::abs(z) > 1.0 - 1e-6; }

// ---------------------------------------------------------------------------
// SourceField

SourceField SourceField::from_expr(MappingExpr g) {
    SourceField s;
    s.zero_ = g.is_zero();
    s.expr_ = std::move(g);
    s.estimate_sup();
    return s;
}

SourceField SourceField::from_polar_samples(int n_r, int n_theta, std::vector<cd> values) {
    if (n_r < 1 || n_theta < 1) throw InputError("source grid needs positive n_r and n_theta");
    if (values.size() != static_cast<std::size_t>(n_r) * static_cast<std::size_t>(n_theta))
        throw InputError("source sample count does not match n_r * n_theta");
    for (const cd& v : values)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) throw InputError("nonfinite source sample");
    SourceField s;
    s.n_r_ = n_r;
    s.n_theta_ = n_theta;
    s.values_ = std::move(values);
    s.zero_ = std::all_of(s.values_.begin(), s.values_.end(), [](cd v) { return v == cd(0.0); });
    s.estimate_sup();
    return s;
}

cd SourceField::operator()(cd w) const {
    if (expr_) return expr_->eval(w);
    // Bilinear in (r, theta): clamped in r, periodic in theta.
    const double r = std::abs(w);
    double th = std::arg(w);
    if (th < 0.0) th += kTwoPi;
    const double x = std::clamp(r * n_r_ - 0.5, 0.0, static_cast<double>(n_r_ - 1));
    const int i0 = std::min(static_cast<int>(x), n_r_ - 1);
    const int i1 = std::min(i0 + 1, n_r_ - 1);
    const double fx = x - i0;
    const double y = th * n_theta_ / kTwoPi;
    const int j0 = static_cast<int>(std::floor(y)) % n_theta_;
    const int j1 = (j0 + 1) % n_theta_;
    const double fy = y - std::floor(y);
    auto at = [&](int i, int j) { return values_[static_cast<std::size_t>(i) * n_theta_ + j]; };
    return (1 - fx) * ((1 - fy) * at(i0, j0) + fy * at(i0, j1)) + fx * ((1 - fy) * at(i1, j0) + fy * at(i1, j1));
}

void SourceField::estimate_sup() {
    double m = 0.0;
    if (expr_) {
        constexpr int kRadii = 256;
        constexpr int kAngles = 512;
        for (int j = 0; j < kRadii; ++j)
            for (int k = 0; k < kAngles; ++k)
                m = std::max(m, std::abs(expr_->eval(std::polar(static_cast<double>(j) / (kRadii - 1), kTwoPi * k / kAngles))));
    } else {
        for (const cd& v : values_) m = std::max(m, std::abs(v));
    }
    sup_norm_ = m * (1.0 + 1e-3);
}

// ---------------------------------------------------------------------------
// Kernels

double green_kernel(cd z, cd w) {
    return std::log(std::abs(1.0 - z * std::conj(w)) / std::abs(z - w)) / kTwoPi;
}

cd green_kernel_dz(cd z, cd w) {
    const cd wb = std::conj(w);
    return (-wb / (1.0 - z * wb) - 1.0 / (z - w)) / (4.0 * kPi);
}

void QuadratureParams::validate() const {
    if (n_theta < 4 || n_r < 2) throw InputError("quadrature needs n_theta >= 4 and n_r >= 2");
    if (!(epsilon_split > 0.0 && epsilon_split < 0.5)) throw InputError("epsilon_split must lie in (0, 0.5)");
    if (local_angles < 4 || local_radial < 2) throw InputError("local rule needs >= 4 angles and >= 2 radial nodes");
    if (tolerance && !(*tolerance > 0.0)) throw InputError("quadrature tolerance must be positive");
}

// ---------------------------------------------------------------------------
// GreenOperator

namespace {

struct GreenValue {
    cd pot;
    cd gz;
    cd gzbar;
};

}  // namespace

struct GreenOperator::Impl {
    QuadratureParams q;
    std::vector<double> rho;         // ring radii
    std::vector<int> level;          // ring i has n_theta << level[i] angles
    std::vector<std::size_t> offset; // start of ring i in gw
    std::vector<std::vector<cd>> unit;  // e^{i phi_j} per level
    std::vector<cd> gw;              // g(omega_ij) * area weight, ring-major
    std::vector<double> gl_t;        // local radial nodes t in (0, 1)
    std::vector<double> gl_w;        // matching weights on [0, 1]
    std::vector<double> gl_cut;      // cutoff(t^2), the partition weight when rho_max = epsilon
    std::vector<double> gl_2logt;    // 2 log t
    std::vector<cd> local_dir;       // e^{i alpha_a}
    std::unique_ptr<GreenOperator> refined;  // 2 n_r, for the convergence check

    template <bool Gradient>
    GreenValue global_part(cd z) const;
    template <bool Gradient>
    GreenValue local_part(const SourceField& g, cd z) const;
    template <bool Gradient>
    GreenValue evaluate(const SourceField& g, cd z) const;
};

template <bool Gradient>
GreenValue GreenOperator::Impl::global_part(cd z) const {
    const int nr = q.n_r;
    const double eps = q.epsilon_split;
    std::vector<cd> ring_pot(static_cast<std::size_t>(nr));
    std::vector<cd> ring_gz(Gradient ? static_cast<std::size_t>(nr) : 0);
    std::vector<cd> ring_gzb(Gradient ? static_cast<std::size_t>(nr) : 0);
    for (int i = 0; i < nr; ++i) {
        cd sp = 0.0, sz = 0.0, szb = 0.0;
        const cd* gwi = &gw[offset[i]];
        const std::vector<cd>& u = unit[level[i]];
        const int nt = static_cast<int>(u.size());
        for (int j = 0; j < nt; ++j) {
            const cd w = rho[i] * u[j];
            const cd d = z - w;
            const double dist = std::abs(d);
            const double weight = dist >= eps ? 1.0 : 1.0 - cutoff(dist / eps);
            if (weight == 0.0) continue;
            const cd wb = std::conj(w);
            const cd num = 1.0 - z * wb;
            const double ratio2 = std::norm(num) / (dist * dist);
            sp += weight * std::log(ratio2) * gwi[j];
            if constexpr (Gradient) {
                const cd k = -wb * std::conj(num) / std::norm(num) - std::conj(d) / (dist * dist);
                sz += weight * k * gwi[j];
                szb += weight * std::conj(k) * gwi[j];
            }
        }
        ring_pot[i] = sp;
        if constexpr (Gradient) {
            ring_gz[i] = sz;
            ring_gzb[i] = szb;
        }
    }
    GreenValue v;
    v.pot = pairwise_sum<cd>(ring_pot) / (4.0 * kPi);
    if constexpr (Gradient) {
        v.gz = pairwise_sum<cd>(ring_gz) / (4.0 * kPi);
        v.gzbar = pairwise_sum<cd>(ring_gzb) / (4.0 * kPi);
    }
    return v;
}

template <bool Gradient>
GreenValue GreenOperator::Impl::local_part(const SourceField& g, cd z) const {
    const double eps = q.epsilon_split;
    const double c = 1.0 - std::norm(z);
    const cd zb = std::conj(z);
    const int na = q.local_angles;
    const int nq = static_cast<int>(gl_t.size());
    std::vector<cd> pot(static_cast<std::size_t>(na));
    std::vector<cd> gz(Gradient ? static_cast<std::size_t>(na) : 0);
    std::vector<cd> gzb(Gradient ? static_cast<std::size_t>(na) : 0);
    for (int a = 0; a < na; ++a) {
        const cd e = local_dir[a];
        const double b = (zb * e).real();
        const double rho_b = -b + std::sqrt(b * b + c);
        const bool clipped = rho_b < eps;
        const double rmax = clipped ? rho_b : eps;
        const double log_rmax = std::log(rmax);
        cd sp = 0.0, sz = 0.0, szb = 0.0;
        for (int k = 0; k < nq; ++k) {
            const double t = gl_t[k];
            const double r = rmax * t * t;
            const double jac = gl_w[k] * 2.0 * rmax * t;  // d rho = 2 rmax t dt
            const cd w = z + r * e;
            const double chi = clipped ? cutoff(r / eps) : gl_cut[k];
            const cd gv = g(w) * (chi * jac);
            const cd wb = std::conj(w);
            const cd num = 1.0 - z * wb;
            // rho * G = rho (log|1 - z conj w| - log rho) / (2 pi)
            sp += r * (0.5 * std::log(std::norm(num)) - log_rmax - gl_2logt[k]) * gv;
            if constexpr (Gradient) {
                // rho * G_z = (-conj w rho/(1 - z conj w) + e^{-i alpha}) / (4 pi)
                const cd k1 = -wb * std::conj(num) * (r / std::norm(num)) + std::conj(e);
                sz += k1 * gv;
                szb += std::conj(k1) * gv;
            }
        }
        pot[a] = sp;
        if constexpr (Gradient) {
            gz[a] = sz;
            gzb[a] = szb;
        }
    }
    const double da = kTwoPi / na;
    GreenValue v;
    v.pot = pairwise_sum<cd>(pot) * da / kTwoPi;
    if constexpr (Gradient) {
        v.gz = pairwise_sum<cd>(gz) * da / (4.0 * kPi);
        v.gzbar = pairwise_sum<cd>(gzb) * da / (4.0 * kPi);
    }
    return v;
}

template <bool Gradient>
GreenValue GreenOperator::Impl::evaluate(const SourceField& g, cd z) const {
    const GreenValue a = global_part<Gradient>(z);
    const GreenValue b = local_part<Gradient>(g, z);
    return {a.pot + b.pot, a.gz + b.gz, a.gzbar + b.gzbar};
}

GreenOperator::GreenOperator(SourceField g, QuadratureParams q) : g_(std::move(g)), q_(q), impl_(std::make_unique<Impl>()) {
    q_.validate();
    Impl& m = *impl_;
    m.q = q_;
    const int nr = q_.n_r;
    const int nt = q_.n_theta;
    // Outer rings get 2^level times more angles so the arc spacing stays
    // within the radial spacing 1/n_r; otherwise the partition cutoff is
    // undersampled there and the error oscillates with z at the node pitch.
    m.rho.resize(static_cast<std::size_t>(nr));
    m.level.resize(static_cast<std::size_t>(nr));
    m.offset.resize(static_cast<std::size_t>(nr));
    std::size_t total = 0;
    for (int i = 0; i < nr; ++i) {
        m.rho[i] = (i + 0.5) / nr;
        int lv = 0;
        while (kTwoPi * m.rho[i] / (static_cast<double>(nt) * (1 << lv)) > 1.0 / nr) ++lv;
        m.level[i] = lv;
        m.offset[i] = total;
        total += static_cast<std::size_t>(nt) << lv;
        if (lv >= static_cast<int>(m.unit.size())) m.unit.resize(static_cast<std::size_t>(lv) + 1);
    }
    for (std::size_t lv = 0; lv < m.unit.size(); ++lv) {
        const int n = nt << lv;
        m.unit[lv].resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) m.unit[lv][j] = std::polar(1.0, kTwoPi * j / n);
    }
    m.gw.assign(total, 0.0);
    if (!g_.is_zero()) {
        parallel_for(static_cast<std::size_t>(nr), [&](std::size_t i) {
            const std::vector<cd>& u = m.unit[m.level[i]];
            const double area = m.rho[i] * (1.0 / nr) * (kTwoPi / static_cast<double>(u.size()));
            for (std::size_t j = 0; j < u.size(); ++j) m.gw[m.offset[i] + j] = g_(m.rho[i] * u[j]) * area;
        });
    }
    const auto zeros = boost::math::legendre_p_zeros<double>(static_cast<unsigned>(q_.local_radial));
    // legendre_p_zeros returns the nonnegative roots; mirror them onto [-1, 1].
    std::vector<double> x;
    for (double r : zeros) {
        x.push_back(r);
        if (r > 0.0) x.push_back(-r);
    }
    std::sort(x.begin(), x.end());
    for (double xi : x) {
        const double dp = boost::math::legendre_p_prime(q_.local_radial, xi);
        const double w = 2.0 / ((1.0 - xi * xi) * dp * dp);
        m.gl_t.push_back(0.5 * (xi + 1.0));
        m.gl_w.push_back(0.5 * w);
        m.gl_cut.push_back(cutoff(m.gl_t.back() * m.gl_t.back()));
        m.gl_2logt.push_back(2.0 * std::log(m.gl_t.back()));
    }
    m.local_dir.resize(static_cast<std::size_t>(q_.local_angles));
    for (int a = 0; a < q_.local_angles; ++a) m.local_dir[a] = std::polar(1.0, kTwoPi * (a + 0.5) / q_.local_angles);
    if (q_.tolerance) {
        QuadratureParams fine = q_;
        fine.n_r *= 2;
        fine.tolerance.reset();
        m.refined = std::make_unique<GreenOperator>(g_, fine);
    }
}

GreenOperator::~GreenOperator() = default;
GreenOperator::GreenOperator(GreenOperator&&) noexcept = default;
GreenOperator& GreenOperator::operator=(GreenOperator&&) noexcept = default;

namespace {

void require_inside(cd z) {
    if (!(std::abs(z) < 1.0)) throw DomainError("Green operator needs |z| < 1, got z = " + point_text(z));
}

void check_converged(double diff, double tol, cd z, int n_r) {
    if (diff > tol) {
        std::ostringstream os;
        os << std::setprecision(3) << "Green quadrature did not converge at z = " << point_text(z) << ": doubling n_r from "
           << n_r << " changed the result by " << diff << " > " << tol;
        throw NonconvergenceError(os.str());
    }
}

}  // namespace

cd GreenOperator::potential(cd z) const {
    require_inside(z);
    if (g_.is_zero()) return 0.0;
    const cd v = impl_->evaluate<false>(g_, z).pot;
    if (impl_->refined) check_converged(std::abs(v - impl_->refined->potential(z)), *q_.tolerance, z, q_.n_r);
    return v;
}

GreenGradient GreenOperator::gradient(cd z) const {
    require_inside(z);
    if (g_.is_zero()) return {};
    const GreenValue v = impl_->evaluate<true>(g_, z);
    if (impl_->refined) {
        const GreenGradient r = impl_->refined->gradient(z);
        check_converged(std::max(std::abs(v.gz - r.gz), std::abs(v.gzbar - r.gzbar)), *q_.tolerance, z, q_.n_r);
    }
    return {v.gz, v.gzbar};
}

GreenOperator::GridValues GreenOperator::on_grid(const SampleGrid& grid) const {
    grid.validate();
    const std::size_t npts = grid.size();
    GridValues out;
    out.potential.assign(npts, 0.0);
    out.gradient.assign(npts, GreenGradient{});
    if (g_.is_zero()) return out;

    const Impl& m = *impl_;
    const int nt = q_.n_theta;
    const int nr = q_.n_r;
    if (nt % grid.n_theta != 0) {
        parallel_for(npts, [&](std::size_t idx) {
            const GreenValue v = m.evaluate<true>(g_, grid.point(idx));
            out.potential[idx] = v.pot;
            out.gradient[idx] = {v.gz, v.gzbar};
        });
    } else {
        // Global part as an angular cross-correlation per (eval radius, ring):
        // c_s = sum_j a_{j - s} gw_j, c = IFFT(FFT(gw) * IFFT(a)) / n.
        // Rings sharing an angle count are summed per frequency before the
        // inverse transform.
        const int levels = static_cast<int>(m.unit.size());
        std::vector<FftPlan> fwd, bwd;
        for (int lv = 0; lv < levels; ++lv) {
            fwd.emplace_back(nt << lv, FftPlan::Direction::kForward);
            bwd.emplace_back(nt << lv, FftPlan::Direction::kBackward);
        }
        std::vector<std::vector<int>> rings_at(static_cast<std::size_t>(levels));
        for (int i = 0; i < nr; ++i) rings_at[m.level[i]].push_back(i);
        std::vector<cd> gw_hat(m.gw.size());
        for (int i = 0; i < nr; ++i) {
            const std::size_t n = m.unit[m.level[i]].size();
            fwd[m.level[i]].execute(std::span<const cd>(&m.gw[m.offset[i]], n), std::span<cd>(&gw_hat[m.offset[i]], n));
        }
        const double eps = q_.epsilon_split;
        parallel_for(static_cast<std::size_t>(grid.n_r), [&](std::size_t jr) {
            const double r = grid.radius(static_cast<int>(jr));
            for (int lv = 0; lv < levels; ++lv) {
                const std::vector<int>& rings = rings_at[lv];
                if (rings.empty()) continue;
                const std::vector<cd>& u = m.unit[lv];
                const int n = static_cast<int>(u.size());
                const int stride = n / grid.n_theta;
                std::vector<cd> a_pot(static_cast<std::size_t>(n)), a_gz(static_cast<std::size_t>(n));
                std::vector<cd> h_pot(static_cast<std::size_t>(n)), h_gz(static_cast<std::size_t>(n));
                std::vector<std::vector<cd>> acc_pot(rings.size()), acc_gz(rings.size()), acc_gzb(rings.size());
                for (std::size_t ri = 0; ri < rings.size(); ++ri) {
                    const int i = rings[ri];
                    // r is real, so a(conj w) = conj(a(w)): fill half the row and mirror.
                    for (int l = 0; l <= n / 2; ++l) {
                        const cd w = m.rho[i] * u[l];
                        const cd d = r - w;
                        const double dist = std::abs(d);
                        const double weight = dist >= eps ? 1.0 : 1.0 - cutoff(dist / eps);
                        if (weight == 0.0) {
                            a_pot[l] = a_gz[l] = 0.0;
                            continue;
                        }
                        const cd wb = std::conj(w);
                        const cd num = 1.0 - r * wb;
                        a_pot[l] = weight * std::log(std::norm(num) / (dist * dist));
                        a_gz[l] = weight * (-wb * std::conj(num) / std::norm(num) - std::conj(d) / (dist * dist));
                    }
                    for (int l = n / 2 + 1; l < n; ++l) {
                        a_pot[l] = a_pot[n - l];
                        a_gz[l] = std::conj(a_gz[n - l]);
                    }
                    bwd[lv].execute(a_pot, h_pot);
                    bwd[lv].execute(a_gz, h_gz);
                    const cd* gh = &gw_hat[m.offset[i]];
                    auto& ap = acc_pot[ri];
                    auto& az = acc_gz[ri];
                    auto& azb = acc_gzb[ri];
                    ap.resize(static_cast<std::size_t>(n));
                    az.resize(static_cast<std::size_t>(n));
                    azb.resize(static_cast<std::size_t>(n));
                    for (int p = 0; p < n; ++p) {
                        ap[p] = gh[p] * h_pot[p];
                        az[p] = gh[p] * h_gz[p];
                        // IFFT(conj a)_p = conj(IFFT(a)_{-p})
                        azb[p] = gh[p] * std::conj(h_gz[(n - p) % n]);
                    }
                }
                std::vector<cd> col(rings.size());
                auto reduce = [&](const std::vector<std::vector<cd>>& acc) {
                    std::vector<cd> spectrum(static_cast<std::size_t>(n));
                    for (int p = 0; p < n; ++p) {
                        for (std::size_t ri = 0; ri < rings.size(); ++ri) col[ri] = acc[ri][p];
                        spectrum[p] = pairwise_sum<cd>(col);
                    }
                    std::vector<cd> c(static_cast<std::size_t>(n));
                    bwd[lv].execute(spectrum, c);
                    for (cd& v : c) v /= static_cast<double>(n) * 4.0 * kPi;
                    return c;
                };
                const auto c_pot = reduce(acc_pot);
                const auto c_gz = reduce(acc_gz);
                const auto c_gzb = reduce(acc_gzb);
                for (int k = 0; k < grid.n_theta; ++k) {
                    const std::size_t idx = jr * static_cast<std::size_t>(grid.n_theta) + k;
                    const cd e = std::polar(1.0, grid.angle(k));
                    const int s = k * stride;
                    out.potential[idx] += c_pot[s];
                    out.gradient[idx].gz += std::conj(e) * c_gz[s];
                    out.gradient[idx].gzbar += e * c_gzb[s];
                }
            }
        });
        parallel_for(npts, [&](std::size_t idx) {
            const GreenValue v = m.local_part<true>(g_, grid.point(idx));
            out.potential[idx] += v.pot;
            out.gradient[idx].gz += v.gz;
            out.gradient[idx].gzbar += v.gzbar;
        });
    }
    if (m.refined) {
        const GridValues fine = m.refined->on_grid(grid);
        for (std::size_t idx = 0; idx < npts; ++idx) {
            const double diff = std::max({std::abs(out.potential[idx] - fine.potential[idx]),
                                          std::abs(out.gradient[idx].gz - fine.gradient[idx].gz),
                                          std::abs(out.gradient[idx].gzbar - fine.gradient[idx].gzbar)});
            check_converged(diff, *q_.tolerance, grid.point(idx), q_.n_r);
        }
    }
    return out;
}

cd green_potential(const SourceField& g, cd z, const QuadratureParams& q) { return GreenOperator(g, q).potential(z); }

GreenGradient green_gradient(const SourceField& g, cd z, const QuadratureParams& q) {
    return GreenOperator(g, q).gradient(z);
}

PoissonSolution::PoissonSolution(BoundaryData f, SourceField g, QuadratureParams q)
    : f_(std::move(f)), green_(std::move(g), q) {}

cd PoissonSolution::operator()(cd z) const { return poisson_extend(f_, z) - green_.potential(z); }

cd solve(const BoundaryData& f, const SourceField& g, cd z, const QuadratureParams& q) {
    return PoissonSolution(f, g, q)(z);
}

// ---------------------------------------------------------------------------
// Verifiers

LemmaCReport lemma_c_verifier(const GreenOperator& green, const SampleGrid& grid, std::span<const double> boundary_thetas) {
    LemmaCReport rep;
    rep.g_sup = green.source().sup_norm();
    rep.interior_bound = rep.g_sup / 3.0 + kLemmaCInteriorTolerance;
    rep.boundary_bound = rep.g_sup / 4.0 * (1.0 + kLemmaCBoundarySlack);

    const auto values = green.on_grid(grid);
    for (std::size_t idx = 0; idx < values.gradient.size(); ++idx) {
        const auto& gr = values.gradient[idx];
        const double v = std::max(std::abs(gr.gz), std::abs(gr.gzbar));
        if (v > rep.interior_sup) {
            rep.interior_sup = v;
            rep.interior_witness = grid.point(idx);
        }
    }
    rep.interior_holds = rep.interior_sup <= rep.interior_bound;

    constexpr double kRadii[] = {0.9, 0.99, 0.999};
    std::vector<double> bsup(boundary_thetas.size()), ratios(boundary_thetas.size());
    parallel_for(boundary_thetas.size(), [&](std::size_t k) {
        const double t = boundary_thetas[k];
        const GreenGradient b = green.gradient(std::polar(rep.boundary_radius, t));
        bsup[k] = std::max(std::abs(b.gz), std::abs(b.gzbar));
        GreenGradient g3[3];
        for (int i = 0; i < 3; ++i) g3[i] = green.gradient(std::polar(kRadii[i], t));
        auto gap = [](const GreenGradient& x, const GreenGradient& y) {
            return std::max(std::abs(x.gz - y.gz), std::abs(x.gzbar - y.gzbar));
        };
        const double d1 = gap(g3[1], g3[0]);
        const double d2 = gap(g3[2], g3[1]);
        ratios[k] = d1 > 0.0 ? d2 / d1 : (d2 > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    });
    for (std::size_t k = 0; k < boundary_thetas.size(); ++k) {
        rep.boundary_sup = std::max(rep.boundary_sup, bsup[k]);
        rep.radial_worst_ratio = std::max(rep.radial_worst_ratio, ratios[k]);
    }
    rep.boundary_holds = rep.boundary_sup <= rep.boundary_bound;
    rep.radial_holds = rep.radial_worst_ratio < 1.0;
    return rep;
}

double boundary_energy(const BoundaryData& f, int theta_index) {
    const int n = f.size();
    if (theta_index < 0 || theta_index >= n) throw InputError("theta index out of range");
    if (!f.has_psi()) throw InputError("boundary energy needs the angular lift psi to fill the singular node");
    const auto s = f.samples();
    const cd ft = s[theta_index];
    const cd et = std::polar(1.0, f.theta(theta_index));
    std::vector<double> terms(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        if (j == theta_index) {
            const double d = f.dpsi()[j];
            terms[j] = d * d;
        } else {
            terms[j] = std::norm(ft - s[j]) / std::norm(et - std::polar(1.0, f.theta(j)));
        }
    }
    return pairwise_sum<double>(terms) / n;
}

BoundaryJacobianReport boundary_jacobian_check(const BoundaryData& f, std::span<const double> boundary_jacobian,
                                               double g_sup) {
    if (static_cast<int>(boundary_jacobian.size()) != f.size())
        throw InputError("boundary Jacobian needs one value per boundary sample");
    if (!(g_sup >= 0.0)) throw InputError("g_sup must be nonnegative");
    const auto& dpsi = f.dpsi();
    BoundaryJacobianReport rep;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (int k = 0; k < f.size(); ++k) {
        const double e = boundary_energy(f, k);
        const double margin = std::abs(boundary_jacobian[k] - dpsi[k] * e) - 0.5 * dpsi[k] * g_sup;
        if (margin > rep.worst_margin) {
            rep.worst_margin = margin;
            rep.worst_index = k;
        }
    }
    rep.holds = rep.worst_margin <= 1e-12;
    return rep;
}

HeinzReport heinz_check(const BoundaryData& f, const SampleGrid& grid) {
    if (!f.has_psi() || f.degree() != 1 || !f.psi_increasing())
        throw DomainError("Heinz check needs a sense-preserving circle homeomorphism (psi of degree 1, strictly increasing)");
    grid.validate();
    std::vector<double> vals(grid.size());
    const PointEval ext = [&](cd z) { return poisson_extend(f, z); };
    parallel_for(vals.size(), [&](std::size_t idx) {
        const WirtingerJet j = fd_jet(ext, grid.point(idx));
        vals[idx] = std::norm(j.wz) + std::norm(j.wzbar);
    });
    HeinzReport rep;
    const auto it = std::min_element(vals.begin(), vals.end());
    rep.min_value = *it;
    rep.witness = grid.point(static_cast<std::size_t>(it - vals.begin()));
    rep.holds = rep.min_value >= 1.0 / (kPi * kPi) - kHeinzTolerance;
    return rep;
}

}  // namespace quasidisk
