#include "quasidisk/gallery.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <iomanip>
#include <limits>
#include <sstream>

#include "quasidisk/qrclass.hpp"

namespace quasidisk {
namespace {

constexpr std::array<std::pair<ClaimKind, std::string_view>, 8> kKindNames{{
    {ClaimKind::kQrDeficiency, "qr_deficiency"},
    {ClaimKind::kProperness, "properness"},
    {ClaimKind::kQrBlowup, "qr_blowup"},
    {ClaimKind::kPdeInequality, "pde_inequality"},
    {ClaimKind::kProductInequality, "product_inequality"},
    {ClaimKind::kLipschitzBound, "lipschitz_bound"},
    {ClaimKind::kInverseGradientBlowup, "inverse_gradient_blowup"},
    {ClaimKind::kColipschitzVanishes, "colipschitz_vanishes"},
}};

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(6) << v;
    return os.str();
}

// Each step must grow by at least growth^(decades of margin).
bool diverges(const std::vector<double>& series, const std::vector<double>& margins, double growth, std::string& detail) {
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double decades = std::log10(margins[i - 1] / margins[i]);
        const double need = std::pow(growth, decades);
        const double got = series[i] / series[i - 1];
        if (!(got >= need)) {
            detail = "growth " + fmt(got) + " between margins " + fmt(margins[i - 1]) + " and " + fmt(margins[i]) +
                     " is below the required " + fmt(need);
            return false;
        }
    }
    return true;
}

std::vector<double> inverse_gradient_series(const MappingExpr& e, const std::vector<double>& margins, int n_theta) {
    const JetEvaluator jet(e);
    std::vector<double> out;
    for (double m : margins) {
        double worst = 0.0;
        for (int k = 0; k < n_theta; ++k) {
            const GradStats g = grad_stats(jet(std::polar(1.0 - m, 2.0 * std::numbers::pi * k / n_theta)));
            worst = std::max(worst, g.l_grad > 0.0 ? 1.0 / g.l_grad : std::numeric_limits<double>::infinity());
        }
        out.push_back(worst);
    }
    return out;
}

ClaimResult check(const GalleryCase& c, const Claim& cl, const SampleGrid& grid) {
    ClaimResult r;
    r.number = cl.number;
    r.kind = cl.kind;
    r.statement = cl.statement;
    r.bound = cl.bound;
    switch (cl.kind) {
        case ClaimKind::kQrDeficiency: {
            r.value = qr_deficiency(QRProfile::sample(c.mapping, grid), cl.K);
            r.passed = r.value <= cl.bound + cl.tolerance;
            r.detail = "least K' at K = " + fmt(cl.K) + " is " + fmt(r.value);
            break;
        }
        case ClaimKind::kProperness: {
            r.series = properness_check(c.mapping, cl.margins, grid.n_theta);
            r.value = r.series.back();
            const bool increasing = std::is_sorted(r.series.begin(), r.series.end(), std::less_equal<>{});
            r.passed = increasing && r.value >= cl.bound - cl.tolerance;
            r.detail = increasing ? "min |w| on the last circle is " + fmt(r.value) : "min |w| is not increasing";
            break;
        }
        case ClaimKind::kQrBlowup: {
            const auto seq = k_qr_blowup(c.mapping, cl.margins, grid.n_theta);
            std::size_t excluded = 0;
            for (const auto& s : seq) {
                r.series.push_back(s.ratio);
                excluded += s.excluded;
            }
            r.value = r.series.back();
            r.passed = diverges(r.series, cl.margins, cl.growth, r.detail);
            if (r.passed) r.detail = "dilatation reaches " + fmt(r.value);
            if (excluded > 0) r.detail += "; " + std::to_string(excluded) + " points with J_w <= 0 excluded";
            break;
        }
        case ClaimKind::kPdeInequality:
        case ClaimKind::kProductInequality: {
            r.passed = true;
            for (double M : cl.values) {
                const InequalityReport rep = cl.kind == ClaimKind::kPdeInequality
                                                 ? pde_inequality_check(c.mapping, M, cl.N, grid)
                                                 : product_inequality_check(c.mapping, M, grid);
                r.series.push_back(rep.worst_margin);
                if (rep.holds != cl.expect_holds) {
                    r.passed = false;
                    r.detail = "verdict at M = " + fmt(M) + " is " + (rep.holds ? "holds" : "fails");
                }
                if (!r.witness || !rep.holds) r.witness = rep.witness;
            }
            r.value = *std::max_element(r.series.begin(), r.series.end());
            if (r.passed) r.detail = std::string("verdict '") + (cl.expect_holds ? "holds" : "fails") + "' at every M";
            break;
        }
        case ClaimKind::kLipschitzBound: {
            const GridEstimate est = lipschitz_estimate(c.mapping, grid);
            r.value = est.value;
            r.witness = est.witness;
            r.passed = cl.strict ? est.value < cl.bound + cl.tolerance : est.value <= cl.bound + cl.tolerance;
            r.detail = "sup |grad w| on the grid is " + fmt(est.value);
            break;
        }
        case ClaimKind::kInverseGradientBlowup: {
            r.series = inverse_gradient_series(c.mapping, cl.margins, grid.n_theta);
            r.value = r.series.back();
            r.passed = diverges(r.series, cl.margins, cl.growth, r.detail);
            if (r.passed) r.detail = "sup 1/l(grad w) reaches " + fmt(r.value);
            break;
        }
        case ClaimKind::kColipschitzVanishes: {
            const GridEstimate lip = lipschitz_estimate(c.mapping, grid);
            r.witness = lip.witness;
            for (double m : cl.margins) {
                SampleGrid g = grid;
                g.margin = m;
                r.series.push_back(colipschitz_estimate(c.mapping, g).value);
            }
            r.value = r.series.back();
            bool decreasing = true;
            for (std::size_t i = 1; i < r.series.size(); ++i) decreasing = decreasing && r.series[i] < r.series[i - 1];
            const bool lip_ok = lip.value <= cl.bound + cl.tolerance;
            const bool vanish = r.value < cl.values.at(0);
            r.passed = lip_ok && decreasing && vanish;
            r.detail = "sup |grad w| = " + fmt(lip.value) + ", inf l(grad w) on the last grid = " + fmt(r.value);
            if (!decreasing) r.detail += "; inf l(grad w) is not decreasing";
            break;
        }
    }
    return r;
}

}  // namespace

std::string_view to_string(ClaimKind k) {
    for (const auto& [kind, name] : kKindNames)
        if (kind == k) return name;
    return "unknown";
}

ClaimKind parse_claim_kind(std::string_view name) {
    for (const auto& [kind, n] : kKindNames)
        if (n == name) return kind;
    throw InputError("unknown claim kind '" + std::string(name) + "'");
}

GalleryCase double_cover_example() {
    GalleryCase c;
    c.name = "double-cover";
    c.mapping = parse("2*|z|^4*z^2 - |z|^10*z^2");
    const std::vector<double> proper_margins{1e-1, 1e-2, 1e-3};
    const std::vector<double> blowup_margins{1e-2, 1e-3, 1e-4};
    const std::vector<double> big_m{1.0, 1e3, 1e6};

    Claim c1{.number = 1, .kind = ClaimKind::kQrDeficiency, .statement = "(1, 144)-quasiregular: |grad w|^2 <= J_w + 144",
             .bound = 144.0, .K = 1.0};
    Claim c2{.number = 2, .kind = ClaimKind::kProperness, .statement = "proper: min |w| on |z| = 1 - delta tends to 1",
             .bound = 0.99, .margins = proper_margins};
    Claim c3{.number = 3, .kind = ClaimKind::kQrBlowup,
             .statement = "not K-quasiregular for any K: sup |grad w|^2 / J_w diverges at the boundary",
             .margins = blowup_margins};
    Claim c4{.number = 4, .kind = ClaimKind::kPdeInequality, .statement = "|Delta w| <= |grad w|^2 + 76",
             .N = 76.0, .values = {1.0}, .expect_holds = true};
    Claim c5{.number = 5, .kind = ClaimKind::kPdeInequality,
             .statement = "no M makes |Delta w| <= M |grad w|^2 hold", .N = 0.0, .values = big_m, .expect_holds = false};
    Claim c6{.number = 6, .kind = ClaimKind::kProductInequality,
             .statement = "no M makes |Delta w| <= M |w_z w_zbar| hold", .values = big_m, .expect_holds = false};
    Claim c7{.number = 7, .kind = ClaimKind::kLipschitzBound, .statement = "|grad w| < 12", .bound = 12.0, .strict = true};
    c.claims = {c1, c2, c3, c4, c5, c6, c7};

    ClosedForms f;
    f.wz = parse("8*|z|^4*z - 7*|z|^10*z");
    f.wzbar = parse("4*|z|^2*z^3 - 5*|z|^8*z^3");
    f.lap = parse("64*|z|^2*z^2 - 140*|z|^8*z^2");
    f.jac = [](double r) {
        const double r6 = std::pow(r, 6);
        return 24.0 * std::pow(r, 10) * (2.0 - r6) * (1.0 - r6);
    };
    f.grad_norm = [](double r) {
        const double r6 = std::pow(r, 6);
        return std::pow(r, 5) * ((8.0 - 7.0 * r6) + std::abs(4.0 - 5.0 * r6));
    };
    f.l_grad = [](double r) {
        const double r6 = std::pow(r, 6);
        return std::pow(r, 5) * std::abs((8.0 - 7.0 * r6) - std::abs(4.0 - 5.0 * r6));
    };
    c.closed_forms = std::move(f);
    return c;
}

GalleryCase boundary_fixing_example(int n) {
    if (n < 1) throw InputError("the boundary-fixing example needs n >= 1");
    const double two_n = 2.0 * n;
    GalleryCase c;
    c.name = "boundary-fixing-n" + std::to_string(n);
    c.mapping = MappingExpr::monomial(1, 0, (two_n + 1.0) / two_n) - MappingExpr::monomial(n + 1, n, 1.0 / two_n);
    const std::vector<double> margins{1e-2, 1e-3, 1e-4};
    const double lip = 1.0 + 1.0 / two_n;

    Claim c1{.number = 1, .kind = ClaimKind::kQrDeficiency,
             .statement = "(1, (1 + 1/2n)^2)-quasiconformal: |grad w|^2 <= J_w + (1 + 1/2n)^2", .bound = lip * lip,
             .K = 1.0};
    Claim c2{.number = 2, .kind = ClaimKind::kQrBlowup,
             .statement = "not K-quasiconformal for any K: |grad w|^2 / J_w diverges at the boundary", .margins = margins};
    Claim c3{.number = 3, .kind = ClaimKind::kInverseGradientBlowup,
             .statement = "inverse not (K, K')-quasiconformal: |grad w^{-1}| = 1/l(grad w) diverges at the boundary",
             .margins = margins};
    Claim c4{.number = 4, .kind = ClaimKind::kColipschitzVanishes,
             .statement = "Lipschitz with |grad w| <= 1 + 1/2n but not coLipschitz: inf l(grad w) -> 0", .bound = lip,
             .values = {0.05}, .margins = margins, .tolerance = 1e-12};
    c.claims = {c1, c2, c3, c4};

    ClosedForms f;
    f.wz = MappingExpr::constant((two_n + 1.0) / two_n) - MappingExpr::monomial(n, n, (n + 1.0) / two_n);
    f.wzbar = MappingExpr::monomial(n + 1, n - 1, -0.5);
    f.lap = MappingExpr::monomial(n, n - 1, -2.0 * (n + 1.0));
    f.jac = [n, two_n](double r) {
        const double r2n = std::pow(r, 2 * n);
        return (two_n + 1.0) * (1.0 - r2n) * (two_n + 1.0 - r2n) / (two_n * two_n);
    };
    f.grad_norm = [n, two_n](double r) { return ((two_n + 1.0) - std::pow(r, 2 * n)) / two_n; };
    f.l_grad = [n, two_n](double r) { return (two_n + 1.0) * (1.0 - std::pow(r, 2 * n)) / two_n; };
    c.closed_forms = std::move(f);
    return c;
}

bool CaseReport::all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const ClaimResult& r) { return r.passed; });
}

int CaseReport::passed_count() const {
    return static_cast<int>(std::count_if(results.begin(), results.end(), [](const ClaimResult& r) { return r.passed; }));
}

CaseReport verify_case(const GalleryCase& c, const SampleGrid& grid) {
    grid.validate();
    CaseReport rep;
    rep.name = c.name;
    rep.grid = grid;
    for (const Claim& cl : c.claims) rep.results.push_back(check(c, cl, grid));
    return rep;
}

}  // namespace quasidisk
