#include "quasidisk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>

#include "quasidisk/bounds.hpp"
#include "quasidisk/gallery.hpp"
#include "quasidisk/parallel.hpp"
#include "quasidisk/qrclass.hpp"

namespace quasidisk::cli {
namespace {

using json = nlohmann::ordered_json;

json grid_json(const SampleGrid& g) {
    return {{"n_r", g.n_r}, {"n_theta", g.n_theta}, {"margin", g.margin}, {"r_min", g.r_min}};
}

json quadrature_json(const QuadratureParams& q) {
    return {{"n_r", q.n_r},
            {"n_theta", q.n_theta},
            {"epsilon_split", q.epsilon_split},
            {"local_angles", q.local_angles},
            {"local_radial", q.local_radial},
            {"tolerance", q.tolerance ? number(*q.tolerance) : json(nullptr)}};
}

json config_json(const RunConfig& c) {
    json pde = json::array();
    for (auto [M, N] : c.pde) pde.push_back({{"M", M}, {"N", N}});
    json evals = json::array();
    for (cd z : c.eval_points) evals.push_back(complex_json(z));
    return {{"expression", c.expression},
            {"grid", grid_json(c.grid)},
            {"quadrature", quadrature_json(c.quadrature)},
            {"format", c.format == OutputFormat::kJson ? "json" : "csv"},
            {"seed", c.seed},
            {"threads", thread_count()},
            {"pde", pde},
            {"k_values", c.k_values},
            {"proper_margins", c.proper_margins},
            {"fd_points", c.fd_points},
            {"boundary", c.boundary},
            {"boundary_csv", c.boundary_csv},
            {"source", c.source},
            {"boundary_samples", c.boundary_samples},
            {"eval", evals},
            {"K", c.K},
            {"Kp", c.Kp},
            {"gsup", c.g_sup},
            {"gallery_n", c.gallery_n}};
}

Report make_report(const RunConfig& cfg, json result, ExitCode code) {
    Report r;
    r.code = code;
    r.json["schema"] = kReportSchema;
    r.json["subcommand"] = cfg.subcommand;
    r.json["status"] = code == ExitCode::kSuccess ? "ok" : "check_failed";
    r.json["exit_code"] = static_cast<int>(code);
    r.json["config"] = config_json(cfg);
    r.json["result"] = std::move(result);
    r.json["error"] = nullptr;
    return r;
}

MappingExpr parse_mapping(const std::string& text) {
    if (text.empty()) throw InputError("an expression is required");
    try {
        return parse(text);
    } catch (const ParseError& e) {
        throw ExpressionError(e, text);
    }
}

// Named boundary maps accepted besides DSL text.
std::string boundary_alias(const std::string& s) {
    if (s == "identity") return "z";
    if (s == "zero") return "0";
    return s;
}

json witness_json(cd z) { return complex_json(z); }

json frontier_json(const ParetoFrontier& f) {
    json pts = json::array();
    for (const auto& p : f.points) pts.push_back({{"K", p.K}, {"kprime_min", number(p.kprime_min)}});
    return {{"monotone", f.monotone}, {"points", pts}};
}

json sense_json(const SensePreservingReport& s) {
    return {{"all_positive", s.all_positive}, {"min_jac", number(s.min_jac)}, {"witness", witness_json(s.witness)}};
}

json estimate_json(const GridEstimate& e) { return {{"value", number(e.value)}, {"witness", witness_json(e.witness)}}; }

double fd_disagreement(const MappingExpr& e, std::uint64_t seed, int count) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const JetEvaluator jet(e);
    const PointEval f = [&e](cd z) { return e.eval(z); };
    double worst = 0.0;
    for (int k = 0; k < count; ++k) {
        const cd z = std::polar(0.9 * std::sqrt(u(rng)), 2.0 * std::numbers::pi * u(rng));
        const WirtingerJet a = jet(z);
        const WirtingerJet b = fd_jet(f, z);
        for (auto [x, y] : {std::pair{a.wz, b.wz}, {a.wzbar, b.wzbar}, {a.lap, b.lap}})
            worst = std::max(worst, std::abs(x - y) / std::max(1.0, std::abs(x)));
    }
    return worst;
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json complex_json(cd z) { return json::array({number(z.real()), number(z.imag())}); }

cd parse_point(const std::string& text) {
    const auto comma = text.find(',');
    try {
        std::size_t used = 0;
        const std::string re = text.substr(0, comma);
        const double x = std::stod(re, &used);
        if (used != re.size()) throw std::invalid_argument(text);
        double y = 0.0;
        if (comma != std::string::npos) {
            const std::string im = text.substr(comma + 1);
            y = std::stod(im, &used);
            if (used != im.size()) throw std::invalid_argument(text);
        }
        return {x, y};
    } catch (const std::logic_error&) {
        throw InputError("bad point '" + text + "': expected x or x,y");
    }
}

void RunConfig::validate() const {
    grid.validate();
    quadrature.validate();
    if (fd_points < 0) throw InputError("fd points must be >= 0");
    for (double K : k_values)
        if (!(K >= 1.0)) throw InputError("K values must be >= 1");
    if (!std::is_sorted(k_values.begin(), k_values.end())) throw InputError("K values must be ascending");
    for (int n : gallery_n)
        if (n < 1) throw InputError("gallery n must be >= 1");
    if (boundary_samples < 16 || (boundary_samples & (boundary_samples - 1)) != 0)
        throw InputError("boundary samples must be a power of two >= 16");
}

Report cmd_analyze(const RunConfig& cfg) {
    const MappingExpr e = parse_mapping(cfg.expression);
    const auto samples = sample_grid(e, cfg.grid);
    const QRProfile profile = QRProfile::sample(e, cfg.grid);

    double grad_max = 0.0, l_min = INFINITY, jac_min = INFINITY, jac_max = -INFINITY, lap_max = 0.0;
    for (const auto& s : samples) {
        grad_max = std::max(grad_max, s.stats.grad_norm);
        l_min = std::min(l_min, s.stats.l_grad);
        jac_min = std::min(jac_min, s.stats.jac);
        jac_max = std::max(jac_max, s.stats.jac);
        lap_max = std::max(lap_max, std::abs(s.jet.lap));
    }

    json proper = json::array();
    const auto mins = properness_check(e, cfg.proper_margins, cfg.grid.n_theta);
    for (std::size_t i = 0; i < mins.size(); ++i)
        proper.push_back({{"margin", cfg.proper_margins[i]}, {"min_abs_w", number(mins[i])}});

    bool ok = true;
    json pde = json::array();
    for (auto [M, N] : cfg.pde) {
        const InequalityReport r = pde_inequality_check(e, M, N, cfg.grid);
        ok = ok && r.holds;
        pde.push_back({{"M", M},
                       {"N", N},
                       {"holds", r.holds},
                       {"worst_margin", number(r.worst_margin)},
                       {"witness", witness_json(r.witness)}});
    }

    json result;
    result["expression"] = print(e);
    result["grid"] = grid_json(cfg.grid);
    result["grad_stats"] = {{"grad_norm_max", number(grad_max)},
                            {"l_grad_min", number(l_min)},
                            {"jac_min", number(jac_min)},
                            {"jac_max", number(jac_max)},
                            {"lap_abs_max", number(lap_max)}};
    result["sense_preserving"] = sense_json(sense_preserving_check(profile));
    result["frontier"] = frontier_json(pareto_frontier(profile, cfg.k_values));
    result["lipschitz"] = estimate_json(lipschitz_estimate(e, cfg.grid));
    result["colipschitz"] = estimate_json(colipschitz_estimate(e, cfg.grid));
    result["properness"] = proper;
    result["pde_checks"] = pde;
    result["fd_agreement"] = {{"seed", cfg.seed},
                              {"points", cfg.fd_points},
                              {"max_rel_error", number(fd_disagreement(e, cfg.seed, cfg.fd_points))}};

    Report rep = make_report(cfg, std::move(result), ok ? ExitCode::kSuccess : ExitCode::kCheckFailed);
    if (cfg.format == OutputFormat::kCsv) {
        std::ostringstream os;
        write_grid_csv(os, samples);
        rep.csv = os.str();
    }
    return rep;
}

Report cmd_frontier(const RunConfig& cfg) {
    const MappingExpr e = parse_mapping(cfg.expression);
    const QRProfile profile = QRProfile::sample(e, cfg.grid);
    const ParetoFrontier f = pareto_frontier(profile, cfg.k_values);

    // Each frontier point must satisfy the derived Lipschitz-type inequality.
    bool ok = true;
    json checks = json::array();
    for (const auto& p : f.points) {
        const Lemma11Report r = lemma11_check(profile, p.K, p.kprime_min);
        ok = ok && r.holds;
        checks.push_back({{"K", p.K},
                          {"Kp", number(p.kprime_min)},
                          {"holds", r.holds},
                          {"worst_margin", number(r.worst_margin)},
                          {"witness", witness_json(r.witness)}});
    }

    json result;
    result["expression"] = print(e);
    result["grid"] = grid_json(cfg.grid);
    result["sense_preserving"] = sense_json(sense_preserving_check(profile));
    result["frontier"] = frontier_json(f);
    result["gradient_checks"] = checks;

    Report rep = make_report(cfg, std::move(result), ok ? ExitCode::kSuccess : ExitCode::kCheckFailed);
    if (cfg.format == OutputFormat::kCsv) {
        std::ostringstream os;
        write_frontier_csv(os, f);
        rep.csv = os.str();
    }
    return rep;
}

Report cmd_poisson(const RunConfig& cfg) {
    std::optional<BoundaryData> f;
    if (!cfg.boundary_csv.empty()) {
        std::ifstream in(cfg.boundary_csv);
        if (!in) throw IoError("cannot open boundary file '" + cfg.boundary_csv + "'");
        f = BoundaryData::read_csv(in);
    } else {
        f = BoundaryData::from_expr(parse_mapping(boundary_alias(cfg.boundary)), cfg.boundary_samples);
    }
    const MappingExpr g_expr = parse_mapping(cfg.source);
    const PoissonSolution w(*f, SourceField::from_expr(g_expr), cfg.quadrature);

    json values = json::array();
    for (cd z : cfg.eval_points) {
        if (!(std::abs(z) < 1.0)) throw DomainError("evaluation point outside the open unit disk");
        const cd v = w(z);
        values.push_back({{"z", complex_json(z)}, {"w", complex_json(v)}, {"abs_w", number(std::abs(v))}});
    }

    json result;
    result["boundary"] = {{"source", cfg.boundary_csv.empty() ? cfg.boundary : cfg.boundary_csv},
                          {"samples", f->size()},
                          {"degree", f->has_psi() ? json(f->degree()) : json(nullptr)},
                          {"psi_increasing", f->has_psi() ? json(f->psi_increasing()) : json(nullptr)}};
    result["source"] = {{"expression", print(g_expr)}, {"sup_norm", number(w.green().source().sup_norm())}};
    result["quadrature"] = quadrature_json(cfg.quadrature);
    result["values"] = values;

    Report rep = make_report(cfg, std::move(result), ExitCode::kSuccess);
    if (cfg.format == OutputFormat::kCsv) {
        const auto gv = w.green().on_grid(cfg.grid);
        std::ostringstream os;
        os << "r,theta,re,im\n";
        for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
            const cd z = cfg.grid.point(i);
            const cd v = poisson_extend(*f, z) - gv.potential[i];
            const int j = static_cast<int>(i / cfg.grid.n_theta);
            const int k = static_cast<int>(i % cfg.grid.n_theta);
            os << csv_number(cfg.grid.radius(j)) << ',' << csv_number(cfg.grid.angle(k)) << ',' << csv_number(v.real())
               << ',' << csv_number(v.imag()) << '\n';
        }
        rep.csv = os.str();
    }
    return rep;
}

Report cmd_bounds(const RunConfig& cfg) {
    const BoundSet b = lipschitz_M(cfg.K, cfg.Kp, cfg.g_sup);
    json result;
    result["K"] = b.K;
    result["Kp"] = b.Kp;
    result["gsup"] = b.g_sup;
    result["mu"] = number(b.mu);
    result["p_s"] = number(b.p_s);
    result["m2"] = number(b.m2);
    result["c0"] = number(b.c0);
    result["log10_c0"] = number(b.log10_c0);
    result["c1"] = b.c1 ? number(*b.c1) : json(nullptr);
    result["c1_value"] = number(b.c1_value);
    result["lip_M"] = number(b.lip_M);
    result["log10_lip_M"] = number(b.log10_lip_M);
    result["colipschitz"] = {{"n2", number(b.colip.n2)},
                             {"log10_n2", number(b.colip.log10_n2)},
                             {"log10_n2_upper", number(b.colip.log10_n2_upper)},
                             {"n1", number(b.colip.n1)},
                             {"N", number(b.colip.N)},
                             {"positive", b.colip.positive}};

    Report rep = make_report(cfg, result, ExitCode::kSuccess);
    if (cfg.format == OutputFormat::kCsv) {
        std::ostringstream os;
        os << "name,value\n";
        const std::pair<const char*, double> rows[] = {
            {"K", b.K},           {"Kp", b.Kp},
            {"gsup", b.g_sup},    {"mu", b.mu},
            {"p_s", b.p_s},       {"m2", b.m2},
            {"c0", b.c0},         {"log10_c0", b.log10_c0},
            {"c1", b.c1 ? *b.c1 : NAN}, {"c1_value", b.c1_value},
            {"lip_M", b.lip_M},   {"log10_lip_M", b.log10_lip_M},
            {"n2", b.colip.n2},   {"log10_n2", b.colip.log10_n2},
            {"n1", b.colip.n1},   {"N", b.colip.N}};
        for (auto [name, v] : rows) os << name << ',' << csv_number(v) << '\n';
        rep.csv = os.str();
    }
    return rep;
}

Report cmd_gallery(const RunConfig& cfg) {
    std::vector<GalleryCase> cases{double_cover_example()};
    for (int n : cfg.gallery_n) cases.push_back(boundary_fixing_example(n));

    int total = 0, passed = 0;
    json jcases = json::array();
    std::ostringstream csv;
    csv << "case,claim,kind,passed,value,bound\n";
    for (const GalleryCase& c : cases) {
        const CaseReport r = verify_case(c, cfg.grid);
        json claims = json::array();
        for (const ClaimResult& cr : r.results) {
            json series = json::array();
            for (double v : cr.series) series.push_back(number(v));
            claims.push_back({{"claim", cr.number},
                              {"kind", std::string(to_string(cr.kind))},
                              {"statement", cr.statement},
                              {"passed", cr.passed},
                              {"value", number(cr.value)},
                              {"bound", number(cr.bound)},
                              {"series", series},
                              {"witness", cr.witness ? witness_json(*cr.witness) : json(nullptr)},
                              {"detail", cr.detail}});
            csv << r.name << ',' << cr.number << ',' << to_string(cr.kind) << ',' << (cr.passed ? 1 : 0) << ','
                << csv_number(cr.value) << ',' << csv_number(cr.bound) << '\n';
        }
        total += static_cast<int>(r.results.size());
        passed += r.passed_count();
        jcases.push_back({{"name", r.name},
                          {"passed", r.all_passed()},
                          {"passed_count", r.passed_count()},
                          {"claims", claims}});
    }

    json result;
    result["grid"] = grid_json(cfg.grid);
    result["cases"] = jcases;
    result["claims_total"] = total;
    result["claims_passed"] = passed;
    Report rep = make_report(cfg, std::move(result), passed == total ? ExitCode::kSuccess : ExitCode::kCheckFailed);
    if (cfg.format == OutputFormat::kCsv) rep.csv = csv.str();
    return rep;
}

Report run(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.subcommand == "analyze") return cmd_analyze(cfg);
    if (cfg.subcommand == "frontier") return cmd_frontier(cfg);
    if (cfg.subcommand == "poisson") return cmd_poisson(cfg);
    if (cfg.subcommand == "bounds") return cmd_bounds(cfg);
    if (cfg.subcommand == "gallery") return cmd_gallery(cfg);
    throw InputError("unknown subcommand '" + cfg.subcommand + "'");
}

Report error_report(const std::string& subcommand, const Error& e) {
    Report r;
    r.code = e.exit_code();
    json err;
    err["kind"] = dynamic_cast<const ParseError*>(&e)     ? "parse"
                  : dynamic_cast<const IoError*>(&e)      ? "io"
                  : dynamic_cast<const DomainError*>(&e)  ? "domain"
                  : dynamic_cast<const NonconvergenceError*>(&e) ? "nonconvergence"
                                                                 : "input";
    err["message"] = e.what();
    if (const auto* pe = dynamic_cast<const ParseError*>(&e)) {
        const auto* src = dynamic_cast<const ExpressionError*>(&e);
        const auto& d = pe->diagnostic();
        err["diagnostic"] = {{"kind", std::string(to_string(d.kind))},
                             {"offset", d.position},
                             {"message", d.message},
                             {"rendered", src ? json(pe->render(src->source())) : json(nullptr)}};
    } else {
        err["diagnostic"] = nullptr;
    }
    r.json["schema"] = kReportSchema;
    r.json["subcommand"] = subcommand;
    r.json["status"] = "error";
    r.json["exit_code"] = static_cast<int>(r.code);
    r.json["config"] = nullptr;
    r.json["result"] = nullptr;
    r.json["error"] = err;
    return r;
}

}  // namespace quasidisk::cli
