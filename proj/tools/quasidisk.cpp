// quasidisk: analyze planar mappings of the unit disk from the command line.

#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "quasidisk/cli.hpp"
#include "quasidisk/parallel.hpp"

namespace qd = quasidisk;
namespace cli = quasidisk::cli;

namespace {

void add_grid_options(CLI::App* app, qd::SampleGrid& g) {
    app->add_option("--n-r", g.n_r, "radial grid points")->capture_default_str();
    app->add_option("--n-theta", g.n_theta, "angular grid points")->capture_default_str();
    app->add_option("--margin", g.margin, "outer radius is 1 - margin")->capture_default_str();
    app->add_option("--r-min", g.r_min, "inner radius of the grid annulus")->capture_default_str();
}

int write_output(const cli::RunConfig& cfg, const cli::Report& rep) {
    const std::string text = cfg.format == cli::OutputFormat::kCsv && !rep.csv.empty() ? rep.csv : rep.json.dump(2) + "\n";
    if (cfg.output_path.empty()) {
        std::cout << text;
        return static_cast<int>(rep.code);
    }
    std::ofstream out(cfg.output_path);
    if (!out || !(out << text)) {
        std::cerr << "error: cannot write '" << cfg.output_path << "'\n";
        return static_cast<int>(qd::ExitCode::kIoError);
    }
    return static_cast<int>(rep.code);
}

}  // namespace

int main(int argc, char** argv) {
    cli::RunConfig cfg;
    std::string format = "json";
    std::vector<double> pde_flat;
    std::vector<std::string> eval_text;
    double tolerance = 0.0;

    CLI::App app{"Quasiregular mappings of the unit disk: gradient bounds, Poisson problems, constant chains"};
    app.set_config("--config", "", "TOML or INI file with option values (flags take precedence)");
    app.require_subcommand(1);
    app.add_option("--threads", cfg.threads, "worker threads (default: QUASIDISK_THREADS or hardware)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--seed", cfg.seed, "seed for randomized checks")->capture_default_str();
    app.add_option("-o,--output", cfg.output_path, "write the report here instead of stdout");
    app.add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();

    auto* analyze = app.add_subcommand("analyze", "gradient statistics, frontier, Lipschitz estimates of a mapping");
    analyze->add_option("expression", cfg.expression, "mapping in the expression language")->required();
    add_grid_options(analyze, cfg.grid);
    analyze->add_option("--pde", pde_flat, "check |Delta w| <= M |grad w|^2 + N (repeatable: --pde M N)")
        ->expected(2)
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    analyze->add_option("--K", cfg.k_values, "K values for the frontier, ascending");
    analyze->add_option("--proper-margins", cfg.proper_margins, "circle margins for the properness check");
    analyze->add_option("--fd-points", cfg.fd_points, "random points for the finite-difference cross-check")
        ->capture_default_str();

    auto* frontier = app.add_subcommand("frontier", "least K' for each K on the sample grid");
    frontier->add_option("expression", cfg.expression, "mapping in the expression language")->required();
    add_grid_options(frontier, cfg.grid);
    frontier->add_option("--K", cfg.k_values, "K values, ascending");

    auto* poisson = app.add_subcommand("poisson", "solve Delta w = g in the disk with w = f on the circle");
    poisson->add_option("--f", cfg.boundary, "boundary map: expression restricted to the circle, 'identity' or 'zero'")
        ->capture_default_str();
    poisson->add_option("--f-csv", cfg.boundary_csv, "boundary samples as theta,re,im");
    poisson->add_option("--g", cfg.source, "source term g as an expression")->capture_default_str();
    poisson->add_option("--samples", cfg.boundary_samples, "boundary samples for --f")->capture_default_str();
    poisson->add_option("--eval", eval_text, "evaluation points, x or x,y (repeatable)");
    poisson->add_option("--quad-n-r", cfg.quadrature.n_r, "radial quadrature nodes")->capture_default_str();
    poisson->add_option("--quad-n-theta", cfg.quadrature.n_theta, "angular quadrature nodes")->capture_default_str();
    poisson->add_option("--epsilon-split", cfg.quadrature.epsilon_split, "radius of the local disk")
        ->capture_default_str();
    auto* tol = poisson->add_option("--tolerance", tolerance, "fail with exit 3 if doubling n_r changes G[g] more");
    add_grid_options(poisson, cfg.grid);

    auto* bounds = app.add_subcommand("bounds", "explicit Lipschitz and coLipschitz constants");
    bounds->add_option("--K", cfg.K, "K >= 1")->capture_default_str();
    bounds->add_option("--Kp", cfg.Kp, "K' >= 0")->capture_default_str();
    bounds->add_option("--gsup", cfg.g_sup, "sup norm of Delta w")->capture_default_str();

    auto* gallery = app.add_subcommand("gallery", "verify the claims of the worked examples");
    gallery->add_option("--n", cfg.gallery_n, "parameters of the boundary-fixing family")->capture_default_str();
    add_grid_options(gallery, cfg.grid);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return static_cast<int>(qd::ExitCode::kInputError);
    }

    cfg.subcommand = app.get_subcommands().front()->get_name();
    cfg.format = format == "csv" ? cli::OutputFormat::kCsv : cli::OutputFormat::kJson;
    if (*tol) cfg.quadrature.tolerance = tolerance;

    try {
        if (cfg.threads > 0) qd::set_thread_count(cfg.threads);
        for (std::size_t i = 0; i + 1 < pde_flat.size(); i += 2) cfg.pde.emplace_back(pde_flat[i], pde_flat[i + 1]);
        for (const auto& t : eval_text) cfg.eval_points.push_back(cli::parse_point(t));
        return write_output(cfg, cli::run(cfg));
    } catch (const qd::Error& e) {
        const cli::Report rep = cli::error_report(cfg.subcommand, e);
        const auto& diag = rep.json["error"]["diagnostic"];
        if (!diag.is_null() && diag["rendered"].is_string())
            std::cerr << diag["rendered"].get<std::string>() << '\n';
        else
            std::cerr << "error: " << e.what() << '\n';
        std::cout << rep.json.dump(2) << '\n';
        return static_cast<int>(rep.code);
    }
}
