#pragma once

// Subcommand drivers behind the quasidisk executable. Each returns a JSON
// report plus the exit code; the executable only parses flags and prints.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "quasidisk/calculus.hpp"
#include "quasidisk/errors.hpp"
#include "quasidisk/poisson.hpp"

namespace quasidisk::cli {

inline constexpr const char* kReportSchema = "quasidisk.report/1";

enum class OutputFormat { kJson, kCsv };

struct RunConfig {
    std::string subcommand;
    std::string expression;              // analyze, frontier
    SampleGrid grid;
    QuadratureParams quadrature;
    std::string output_path;             // empty: stdout
    OutputFormat format = OutputFormat::kJson;
    std::uint64_t seed = 20240521;
    int threads = 0;                     // 0: keep the default

    // analyze
    std::vector<std::pair<double, double>> pde;  // (M, N) pairs
    std::vector<double> k_values{1.0, 1.5, 2.0, 3.0, 5.0, 10.0};
    std::vector<double> proper_margins{1e-1, 1e-2, 1e-3};
    int fd_points = 32;

    // poisson
    std::string boundary = "identity";   // DSL expression restricted to the circle
    std::string boundary_csv;            // overrides boundary when set
    std::string source = "0";
    int boundary_samples = 256;
    std::vector<cd> eval_points;

    // bounds
    double K = 1.0;
    double Kp = 0.0;
    double g_sup = 0.0;

    // gallery
    std::vector<int> gallery_n{1};

    void validate() const;
};

struct Report {
    nlohmann::ordered_json json;
    std::string csv;                     // filled for the csv format
    ExitCode code = ExitCode::kSuccess;
};

Report cmd_analyze(const RunConfig& cfg);
Report cmd_frontier(const RunConfig& cfg);
Report cmd_poisson(const RunConfig& cfg);
Report cmd_bounds(const RunConfig& cfg);
Report cmd_gallery(const RunConfig& cfg);

Report run(const RunConfig& cfg);

/// Parse error that remembers the text it came from, for caret rendering.
class ExpressionError : public ParseError {
public:
    ExpressionError(const ParseError& e, std::string source) : ParseError(e.diagnostic()), source_(std::move(source)) {}
    const std::string& source() const { return source_; }

private:
    std::string source_;
};

/// Report for a failed run: error kind, message, and for parse errors the
/// diagnostic with a caret rendering.
Report error_report(const std::string& subcommand, const Error& e);

/// Point given as "x" or "x,y".
cd parse_point(const std::string& text);

/// JSON number, or null when not finite.
nlohmann::ordered_json number(double v);
nlohmann::ordered_json complex_json(cd z);

}  // namespace quasidisk::cli
