#pragma once

// Worked example mappings with their claimed properties encoded as checks.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "quasidisk/calculus.hpp"

namespace quasidisk {

enum class ClaimKind {
    kQrDeficiency,           // qr_deficiency(K) <= bound
    kProperness,             // min |w| on shrinking circles increases to >= bound
    kQrBlowup,               // sup |grad w|^2 / J_w on shrinking circles diverges
    kPdeInequality,          // |Delta w| <= M |grad w|^2 + N for each M in values; verdict must match
    kProductInequality,      // |Delta w| <= M |w_z w_zbar| for each M in values; verdict must match
    kLipschitzBound,         // sup |grad w| < bound (strict) or <= bound
    kInverseGradientBlowup,  // sup 1/l(grad w) on shrinking circles diverges
    kColipschitzVanishes,    // sup |grad w| <= bound and inf l(grad w) over grids with shrinking margins -> 0
};

std::string_view to_string(ClaimKind k);
/// Throws InputError for an unknown name.
ClaimKind parse_claim_kind(std::string_view name);

struct Claim {
    int number = 0;
    ClaimKind kind = ClaimKind::kQrDeficiency;
    std::string statement;
    double bound = 0.0;
    double K = 1.0;                 // kQrDeficiency
    double N = 0.0;                 // kPdeInequality
    std::vector<double> values;     // M values for the inequality kinds
    std::vector<double> margins;    // decreasing, for the sequence kinds
    bool expect_holds = true;       // inequality kinds: expected verdict at every M
    bool strict = false;            // kLipschitzBound: '<' instead of '<='
    double growth = 5.0;            // required growth factor per decade of margin
    double tolerance = 0.0;         // slack added to bounds
};

/// Closed forms of the example, as written independently of the symbolic engine.
struct ClosedForms {
    MappingExpr wz;
    MappingExpr wzbar;
    MappingExpr lap;
    std::function<double(double)> jac;        // J_w as a function of r = |z|
    std::function<double(double)> grad_norm;  // |grad w|(r)
    std::function<double(double)> l_grad;     // l(grad w)(r)
};

struct GalleryCase {
    std::string name;
    MappingExpr mapping;
    std::vector<Claim> claims;
    std::optional<ClosedForms> closed_forms;
};

/// w = 2|z|^4 z^2 - |z|^10 z^2: a proper two-to-one self-map of the disk with
/// bounded gradient that is (1, 144)-quasiregular but K-quasiregular for no K.
GalleryCase double_cover_example();
/// w = ((2n + 1) z - z |z|^{2n}) / (2n): fixes the circle pointwise, Lipschitz
/// with constant 1 + 1/(2n), quasiconformal, with l(grad w) -> 0 at the boundary.
GalleryCase boundary_fixing_example(int n);

struct ClaimResult {
    int number = 0;
    ClaimKind kind = ClaimKind::kQrDeficiency;
    std::string statement;
    bool passed = false;
    double value = 0.0;            // headline measurement
    double bound = 0.0;
    std::vector<double> series;    // per-margin or per-M measurements
    std::optional<cd> witness;
    std::string detail;
};

struct CaseReport {
    std::string name;
    SampleGrid grid;
    std::vector<ClaimResult> results;
    bool all_passed() const;
    int passed_count() const;
};

CaseReport verify_case(const GalleryCase& c, const SampleGrid& grid = {});

}  // namespace quasidisk
