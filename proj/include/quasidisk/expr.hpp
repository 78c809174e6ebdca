#pragma once

// Polynomial mappings w(z) = sum c_{a,b} z^a conj(z)^b and the small DSL used
// to write them down. The grammar is documented in docs/grammar.md.

#include <complex>
#include <compare>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quasidisk/errors.hpp"

namespace quasidisk {

using cd = std::complex<double>;

// Exponent pair (a, b) of the monomial z^a conj(z)^b.
struct Monomial {
    int a = 0;
    int b = 0;
    auto operator<=>(const Monomial&) const = default;
};

struct Term {
    Monomial m;
    cd coeff;
};

// Canonical sparse polynomial in (z, conj z). Zero coefficients are never
// stored, so two expressions are equal iff their term maps are equal.
// Values are immutable once built.
class MappingExpr {
public:
    MappingExpr() = default;
    explicit MappingExpr(const std::map<Monomial, cd>& terms);

    static MappingExpr constant(cd c);
    static MappingExpr monomial(int a, int b, cd c = 1.0);
    static MappingExpr identity() { return monomial(1, 0); }

    const std::map<Monomial, cd>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    cd constant_term() const;
    int degree() const;  // max a + b; 0 for the zero polynomial
    int max_a() const { return max_a_; }
    int max_b() const { return max_b_; }

    cd eval(cd z) const;

    MappingExpr operator+(const MappingExpr& o) const;
    MappingExpr operator-(const MappingExpr& o) const;
    MappingExpr operator*(const MappingExpr& o) const;
    MappingExpr operator-() const;
    MappingExpr scaled(cd s) const;
    MappingExpr pow(int n) const;
    MappingExpr conj() const;  // conj(w)(z) as a polynomial

    bool operator==(const MappingExpr& o) const { return terms_ == o.terms_; }

private:
    void rebuild_cache();

    std::map<Monomial, cd> terms_;
    std::vector<Term> flat_;
    int max_a_ = 0;
    int max_b_ = 0;
};

// Wirtinger derivatives, applied term-wise.
MappingExpr d_z(const MappingExpr& e);
MappingExpr d_zbar(const MappingExpr& e);
// Delta = 4 d_z d_zbar.
MappingExpr laplacian(const MappingExpr& e);

// Evaluates several polynomials at one point sharing a single power table.
class PowerTable {
public:
    PowerTable(cd z, int max_a, int max_b);
    cd eval(const MappingExpr& e) const;

private:
    std::vector<cd> zp_;
    std::vector<cd> zbp_;
};

struct ParseDiagnostic {
    enum class Kind { kLex, kSyntax, kSemantic };
    std::size_t position = 0;  // byte offset into the source
    std::string message;
    Kind kind = Kind::kSyntax;
};

std::string_view to_string(ParseDiagnostic::Kind kind);

class ParseError : public InputError {
public:
    explicit ParseError(ParseDiagnostic diag);
    const ParseDiagnostic& diagnostic() const { return diag_; }
    // Source line with a caret under the offending byte.
    std::string render(std::string_view source) const;

private:
    ParseDiagnostic diag_;
};

MappingExpr parse(std::string_view source);

// Canonical text: terms in ascending (a, b) order, coefficients printed with
// round-trip precision. parse(print(e)) == e.
std::string print(const MappingExpr& e);

}  // namespace quasidisk
