#include "quasidisk/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace quasidisk {

namespace {

constexpr int kMaxDegree = 1024;

void add_into(std::map<Monomial, cd>& acc, Monomial m, cd c) {
    if (c == cd(0.0)) return;
    auto [it, inserted] = acc.try_emplace(m, c);
    if (inserted) return;
    it->second += c;
    if (it->second == cd(0.0)) acc.erase(it);
}

}  // namespace

MappingExpr::MappingExpr(const std::map<Monomial, cd>& terms) {
    for (const auto& [m, c] : terms) {
        if (m.a < 0 || m.b < 0) throw InputError("negative exponent in polynomial term");
        if (c != cd(0.0)) terms_.emplace(m, c);
    }
    rebuild_cache();
}

void MappingExpr::rebuild_cache() {
    flat_.clear();
    flat_.reserve(terms_.size());
    max_a_ = 0;
    max_b_ = 0;
    for (const auto& [m, c] : terms_) {
        flat_.push_back({m, c});
        max_a_ = std::max(max_a_, m.a);
        max_b_ = std::max(max_b_, m.b);
    }
}

MappingExpr MappingExpr::constant(cd c) { return MappingExpr({{Monomial{0, 0}, c}}); }

MappingExpr MappingExpr::monomial(int a, int b, cd c) { return MappingExpr({{Monomial{a, b}, c}}); }

bool MappingExpr::is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first == Monomial{0, 0});
}

cd MappingExpr::constant_term() const {
    auto it = terms_.find(Monomial{0, 0});
    return it == terms_.end() ? cd(0.0) : it->second;
}

int MappingExpr::degree() const {
    int d = 0;
    for (const auto& t : flat_) d = std::max(d, t.m.a + t.m.b);
    return d;
}

cd MappingExpr::eval(cd z) const {
    if (flat_.empty()) return 0.0;
    constexpr int kInline = 32;
    if (max_a_ >= kInline || max_b_ >= kInline) return PowerTable(z, max_a_, max_b_).eval(*this);
    // Hot path for small degrees: power tables on the stack in plain doubles.
    double zr[kInline], zi[kInline], br[kInline], bi[kInline];
    zr[0] = br[0] = 1.0;
    zi[0] = bi[0] = 0.0;
    const double x = z.real();
    const double y = z.imag();
    for (int k = 1; k <= max_a_; ++k) {
        zr[k] = zr[k - 1] * x - zi[k - 1] * y;
        zi[k] = zr[k - 1] * y + zi[k - 1] * x;
    }
    for (int k = 1; k <= max_b_; ++k) {
        br[k] = br[k - 1] * x + bi[k - 1] * y;
        bi[k] = bi[k - 1] * x - br[k - 1] * y;
    }
    double re = 0.0;
    double im = 0.0;
    for (const Term& t : flat_) {
        const double pr = zr[t.m.a] * br[t.m.b] - zi[t.m.a] * bi[t.m.b];
        const double pi = zr[t.m.a] * bi[t.m.b] + zi[t.m.a] * br[t.m.b];
        re += t.coeff.real() * pr - t.coeff.imag() * pi;
        im += t.coeff.real() * pi + t.coeff.imag() * pr;
    }
    return {re, im};
}

MappingExpr MappingExpr::operator+(const MappingExpr& o) const {
    auto acc = terms_;
    for (const auto& [m, c] : o.terms_) add_into(acc, m, c);
    return MappingExpr(acc);
}

MappingExpr MappingExpr::operator-(const MappingExpr& o) const { return *this + (-o); }

MappingExpr MappingExpr::operator-() const { return scaled(-1.0); }

MappingExpr MappingExpr::operator*(const MappingExpr& o) const {
    std::map<Monomial, cd> acc;
    for (const auto& [m1, c1] : terms_)
        for (const auto& [m2, c2] : o.terms_) add_into(acc, Monomial{m1.a + m2.a, m1.b + m2.b}, c1 * c2);
    return MappingExpr(acc);
}

MappingExpr MappingExpr::scaled(cd s) const {
    std::map<Monomial, cd> acc;
    for (const auto& [m, c] : terms_) add_into(acc, m, c * s);
    return MappingExpr(acc);
}

MappingExpr MappingExpr::pow(int n) const {
    if (n < 0) throw InputError("negative exponent");
    MappingExpr result = constant(1.0);
    MappingExpr base = *this;
    while (n > 0) {
        if (n & 1) result = result * base;
        n >>= 1;
        if (n > 0) base = base * base;
    }
    return result;
}

MappingExpr MappingExpr::conj() const {
    std::map<Monomial, cd> acc;
    for (const auto& [m, c] : terms_) acc.emplace(Monomial{m.b, m.a}, std::conj(c));
    return MappingExpr(acc);
}

MappingExpr d_z(const MappingExpr& e) {
    std::map<Monomial, cd> acc;
    for (const auto& [m, c] : e.terms())
        if (m.a > 0) acc.emplace(Monomial{m.a - 1, m.b}, c * static_cast<double>(m.a));
    return MappingExpr(acc);
}

MappingExpr d_zbar(const MappingExpr& e) {
    std::map<Monomial, cd> acc;
    for (const auto& [m, c] : e.terms())
        if (m.b > 0) acc.emplace(Monomial{m.a, m.b - 1}, c * static_cast<double>(m.b));
    return MappingExpr(acc);
}

MappingExpr laplacian(const MappingExpr& e) { return d_z(d_zbar(e)).scaled(4.0); }

PowerTable::PowerTable(cd z, int max_a, int max_b)
    : zp_(static_cast<std::size_t>(max_a) + 1), zbp_(static_cast<std::size_t>(max_b) + 1) {
    const cd zb = std::conj(z);
    zp_[0] = 1.0;
    for (std::size_t k = 1; k < zp_.size(); ++k) zp_[k] = zp_[k - 1] * z;
    zbp_[0] = 1.0;
    for (std::size_t k = 1; k < zbp_.size(); ++k) zbp_[k] = zbp_[k - 1] * zb;
}

cd PowerTable::eval(const MappingExpr& e) const {
    cd acc = 0.0;
    for (const auto& [m, c] : e.terms()) {
        if (static_cast<std::size_t>(m.a) >= zp_.size() || static_cast<std::size_t>(m.b) >= zbp_.size())
            throw InputError("power table too small for expression");
        acc += c * zp_[m.a] * zbp_[m.b];
    }
    return acc;
}

// ---------------------------------------------------------------------------
// Parser

std::string_view to_string(ParseDiagnostic::Kind kind) {
    switch (kind) {
        case ParseDiagnostic::Kind::kLex: return "lex";
        case ParseDiagnostic::Kind::kSyntax: return "syntax";
        case ParseDiagnostic::Kind::kSemantic: return "semantic";
    }
    return "unknown";
}

ParseError::ParseError(ParseDiagnostic diag)
    : InputError(std::string(to_string(diag.kind)) + " error at offset " + std::to_string(diag.position) + ": " +
                 diag.message),
      diag_(std::move(diag)) {}

std::string ParseError::render(std::string_view source) const {
    std::ostringstream out;
    out << what() << "\n  " << source << "\n  " << std::string(std::min(diag_.position, source.size()), ' ') << "^";
    return out.str();
}

namespace {

enum class Tok { kNumber, kImag, kIdent, kPlus, kMinus, kStar, kSlash, kCaret, kLParen, kRParen, kBar, kEnd };

struct Token {
    Tok kind = Tok::kEnd;
    std::size_t pos = 0;
    std::string_view text;
    double value = 0.0;
};

[[noreturn]] void fail(ParseDiagnostic::Kind kind, std::size_t pos, std::string message) {
    throw ParseError(ParseDiagnostic{pos, std::move(message), kind});
}

std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    auto is_alnum = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        Token t;
        t.pos = i;
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            if (j < src.size() && src[j] == '.') {
                ++j;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
                    j = k;
                }
            }
            double v = 0.0;
            const auto res = std::from_chars(src.data() + i, src.data() + j, v);
            if (res.ec != std::errc() || res.ptr != src.data() + j || !std::isfinite(v))
                fail(ParseDiagnostic::Kind::kLex, i, "malformed or out-of-range number");
            t.kind = Tok::kNumber;
            t.value = v;
            if (j < src.size() && src[j] == 'i' && (j + 1 >= src.size() || !is_alnum(src[j + 1]))) {
                t.kind = Tok::kImag;
                ++j;
            }
            t.text = src.substr(i, j - i);
            i = j;
        } else if (std::isalpha(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < src.size() && is_alnum(src[j])) ++j;
            t.text = src.substr(i, j - i);
            if (t.text != "z" && t.text != "i" && t.text != "conj" && t.text != "abs2")
                fail(ParseDiagnostic::Kind::kLex, i, "unknown identifier '" + std::string(t.text) + "'");
            t.kind = Tok::kIdent;
            i = j;
        } else {
            switch (c) {
                case '+': t.kind = Tok::kPlus; break;
                case '-': t.kind = Tok::kMinus; break;
                case '*': t.kind = Tok::kStar; break;
                case '/': t.kind = Tok::kSlash; break;
                case '^': t.kind = Tok::kCaret; break;
                case '(': t.kind = Tok::kLParen; break;
                case ')': t.kind = Tok::kRParen; break;
                case '|': t.kind = Tok::kBar; break;
                default:
                    fail(ParseDiagnostic::Kind::kLex, i, std::string("unexpected character '") + c + "'");
            }
            t.text = src.substr(i, 1);
            ++i;
        }
        out.push_back(t);
    }
    Token end;
    end.kind = Tok::kEnd;
    end.pos = src.size();
    out.push_back(end);
    return out;
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src), toks_(lex(src)) {}

    MappingExpr run() {
        MappingExpr e = expr();
        if (peek().kind != Tok::kEnd) fail(ParseDiagnostic::Kind::kSyntax, peek().pos, "unexpected token '" + std::string(peek().text) + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_++]; }

    bool accept(Tok k) {
        if (peek().kind != k) return false;
        ++pos_;
        return true;
    }

    void expect(Tok k, const char* what) {
        if (!accept(k)) {
            const Token& t = peek();
            const std::string got = t.kind == Tok::kEnd ? "end of input" : "'" + std::string(t.text) + "'";
            fail(ParseDiagnostic::Kind::kSyntax, t.pos, std::string("expected ") + what + ", got " + got);
        }
    }

    static void check_degree(const MappingExpr& e, std::size_t pos) {
        if (e.degree() > kMaxDegree)
            fail(ParseDiagnostic::Kind::kSemantic, pos, "polynomial degree exceeds " + std::to_string(kMaxDegree));
    }

    MappingExpr expr() {
        MappingExpr acc = term();
        while (true) {
            if (accept(Tok::kPlus)) {
                acc = acc + term();
            } else if (accept(Tok::kMinus)) {
                acc = acc - term();
            } else {
                return acc;
            }
        }
    }

    MappingExpr term() {
        MappingExpr acc = unary();
        while (true) {
            if (accept(Tok::kStar)) {
                const std::size_t at = peek().pos;
                acc = acc * unary();
                check_degree(acc, at);
            } else if (peek().kind == Tok::kSlash) {
                const std::size_t at = next().pos;
                MappingExpr divisor = unary();
                if (!divisor.is_constant())
                    fail(ParseDiagnostic::Kind::kSemantic, at, "division by a non-constant expression");
                const cd d = divisor.constant_term();
                if (d == cd(0.0)) fail(ParseDiagnostic::Kind::kSemantic, at, "division by zero");
                acc = acc.scaled(1.0 / d);
            } else {
                return acc;
            }
        }
    }

    MappingExpr unary() {
        if (accept(Tok::kMinus)) return -unary();
        if (accept(Tok::kPlus)) return unary();
        return power();
    }

    // Returns the exponent following '^'.
    int exponent() {
        const Token& sign_or_num = peek();
        if (sign_or_num.kind == Tok::kMinus)
            fail(ParseDiagnostic::Kind::kSemantic, sign_or_num.pos, "negative exponent");
        accept(Tok::kPlus);
        const Token& t = peek();
        if (t.kind != Tok::kNumber) {
            const std::string got = t.kind == Tok::kEnd ? "end of input" : "'" + std::string(t.text) + "'";
            fail(ParseDiagnostic::Kind::kSyntax, t.pos, "expected integer exponent, got " + got);
        }
        ++pos_;
        if (t.value != std::floor(t.value) || t.text.find_first_of(".eE") != std::string_view::npos)
            fail(ParseDiagnostic::Kind::kSemantic, t.pos, "exponent must be a nonnegative integer");
        if (t.value > kMaxDegree) fail(ParseDiagnostic::Kind::kSemantic, t.pos, "exponent too large");
        return static_cast<int>(t.value);
    }

    MappingExpr power() {
        if (peek().kind == Tok::kBar) {
            const std::size_t bar = next().pos;
            MappingExpr inner = expr();
            expect(Tok::kBar, "closing '|'");
            if (peek().kind != Tok::kCaret)
                fail(ParseDiagnostic::Kind::kSemantic, bar, "|.| must carry an even power (odd powers are not C^2 at zeros)");
            ++pos_;
            const std::size_t exp_pos = peek().pos;
            const int m = exponent();
            if (m % 2 != 0)
                fail(ParseDiagnostic::Kind::kSemantic, exp_pos, "odd power of |.| (not C^2 at zeros)");
            MappingExpr result = (inner * inner.conj()).pow(m / 2);
            check_degree(result, bar);
            return result;
        }
        const std::size_t at = peek().pos;
        MappingExpr base = atom();
        if (accept(Tok::kCaret)) {
            const int n = exponent();
            base = base.pow(n);
            check_degree(base, at);
        }
        return base;
    }

    MappingExpr atom() {
        const Token t = next();
        switch (t.kind) {
            case Tok::kNumber: return MappingExpr::constant(t.value);
            case Tok::kImag: return MappingExpr::constant(cd(0.0, t.value));
            case Tok::kLParen: {
                MappingExpr e = expr();
                expect(Tok::kRParen, "')'");
                return e;
            }
            case Tok::kIdent: {
                if (t.text == "z") return MappingExpr::identity();
                if (t.text == "i") return MappingExpr::constant(cd(0.0, 1.0));
                expect(Tok::kLParen, "'(' after function name");
                MappingExpr arg = expr();
                expect(Tok::kRParen, "')'");
                if (t.text == "conj") return arg.conj();
                MappingExpr result = arg * arg.conj();  // abs2
                check_degree(result, t.pos);
                return result;
            }
            case Tok::kEnd:
                fail(ParseDiagnostic::Kind::kSyntax, t.pos, "unexpected end of input");
            default:
                fail(ParseDiagnostic::Kind::kSyntax, t.pos, "unexpected token '" + std::string(t.text) + "'");
        }
    }

    std::string_view src_;
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

std::string format_double(double v) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string monomial_text(Monomial m) {
    std::string s;
    auto factor = [&](const char* base, int k) {
        if (k == 0) return;
        if (!s.empty()) s += "*";
        s += base;
        if (k > 1) s += "^" + std::to_string(k);
    };
    factor("z", m.a);
    factor("conj(z)", m.b);
    return s;
}

}  // namespace

MappingExpr parse(std::string_view source) { return Parser(source).run(); }

std::string print(const MappingExpr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [m, c] : e.terms()) {
        const std::string mono = monomial_text(m);
        std::string coeff;
        bool negative = false;
        if (c.imag() == 0.0) {
            negative = std::signbit(c.real());
            const double mag = std::abs(c.real());
            if (!(mag == 1.0 && !mono.empty())) coeff = format_double(mag);
        } else if (c.real() == 0.0) {
            negative = std::signbit(c.imag());
            coeff = format_double(std::abs(c.imag())) + "i";
        } else {
            coeff = "(" + format_double(c.real()) + (std::signbit(c.imag()) ? "-" : "+") +
                    format_double(std::abs(c.imag())) + "i)";
        }
        if (first) {
            if (negative) out += "-";
        } else {
            out += negative ? " - " : " + ";
        }
        first = false;
        out += coeff;
        if (!coeff.empty() && !mono.empty()) out += "*";
        out += mono;
    }
    return out;
}

}  // namespace quasidisk
