#include "psdocalc/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace psdocalc {

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i)
            out += i + 1 == v.size() ? " or " : ", ";
        out += v[i];
    }
    return out;
}

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, end };

struct Token {
    Tok kind;
    std::size_t offset;
    std::string text;
    double value = 0.0;
};

std::string describe(const Token& t) {
    switch (t.kind) {
    case Tok::end: return "end of input";
    case Tok::number:
    case Tok::ident: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
    }
}

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
            while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.'))
                ++i;
            if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
                std::size_t j = i + 1;
                if (j < s.size() && (s[j] == '+' || s[j] == '-'))
                    ++j;
                if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
                    i = j;
                    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
                        ++i;
                }
            }
            Token t{Tok::number, start, s.substr(start, i - start)};
            std::size_t used = 0;
            try {
                t.value = std::stod(t.text, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != t.text.size())
                throw ParseError(start, {"number"}, "malformed number '" + t.text + "'");
            out.push_back(std::move(t));
            continue;
        }
        if (std::isalpha(c) || c == '_') {
            while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
                ++i;
            out.push_back({Tok::ident, start, s.substr(start, i - start)});
            continue;
        }
        Tok k;
        switch (c) {
        case '+': k = Tok::plus; break;
        case '-': k = Tok::minus; break;
        case '*': k = Tok::star; break;
        case '/': k = Tok::slash; break;
        case '^': k = Tok::caret; break;
        case '(': k = Tok::lparen; break;
        case ')': k = Tok::rparen; break;
        case ',': k = Tok::comma; break;
        default: throw ParseError(start, {"expression"}, std::string("unexpected character '") + s[i] + "'");
        }
        out.push_back({k, start, std::string(1, s[i])});
        ++i;
    }
    out.push_back({Tok::end, s.size(), ""});
    return out;
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& detail)
    : InvalidArgument("parse error at offset " + std::to_string(offset) + ": " + detail +
                      (expected.empty() ? std::string() : " (expected " + join(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

class ExprParser {
public:
    ExprParser(const std::string& text, SymbolExpr& out) : toks_(tokenize(text)), out_(out) {}

    int parse() {
        const int root = expr();
        if (peek().kind != Tok::end)
            throw ParseError(peek().offset, {"operator", "end of input"}, "unexpected " + describe(peek()));
        return root;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& take() { return toks_[pos_++]; }

    int add(SymbolExpr::Op op, int lhs = -1, int rhs = -1) {
        out_.nodes_.push_back({op, 0.0, 0, lhs, rhs});
        return int(out_.nodes_.size()) - 1;
    }

    int expr() {
        int lhs = term();
        while (peek().kind == Tok::plus || peek().kind == Tok::minus) {
            const auto op = take().kind == Tok::plus ? SymbolExpr::Op::add : SymbolExpr::Op::sub;
            lhs = add(op, lhs, term());
        }
        return lhs;
    }

    int term() {
        int lhs = unary();
        while (peek().kind == Tok::star || peek().kind == Tok::slash) {
            const auto op = take().kind == Tok::star ? SymbolExpr::Op::mul : SymbolExpr::Op::div;
            lhs = add(op, lhs, unary());
        }
        return lhs;
    }

    int unary() {
        if (peek().kind == Tok::minus) {
            take();
            return add(SymbolExpr::Op::neg, unary());
        }
        return power();
    }

    int power() {
        const int base = primary();
        if (peek().kind == Tok::caret) {
            take();
            return add(SymbolExpr::Op::pow, base, unary());
        }
        return base;
    }

    void expect(Tok kind, const std::string& what) {
        if (peek().kind != kind)
            throw ParseError(peek().offset, {what}, "unexpected " + describe(peek()));
        take();
    }

    int primary() {
        const Token& t = peek();
        switch (t.kind) {
        case Tok::number: {
            take();
            const int n = add(SymbolExpr::Op::number);
            out_.nodes_[std::size_t(n)].value = t.value;
            return n;
        }
        case Tok::lparen: {
            take();
            const int inner = expr();
            expect(Tok::rparen, "')'");
            return inner;
        }
        case Tok::ident: return identifier();
        default: throw ParseError(t.offset, {"expression"}, "unexpected " + describe(t));
        }
    }

    int identifier() {
        const Token t = take();
        const std::string& id = t.text;
        if (id == "xi")
            return add(SymbolExpr::Op::xi);
        if (id == "pi") {
            const int n = add(SymbolExpr::Op::number);
            out_.nodes_[std::size_t(n)].value = std::numbers::pi;
            return n;
        }
        if (id.size() > 1 && id[0] == 'x' &&
            std::all_of(id.begin() + 1, id.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            const int n = add(SymbolExpr::Op::feature);
            out_.nodes_[std::size_t(n)].feature = std::stoi(id.substr(1));
            return n;
        }
        struct Fn {
            const char* name;
            SymbolExpr::Op op;
            int arity;
        };
        static constexpr Fn fns[] = {{"sin", SymbolExpr::Op::sin, 1}, {"cos", SymbolExpr::Op::cos, 1},
                                     {"exp", SymbolExpr::Op::exp, 1}, {"log", SymbolExpr::Op::log, 1},
                                     {"min", SymbolExpr::Op::min, 2}, {"max", SymbolExpr::Op::max, 2}};
        for (const auto& fn : fns) {
            if (id != fn.name)
                continue;
            expect(Tok::lparen, "'('");
            std::vector<int> args{expr()};
            while (peek().kind == Tok::comma) {
                take();
                args.push_back(expr());
            }
            if (peek().kind != Tok::rparen)
                throw ParseError(peek().offset, {"','", "')'"}, "unexpected " + describe(peek()));
            take();
            if (int(args.size()) != fn.arity)
                throw ParseError(t.offset, {}, "arity mismatch: " + id + " takes " + std::to_string(fn.arity) +
                                                   " argument(s), got " + std::to_string(args.size()));
            return add(fn.op, args[0], fn.arity == 2 ? args[1] : -1);
        }
        throw ParseError(t.offset, {"xi", "x<digits>", "pi", "function"}, "unknown identifier '" + id + "'");
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
    SymbolExpr& out_;
};

SymbolExpr SymbolExpr::parse(const std::string& text) {
    SymbolExpr e;
    e.source_ = text;
    if (std::all_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }))
        throw ParseError(0, {"expression"}, "empty expression");
    ExprParser p(text, e);
    e.root_ = p.parse();
    return e;
}

double SymbolExpr::eval(double xi, std::span<const double> features) const {
    return eval_node(root_, xi, features);
}

double SymbolExpr::eval_node(int i, double xi, std::span<const double> f) const {
    const Node& n = nodes_[std::size_t(i)];
    auto L = [&] { return eval_node(n.lhs, xi, f); };
    auto R = [&] { return eval_node(n.rhs, xi, f); };
    switch (n.op) {
    case Op::number: return n.value;
    case Op::xi: return xi;
    case Op::feature:
        if (std::size_t(n.feature) >= f.size())
            throw InvalidArgument("feature x" + std::to_string(n.feature) + " is not available on this space");
        return f[std::size_t(n.feature)];
    case Op::add: return L() + R();
    case Op::sub: return L() - R();
    case Op::mul: return L() * R();
    case Op::div: return L() / R();
    case Op::pow: return std::pow(L(), R());
    case Op::neg: return -L();
    case Op::sin: return std::sin(L());
    case Op::cos: return std::cos(L());
    case Op::exp: return std::exp(L());
    case Op::log: return std::log(L());
    case Op::min: return std::min(L(), R());
    case Op::max: return std::max(L(), R());
    }
    return 0.0;
}

int SymbolExpr::depth_of(int i) const {
    if (i < 0)
        return 0;
    const Node& n = nodes_[std::size_t(i)];
    return 1 + std::max(depth_of(n.lhs), depth_of(n.rhs));
}

int SymbolExpr::depth() const { return depth_of(root_); }

int SymbolExpr::max_feature() const {
    int m = -1;
    for (const auto& n : nodes_)
        if (n.op == Op::feature)
            m = std::max(m, n.feature);
    return m;
}

bool SymbolExpr::uses_xi() const {
    return std::any_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::xi; });
}

std::string SymbolExpr::render(int i) const {
    const Node& n = nodes_[std::size_t(i)];
    auto bin = [&](const char* op) { return "(" + render(n.lhs) + " " + op + " " + render(n.rhs) + ")"; };
    auto call = [&](const char* f) {
        return std::string(f) + "(" + render(n.lhs) + (n.rhs >= 0 ? ", " + render(n.rhs) : std::string()) + ")";
    };
    switch (n.op) {
    case Op::number: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", n.value);
        return buf;
    }
    case Op::xi: return "xi";
    case Op::feature: return "x" + std::to_string(n.feature);
    case Op::add: return bin("+");
    case Op::sub: return bin("-");
    case Op::mul: return bin("*");
    case Op::div: return bin("/");
    case Op::pow: return bin("^");
    case Op::neg: return "(-" + render(n.lhs) + ")";
    case Op::sin: return call("sin");
    case Op::cos: return call("cos");
    case Op::exp: return call("exp");
    case Op::log: return call("log");
    case Op::min: return call("min");
    case Op::max: return call("max");
    }
    return "?";
}

std::string SymbolExpr::to_string() const { return render(root_); }

}  // namespace psdocalc
