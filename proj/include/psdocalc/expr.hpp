#pragma once

#include "psdocalc/common.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace psdocalc {

class ParseError : public InvalidArgument {
public:
    ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& detail);

    std::size_t offset() const { return offset_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::vector<std::string> expected_;
};

/// Parsed symbol expression. Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | power
///   power   := primary ('^' unary)?
///   primary := number | 'xi' | 'x'digits | 'pi' | func '(' args ')' | '(' expr ')'
/// with func in {sin, cos, exp, log} (one argument) and {min, max} (two).
class SymbolExpr {
public:
    enum class Op { number, xi, feature, add, sub, mul, div, pow, neg, sin, cos, exp, log, min, max };

    struct Node {
        Op op;
        double value = 0.0;   // number
        int feature = 0;      // feature index
        int lhs = -1, rhs = -1;
    };

    static SymbolExpr parse(const std::string& text);

    double eval(double xi, std::span<const double> features) const;

    /// Number of nodes on the longest root-to-leaf path.
    int depth() const;
    /// Largest feature index referenced, or -1.
    int max_feature() const;
    bool uses_xi() const;
    bool uses_features() const { return max_feature() >= 0; }

    /// Fully parenthesized canonical form; parses back to an equal tree.
    std::string to_string() const;
    const std::string& source() const { return source_; }
    const std::vector<Node>& nodes() const { return nodes_; }
    int root() const { return root_; }

private:
    friend class ExprParser;
    double eval_node(int i, double xi, std::span<const double> features) const;
    int depth_of(int i) const;
    std::string render(int i) const;

    std::vector<Node> nodes_;
    int root_ = -1;
    std::string source_;
};

}  // namespace psdocalc
