#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>

namespace aaklab {

using cplx = std::complex<double>;

/// Syntax error raised by the density parser; `pos` is a 0-based offset
/// into the source string.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, std::size_t pos_)
        : std::runtime_error(what), pos(pos_) {}
    std::size_t pos;
};

/// An immutable expression tree over {complex literals, i, t, + - * /,
/// integer powers, exp, log, sin, cos, sqrt}. log and sqrt use principal
/// branches. Trees are shared_ptr-backed and safe to evaluate from
/// multiple threads.
class DensityExpr {
  public:
    struct Node;

    DensityExpr() = default;

    /// Parse the external grammar:
    ///   expr   := term (("+"|"-") term)*
    ///   term   := factor (("*"|"/") factor)*
    ///   factor := unary ("^" int)?
    ///   unary  := "-" unary | atom
    ///   atom   := number | "i" | "t" | ident "(" expr ")" | "(" expr ")"
    ///   ident  := "exp"|"log"|"sin"|"cos"|"sqrt"
    static DensityExpr parse(const std::string& src);

    cplx eval(cplx t) const;

    /// Prints a form that re-parses to an identically-evaluating tree.
    std::string str() const;

    bool valid() const { return root_ != nullptr; }

  private:
    explicit DensityExpr(std::shared_ptr<const Node> root) : root_(std::move(root)) {}
    std::shared_ptr<const Node> root_;
};

/// Parse a density source string (syntax check only; evaluation probes
/// happen when the density is attached to an interval).
DensityExpr parse_density(const std::string& src);

}  // namespace aaklab
