#include "aaklab/density.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

namespace aaklab {

namespace {

enum class Kind { Number, Imag, Var, Add, Sub, Mul, Div, Pow, Neg, Call };

enum class Func { Exp, Log, Sin, Cos, Sqrt };

const char* func_name(Func f) {
    switch (f) {
        case Func::Exp: return "exp";
        case Func::Log: return "log";
        case Func::Sin: return "sin";
        case Func::Cos: return "cos";
        case Func::Sqrt: return "sqrt";
    }
    return "?";
}

}  // namespace

struct DensityExpr::Node {
    Kind kind;
    double number = 0.0;  // Kind::Number
    long ipow = 0;        // Kind::Pow exponent
    Func func = Func::Exp;
    std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const DensityExpr::Node>;
using Node = DensityExpr::Node;

NodePtr make(Kind k, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
    auto n = std::make_shared<Node>();
    n->kind = k;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

class Parser {
  public:
    explicit Parser(const std::string& src) : src_(src) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("trailing input");
        return e;
    }

  private:
    const std::string& src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const {
        std::ostringstream os;
        os << "density parse error at position " << pos_ << ": " << msg;
        throw ParseError(os.str(), pos_);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    bool accept(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr() {
        NodePtr e = term();
        for (;;) {
            if (accept('+')) {
                e = make(Kind::Add, e, term());
            } else if (accept('-')) {
                e = make(Kind::Sub, e, term());
            } else {
                return e;
            }
        }
    }

    NodePtr term() {
        NodePtr e = factor();
        for (;;) {
            if (accept('*')) {
                e = make(Kind::Mul, e, factor());
            } else if (accept('/')) {
                e = make(Kind::Div, e, factor());
            } else {
                return e;
            }
        }
    }

    NodePtr factor() {
        NodePtr base = unary();
        if (accept('^')) {
            auto n = std::make_shared<Node>();
            n->kind = Kind::Pow;
            n->lhs = base;
            n->ipow = integer();
            return n;
        }
        return base;
    }

    NodePtr unary() {
        if (accept('-')) return make(Kind::Neg, unary());
        return atom();
    }

    long integer() {
        skip_ws();
        bool neg = false;
        if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) {
            neg = src_[pos_] == '-';
            ++pos_;
        }
        if (pos_ >= src_.size() || !std::isdigit(static_cast<unsigned char>(src_[pos_])))
            fail("expected integer exponent");
        long v = 0;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
            v = v * 10 + (src_[pos_] - '0');
            if (v > 1'000'000) fail("exponent too large");
            ++pos_;
        }
        return neg ? -v : v;
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("unexpected end of input");
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c))) return ident();
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ == start || (pos_ == start + 1 && src_[start] == '.')) fail("malformed number");
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // 'e' belonged to something else; not part of the number
            }
        }
        auto n = std::make_shared<Node>();
        n->kind = Kind::Number;
        n->number = std::stod(src_.substr(start, pos_ - start));
        return n;
    }

    NodePtr ident() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        std::string name = src_.substr(start, pos_ - start);
        if (name == "i") return make(Kind::Imag);
        if (name == "t") return make(Kind::Var);
        Func f;
        if (name == "exp") f = Func::Exp;
        else if (name == "log") f = Func::Log;
        else if (name == "sin") f = Func::Sin;
        else if (name == "cos") f = Func::Cos;
        else if (name == "sqrt") f = Func::Sqrt;
        else {
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        NodePtr arg = expr();
        if (!accept(')')) fail("expected ')'");
        auto n = std::make_shared<Node>();
        n->kind = Kind::Call;
        n->func = f;
        n->lhs = arg;
        return n;
    }
};

cplx eval_node(const Node& n, cplx t) {
    switch (n.kind) {
        case Kind::Number: return cplx(n.number, 0.0);
        case Kind::Imag: return cplx(0.0, 1.0);
        case Kind::Var: return t;
        case Kind::Add: return eval_node(*n.lhs, t) + eval_node(*n.rhs, t);
        case Kind::Sub: return eval_node(*n.lhs, t) - eval_node(*n.rhs, t);
        case Kind::Mul: return eval_node(*n.lhs, t) * eval_node(*n.rhs, t);
        case Kind::Div: return eval_node(*n.lhs, t) / eval_node(*n.rhs, t);
        case Kind::Neg: return -eval_node(*n.lhs, t);
        case Kind::Pow: {
            cplx base = eval_node(*n.lhs, t);
            long e = n.ipow;
            if (e == 0) return cplx(1.0, 0.0);
            bool inv = e < 0;
            unsigned long k = inv ? static_cast<unsigned long>(-e) : static_cast<unsigned long>(e);
            cplx acc(1.0, 0.0), b = base;
            while (k) {
                if (k & 1) acc *= b;
                b *= b;
                k >>= 1;
            }
            return inv ? cplx(1.0, 0.0) / acc : acc;
        }
        case Kind::Call: {
            cplx a = eval_node(*n.lhs, t);
            switch (n.func) {
                case Func::Exp: return std::exp(a);
                case Func::Log: return std::log(a);
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Sqrt: return std::sqrt(a);
            }
        }
    }
    return cplx(0.0, 0.0);
}

int precedence(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;  // atoms
    }
}

void print_node(const Node& n, std::ostream& os) {
    auto child = [&os](const Node& c, int min_prec) {
        if (precedence(c.kind) < min_prec) {
            os << '(';
            print_node(c, os);
            os << ')';
        } else {
            print_node(c, os);
        }
    };
    switch (n.kind) {
        case Kind::Number: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.number;
            os << tmp.str();
            break;
        }
        case Kind::Imag: os << 'i'; break;
        case Kind::Var: os << 't'; break;
        case Kind::Add:
            child(*n.lhs, 1);
            os << '+';
            child(*n.rhs, 2);
            break;
        case Kind::Sub:
            child(*n.lhs, 1);
            os << '-';
            child(*n.rhs, 2);
            break;
        case Kind::Mul:
            child(*n.lhs, 2);
            os << '*';
            child(*n.rhs, 3);
            break;
        case Kind::Div:
            child(*n.lhs, 2);
            os << '/';
            child(*n.rhs, 3);
            break;
        case Kind::Neg:
            os << '-';
            child(*n.lhs, 3);
            break;
        case Kind::Pow:
            child(*n.lhs, 5);
            os << '^' << n.ipow;
            break;
        case Kind::Call:
            os << func_name(n.func) << '(';
            print_node(*n.lhs, os);
            os << ')';
            break;
    }
}

}  // namespace

DensityExpr DensityExpr::parse(const std::string& src) {
    Parser p(src);
    return DensityExpr(p.run());
}

cplx DensityExpr::eval(cplx t) const {
    if (!root_) throw std::logic_error("evaluating empty DensityExpr");
    return eval_node(*root_, t);
}

std::string DensityExpr::str() const {
    if (!root_) return "";
    std::ostringstream os;
    print_node(*root_, os);
    return os.str();
}

DensityExpr parse_density(const std::string& src) { return DensityExpr::parse(src); }

}  // namespace aaklab
