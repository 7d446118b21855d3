#include "crosswidth/exprs.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "crosswidth/errors.hpp"

namespace cw::exprs {

namespace {

[[noreturn]] void domain(const std::string& what) { fail(ErrorKind::Domain, "DomainError", what); }

// Truncated power series with scalar coefficients.
template <class S>
struct Jet {
  std::vector<S> c;
  explicit Jet(int order = 0) : c(static_cast<std::size_t>(order) + 1, S(0)) {}
  int n() const { return static_cast<int>(c.size()); }
};

template <class S>
Jet<S> operator+(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r(a.n() - 1);
  for (int k = 0; k < a.n(); ++k) r.c[k] = a.c[k] + b.c[k];
  return r;
}

template <class S>
Jet<S> operator-(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r(a.n() - 1);
  for (int k = 0; k < a.n(); ++k) r.c[k] = a.c[k] - b.c[k];
  return r;
}

template <class S>
Jet<S> operator-(const Jet<S>& a) {
  Jet<S> r(a.n() - 1);
  for (int k = 0; k < a.n(); ++k) r.c[k] = -a.c[k];
  return r;
}

template <class S>
Jet<S> operator*(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> r(a.n() - 1);
  for (int k = 0; k < a.n(); ++k) {
    S s = a.c[0] * b.c[k];
    for (int j = 1; j <= k; ++j) s += a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}

// Scalar guards shared by the scalar and jet paths, so that c0 of every jet
// is produced by exactly the same arithmetic as the pointwise evaluation.
inline double checked_div(double a, double b) {
  if (b == 0.0) domain("division by zero");
  return a / b;
}
inline cplx checked_div(cplx a, cplx b) {
  if (b == cplx(0.0)) domain("division by zero");
  return a / b;
}
inline double checked_sqrt(double a) {
  if (a < 0.0) domain("sqrt of a negative real");
  return std::sqrt(a);
}
inline cplx checked_sqrt(cplx a) {
  if (a.imag() == 0.0 && a.real() < 0.0) domain("sqrt on its branch cut");
  return std::sqrt(a);
}
inline double checked_log(double a) {
  if (a <= 0.0) domain("log of a non-positive real");
  return std::log(a);
}
inline cplx checked_log(cplx a) {
  if (a.imag() == 0.0 && a.real() <= 0.0) domain("log on its branch cut or at 0");
  return std::log(a);
}

template <class S>
Jet<S> operator/(const Jet<S>& a, const Jet<S>& b) {
  Jet<S> q(a.n() - 1);
  q.c[0] = checked_div(a.c[0], b.c[0]);
  for (int k = 1; k < a.n(); ++k) {
    S s = a.c[k];
    for (int j = 1; j <= k; ++j) s -= b.c[j] * q.c[k - j];
    q.c[k] = s / b.c[0];
  }
  return q;
}

template <class S>
S inv_k(int k) {
  return S(1.0 / static_cast<double>(k));
}

template <class S>
Jet<S> jexp(const Jet<S>& a) {
  Jet<S> e(a.n() - 1);
  e.c[0] = std::exp(a.c[0]);
  for (int k = 1; k < a.n(); ++k) {
    S s(0);
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * e.c[k - j];
    e.c[k] = s * inv_k<S>(k);
  }
  return e;
}

template <class S>
Jet<S> jlog(const Jet<S>& a) {
  Jet<S> l(a.n() - 1);
  l.c[0] = checked_log(a.c[0]);
  for (int k = 1; k < a.n(); ++k) {
    S s(0);
    for (int j = 1; j < k; ++j) s += static_cast<double>(j) * l.c[j] * a.c[k - j];
    l.c[k] = (a.c[k] - s * inv_k<S>(k)) / a.c[0];
  }
  return l;
}

template <class S>
Jet<S> jsqrt(const Jet<S>& a) {
  Jet<S> r(a.n() - 1);
  r.c[0] = checked_sqrt(a.c[0]);
  if (a.n() > 1 && r.c[0] == S(0)) domain("sqrt is not differentiable at 0");
  for (int k = 1; k < a.n(); ++k) {
    S s = a.c[k];
    for (int j = 1; j < k; ++j) s -= r.c[j] * r.c[k - j];
    r.c[k] = s / (2.0 * r.c[0]);
  }
  return r;
}

// Coupled recurrences for (sin, cos) and (sinh, cosh); `hyper` flips the sign.
template <class S>
void jsincos(const Jet<S>& a, Jet<S>& s, Jet<S>& c, bool hyper) {
  s = Jet<S>(a.n() - 1);
  c = Jet<S>(a.n() - 1);
  if (hyper) {
    s.c[0] = std::sinh(a.c[0]);
    c.c[0] = std::cosh(a.c[0]);
  } else {
    s.c[0] = std::sin(a.c[0]);
    c.c[0] = std::cos(a.c[0]);
  }
  for (int k = 1; k < a.n(); ++k) {
    S ss(0), cc(0);
    for (int j = 1; j <= k; ++j) {
      ss += static_cast<double>(j) * a.c[j] * c.c[k - j];
      cc += static_cast<double>(j) * a.c[j] * s.c[k - j];
    }
    s.c[k] = ss * inv_k<S>(k);
    c.c[k] = (hyper ? cc : -cc) * inv_k<S>(k);
  }
}

// tanh via t' = (1 - t^2) a', which stays finite where cosh overflows.
template <class S>
Jet<S> jtanh(const Jet<S>& a) {
  Jet<S> t(a.n() - 1);
  Jet<S> u(a.n() - 1);  // u = 1 - t^2
  t.c[0] = std::tanh(a.c[0]);
  u.c[0] = S(1) - t.c[0] * t.c[0];
  for (int k = 1; k < a.n(); ++k) {
    S s(0);
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a.c[j] * u.c[k - j];
    t.c[k] = s * inv_k<S>(k);
    S tt(0);
    for (int i = 0; i <= k; ++i) tt += t.c[i] * t.c[k - i];
    u.c[k] = -tt;
  }
  return t;
}

template <class T>
T ipow(T base, int n, const T& one) {
  T result = one;
  unsigned e = static_cast<unsigned>(n);
  while (e) {
    if (e & 1u) result = result * base;
    e >>= 1u;
    if (e) base = base * base;
  }
  return result;
}

// Pointwise function application, scalar types.
template <class S>
S apply_fn(Fn f, S a) {
  switch (f) {
    case Fn::Exp: return std::exp(a);
    case Fn::Log: return checked_log(a);
    case Fn::Sin: return std::sin(a);
    case Fn::Cos: return std::cos(a);
    case Fn::Sinh: return std::sinh(a);
    case Fn::Cosh: return std::cosh(a);
    case Fn::Tanh: return std::tanh(a);
    case Fn::Sqrt: return checked_sqrt(a);
  }
  return a;
}

template <class S>
Jet<S> apply_fn(Fn f, const Jet<S>& a) {
  Jet<S> s, c;
  switch (f) {
    case Fn::Exp: return jexp(a);
    case Fn::Log: return jlog(a);
    case Fn::Sin: jsincos(a, s, c, false); return s;
    case Fn::Cos: jsincos(a, s, c, false); return c;
    case Fn::Sinh: jsincos(a, s, c, true); return s;
    case Fn::Cosh: jsincos(a, s, c, true); return c;
    case Fn::Tanh: return jtanh(a);
    case Fn::Sqrt: return jsqrt(a);
  }
  return a;
}

template <class S>
S scalar_div(S a, S b) {
  return checked_div(a, b);
}

template <class S>
Jet<S> scalar_div(const Jet<S>& a, const Jet<S>& b) {
  return a / b;
}

// Evaluation over a "number system" T: either a scalar or a Jet.
template <class T>
struct Evaluator {
  const std::vector<Node>& nodes;
  T x;
  T one;

  T constant(double v) const {
    T r = one;
    if constexpr (std::is_arithmetic_v<T> || std::is_same_v<T, cplx>) {
      r = T(v);
    } else {
      for (auto& ci : r.c) ci = 0.0;
      r.c[0] = v;
    }
    return r;
  }

  T run(int i) {
    const Node& n = nodes[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Num: return constant(n.value);
      case Op::Pi: return constant(std::numbers::pi);
      case Op::Var: return x;
      case Op::Add: return run(n.lhs) + run(n.rhs);
      case Op::Sub: return run(n.lhs) - run(n.rhs);
      case Op::Mul: return run(n.lhs) * run(n.rhs);
      case Op::Div: {
        T a = run(n.lhs);
        T b = run(n.rhs);
        return scalar_div(a, b);
      }
      case Op::Neg: return -run(n.lhs);
      case Op::Pow: {
        T b = run(n.lhs);
        if (n.exponent >= 0) return ipow(b, n.exponent, one);
        return scalar_div(one, ipow(b, -n.exponent, one));
      }
      case Op::Call: return apply_fn(n.fn, run(n.lhs));
    }
    return x;
  }
};

const char* fn_name(Fn f) {
  switch (f) {
    case Fn::Exp: return "exp";
    case Fn::Log: return "log";
    case Fn::Sin: return "sin";
    case Fn::Cos: return "cos";
    case Fn::Sinh: return "sinh";
    case Fn::Cosh: return "cosh";
    case Fn::Tanh: return "tanh";
    case Fn::Sqrt: return "sqrt";
  }
  return "?";
}

bool lookup_fn(std::string_view name, Fn& out) {
  static constexpr std::pair<std::string_view, Fn> table[] = {
      {"exp", Fn::Exp},   {"log", Fn::Log},   {"sin", Fn::Sin},   {"cos", Fn::Cos},
      {"sinh", Fn::Sinh}, {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}, {"sqrt", Fn::Sqrt},
  };
  for (const auto& [n, f] : table) {
    if (n == name) {
      out = f;
      return true;
    }
  }
  return false;
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

class Parser {
 public:
  explicit Parser(std::string_view s) : src_(s) {}

  Expr run() {
    Expr e;
    e.nodes_.clear();
    out_ = &e.nodes_;
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "expected an expression");
    e.root_ = parse_sum();
    skip_ws();
    if (pos_ < src_.size()) throw SyntaxError(pos_, "expected operator or end of input");
    return e;
  }

 private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::vector<Node>* out_ = nullptr;

  int add(Node n) {
    out_->push_back(n);
    return static_cast<int>(out_->size()) - 1;
  }

  void skip_ws() {
    while (pos_ < src_.size() && (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\n' ||
                                  src_[pos_] == '\r'))
      ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < src_.size() && src_[pos_] == c;
  }

  int parse_sum() {
    int lhs = parse_product();
    for (;;) {
      if (peek('+') || peek('-')) {
        Op op = src_[pos_] == '+' ? Op::Add : Op::Sub;
        ++pos_;
        int rhs = parse_product();
        Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        lhs = add(n);
      } else {
        return lhs;
      }
    }
  }

  int parse_product() {
    int lhs = parse_unary();
    for (;;) {
      if (peek('*') || peek('/')) {
        Op op = src_[pos_] == '*' ? Op::Mul : Op::Div;
        ++pos_;
        int rhs = parse_unary();
        Node n;
        n.op = op;
        n.lhs = lhs;
        n.rhs = rhs;
        lhs = add(n);
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (peek('-')) {
      ++pos_;
      int operand = parse_unary();
      Node n;
      n.op = Op::Neg;
      n.lhs = operand;
      return add(n);
    }
    return parse_power();
  }

  int parse_power() {
    int base = parse_primary();
    if (!peek('^')) return base;
    ++pos_;
    skip_ws();
    std::size_t at = pos_;
    std::size_t mark = out_->size();
    int ex = parse_unary();
    long long value = 0;
    if (!fold_integer(ex, value, at)) throw SyntaxError(at, "integer exponent");
    if (value > 1024 || value < -1024) throw SyntaxError(at, "exponent magnitude at most 1024");
    out_->resize(mark);
    Node n;
    n.op = Op::Pow;
    n.lhs = base;
    n.exponent = static_cast<int>(value);
    return add(n);
  }

  // Exponents must reduce to integers built from literals, signs and nested ^.
  bool fold_integer(int i, long long& v, std::size_t at) {
    const Node& n = (*out_)[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Num:
        if (n.value != std::floor(n.value)) throw SyntaxError(at, "non-integer exponent literal");
        v = static_cast<long long>(n.value);
        return true;
      case Op::Neg:
        if (!fold_integer(n.lhs, v, at)) return false;
        v = -v;
        return true;
      case Op::Pow: {
        long long b = 0;
        if (!fold_integer(n.lhs, b, at) || n.exponent < 0) return false;
        long long r = 1;
        for (int k = 0; k < n.exponent; ++k) {
          r *= b;
          if (r > 1024 || r < -1024) throw SyntaxError(at, "exponent magnitude at most 1024");
        }
        v = r;
        return true;
      }
      default:
        return false;
    }
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw SyntaxError(pos_, "expected number, identifier or '('");
    char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      int inner = parse_sum();
      if (!peek(')')) throw SyntaxError(pos_, "expected ')'");
      ++pos_;
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
        ++pos_;
      std::string_view name = src_.substr(start, pos_ - start);
      Node n;
      if (name == "x") {
        n.op = Op::Var;
        return add(n);
      }
      if (name == "pi") {
        n.op = Op::Pi;
        return add(n);
      }
      Fn f;
      if (!lookup_fn(name, f)) throw SyntaxError(start, "unknown identifier '" + std::string(name) + "'");
      if (!peek('(')) throw SyntaxError(pos_, "expected '(' after function name");
      ++pos_;
      int arg = parse_sum();
      if (!peek(')')) throw SyntaxError(pos_, "expected ')'");
      ++pos_;
      n.op = Op::Call;
      n.fn = f;
      n.lhs = arg;
      return add(n);
    }
    throw SyntaxError(pos_, "expected number, identifier or '('");
  }

  int parse_number() {
    std::size_t start = pos_;
    auto digits = [&] {
      std::size_t d = 0;
      while (pos_ < src_.size() && src_[pos_] >= '0' && src_[pos_] <= '9') {
        ++pos_;
        ++d;
      }
      return d;
    };
    std::size_t nd = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      nd += digits();
    }
    if (nd == 0) throw SyntaxError(start, "expected digits");
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_;
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_) throw SyntaxError(start, "malformed number");
    Node n;
    n.op = Op::Num;
    n.value = v;
    return add(n);
  }
};

double TaylorJet::derivative(int k) const {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return c.at(static_cast<std::size_t>(k)) * f;
}

Expr::Expr() {
  nodes_.push_back(Node{});
  root_ = 0;
}

Expr Expr::parse(std::string_view source) { return Parser(source).run(); }

Expr Expr::constant(double v) {
  Expr e;
  e.nodes_[0].value = v;
  if (v < 0) {
    e.nodes_[0].value = -v;
    Node n;
    n.op = Op::Neg;
    n.lhs = 0;
    e.nodes_.push_back(n);
    e.root_ = 1;
  }
  return e;
}

namespace {

std::string unparse_node(const std::vector<Node>& nodes, int i) {
  const Node& n = nodes[static_cast<std::size_t>(i)];
  switch (n.op) {
    case Op::Num: return format_number(n.value);
    case Op::Pi: return "pi";
    case Op::Var: return "x";
    case Op::Add: return "(" + unparse_node(nodes, n.lhs) + " + " + unparse_node(nodes, n.rhs) + ")";
    case Op::Sub: return "(" + unparse_node(nodes, n.lhs) + " - " + unparse_node(nodes, n.rhs) + ")";
    case Op::Mul: return "(" + unparse_node(nodes, n.lhs) + " * " + unparse_node(nodes, n.rhs) + ")";
    case Op::Div: return "(" + unparse_node(nodes, n.lhs) + " / " + unparse_node(nodes, n.rhs) + ")";
    case Op::Neg: return "(-" + unparse_node(nodes, n.lhs) + ")";
    case Op::Pow: {
      std::string ex = n.exponent < 0 ? "(-" + std::to_string(-n.exponent) + ")" : std::to_string(n.exponent);
      return "(" + unparse_node(nodes, n.lhs) + "^" + ex + ")";
    }
    case Op::Call: return std::string(fn_name(n.fn)) + "(" + unparse_node(nodes, n.lhs) + ")";
  }
  return "";
}

bool equal_nodes(const std::vector<Node>& a, int i, const std::vector<Node>& b, int j) {
  const Node& x = a[static_cast<std::size_t>(i)];
  const Node& y = b[static_cast<std::size_t>(j)];
  if (x.op != y.op) return false;
  switch (x.op) {
    case Op::Num: return x.value == y.value;
    case Op::Pi:
    case Op::Var: return true;
    case Op::Neg: return equal_nodes(a, x.lhs, b, y.lhs);
    case Op::Call: return x.fn == y.fn && equal_nodes(a, x.lhs, b, y.lhs);
    case Op::Pow: return x.exponent == y.exponent && equal_nodes(a, x.lhs, b, y.lhs);
    default: return equal_nodes(a, x.lhs, b, y.lhs) && equal_nodes(a, x.rhs, b, y.rhs);
  }
}

}  // namespace

std::string Expr::unparse() const { return unparse_node(nodes_, root_); }

bool Expr::structurally_equal(const Expr& other) const {
  return equal_nodes(nodes_, root_, other.nodes_, other.root_);
}

bool Expr::is_zero_constant() const {
  const Node& n = nodes_[static_cast<std::size_t>(root_)];
  if (n.op == Op::Num) return n.value == 0.0;
  if (n.op == Op::Neg) {
    const Node& m = nodes_[static_cast<std::size_t>(n.lhs)];
    return m.op == Op::Num && m.value == 0.0;
  }
  return false;
}

double Expr::eval(double x) const {
  Evaluator<double> ev{nodes_, x, 1.0};
  return ev.run(root_);
}

cplx Expr::eval(cplx x) const {
  if (x.imag() == 0.0) return cplx(eval(x.real()), 0.0);
  Evaluator<cplx> ev{nodes_, x, cplx(1.0)};
  return ev.run(root_);
}

TaylorJet Expr::jet(double x0, int order, int k_max) const {
  if (order < 0 || order > k_max)
    fail(ErrorKind::Precondition, "JetOrder", "jet order must lie in [0, " + std::to_string(k_max) + "]");
  Jet<double> var(order), one(order);
  var.c[0] = x0;
  if (order >= 1) var.c[1] = 1.0;
  one.c[0] = 1.0;
  Evaluator<Jet<double>> ev{nodes_, var, one};
  Jet<double> r = ev.run(root_);
  return TaylorJet{x0, std::move(r.c)};
}

std::vector<cplx> Expr::jet(cplx x0, int order) const {
  Jet<cplx> var(order), one(order);
  var.c[0] = x0;
  if (order >= 1) var.c[1] = 1.0;
  one.c[0] = 1.0;
  Evaluator<Jet<cplx>> ev{nodes_, var, one};
  return ev.run(root_).c;
}

Expr parse(std::string_view source) { return Expr::parse(source); }
std::string unparse(const Expr& e) { return e.unparse(); }
cplx eval(const Expr& e, cplx x) { return e.eval(x); }
TaylorJet taylor_jet(const Expr& e, double x0, int order, int k_max) { return e.jet(x0, order, k_max); }

}  // namespace cw::exprs
