#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cw::exprs {

using cplx = std::complex<double>;

inline constexpr int kDefaultKMax = 12;

enum class Op : std::uint8_t { Num, Pi, Var, Add, Sub, Mul, Div, Pow, Neg, Call };
enum class Fn : std::uint8_t { Exp, Log, Sin, Cos, Sinh, Cosh, Tanh, Sqrt };

struct Node {
  Op op = Op::Num;
  Fn fn = Fn::Exp;
  double value = 0.0;  // Num
  int exponent = 0;    // Pow
  int lhs = -1;        // operand of Neg/Call, left operand of binaries
  int rhs = -1;
};

struct TaylorJet {
  double x0 = 0.0;
  std::vector<double> c;  // c[k] = f^(k)(x0) / k!

  int order() const { return static_cast<int>(c.size()) - 1; }
  double derivative(int k) const;
};

// Immutable expression tree in the single variable `x`.
class Expr {
 public:
  Expr();  // the constant 0

  static Expr parse(std::string_view source);
  static Expr constant(double v);

  std::string unparse() const;

  double eval(double x) const;
  cplx eval(cplx x) const;

  TaylorJet jet(double x0, int order, int k_max = kDefaultKMax) const;
  std::vector<cplx> jet(cplx x0, int order) const;

  bool is_zero_constant() const;
  bool structurally_equal(const Expr& other) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }

 private:
  friend class Parser;
  std::vector<Node> nodes_;
  int root_ = 0;
};

Expr parse(std::string_view source);
std::string unparse(const Expr& e);
cplx eval(const Expr& e, cplx x);
TaylorJet taylor_jet(const Expr& e, double x0, int order, int k_max = kDefaultKMax);

}  // namespace cw::exprs
