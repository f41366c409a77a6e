#include "finsler/dsl/expr.hpp"

namespace finsler::dsl {

NodePtr differentiate(const NodePtr& e, VarId v) {
  const Node& n = *e;
  switch (n.op) {
    case Op::Constant: return constant(0);
    case Op::Variable: return constant(n.var == v ? 1 : 0);
    case Op::Add: return add(differentiate(n.args[0], v), differentiate(n.args[1], v));
    case Op::Sub: return sub(differentiate(n.args[0], v), differentiate(n.args[1], v));
    case Op::Neg: return neg(differentiate(n.args[0], v));
    case Op::Mul: {
      const NodePtr &a = n.args[0], &b = n.args[1];
      return add(mul(differentiate(a, v), b), mul(a, differentiate(b, v)));
    }
    case Op::Div: {
      const NodePtr &a = n.args[0], &b = n.args[1];
      NodePtr da = differentiate(a, v), db = differentiate(b, v);
      if (is_constant(db, 0.0)) return div(da, b);
      return div(sub(mul(da, b), mul(a, db)), pow(b, Number::rational(2)));
    }
    case Op::Pow: {
      const NodePtr& u = n.args[0];
      NodePtr du = differentiate(u, v);
      if (is_constant(du, 0.0)) return constant(0);
      Number r = n.value;
      return mul(mul(constant(r), pow(u, r - Number::rational(1))), du);
    }
    case Op::Exp: return mul(e, differentiate(n.args[0], v));
    case Op::Ln: return div(differentiate(n.args[0], v), n.args[0]);
  }
  return constant(0);
}

}  // namespace finsler::dsl
