#include "feinsum/raising.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

#include "feinsum/canonicalize.hpp"
#include "feinsum/notation.hpp"

namespace feinsum {

namespace {

std::string num_str(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<std::string>& v, const char* sep = ",") {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += sep;
    s += v[i];
  }
  return s;
}

const std::set<std::string>& unary_funcs() {
  static const std::set<std::string> f{"sin", "cos", "exp", "sqrt", "reciprocal"};
  return f;
}

template <class F>
void walk(const Expr& e, F&& f) {
  f(e);
  for (const Expr& c : e.children) walk(c, f);
}

// ---- fingerprint ----

void flatten(const Expr& e, char op, std::vector<const Expr*>& out) {
  if (e.kind == Expr::Kind::binary && e.op == op) {
    flatten(e.children[0], op, out);
    flatten(e.children[1], op, out);
  } else {
    out.push_back(&e);
  }
}

std::string ser(const Expr& e, const std::map<std::string, int>& pidx) {
  switch (e.kind) {
    case Expr::Kind::literal:
      return "L" + num_str(e.literal);
    case Expr::Kind::param:
      return "P" + std::to_string(pidx.at(e.name));
    case Expr::Kind::access: {
      std::string s = "R" + e.name + "[";
      for (size_t d = 0; d < e.subs.size(); ++d) {
        if (d) s += ',';
        s += "P" + std::to_string(pidx.at(e.subs[d]));
      }
      return s + "]";
    }
    case Expr::Kind::unary:
      return e.name + "(" + ser(e.children[0], pidx) + ")";
    case Expr::Kind::binary: {
      if (e.op == '+' || e.op == '*') {
        std::vector<const Expr*> terms;
        flatten(e, e.op, terms);
        std::vector<std::string> parts;
        for (const Expr* t : terms) parts.push_back(ser(*t, pidx));
        std::sort(parts.begin(), parts.end());
        return std::string(e.op == '+' ? "add(" : "mul(") + join(parts) + ")";
      }
      return std::string(e.op == '-' ? "sub(" : "div(") + ser(e.children[0], pidx) + "," +
             ser(e.children[1], pidx) + ")";
    }
  }
  return "";
}

// ---- expression text ----

struct Lexer {
  const std::string& s;
  size_t i = 0;
  int line_no;

  Lexer(const std::string& text, int line) : s(text), line_no(line) {}

  void skip() {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
  }
  bool eof() {
    skip();
    return i >= s.size();
  }
  char peek() {
    skip();
    return i < s.size() ? s[i] : '\0';
  }
  [[noreturn]] void fail(const std::string& what) {
    throw error(errc::domain,
                "line " + std::to_string(line_no) + ", col " + std::to_string(i + 1) + ": " + what);
  }
  bool take(char c) {
    skip();
    if (i < s.size() && s[i] == c) {
      ++i;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!take(c)) fail(std::string("expected '") + c + "'");
  }
  bool ident_ahead() {
    char c = peek();
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  std::string ident() {
    if (!ident_ahead()) fail("expected a name");
    size_t j = i;
    while (i < s.size() &&
           (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_'))
      ++i;
    return s.substr(j, i - j);
  }
  std::int64_t integer() {
    skip();
    size_t j = i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
    if (i == j) fail("expected an integer");
    return std::stoll(s.substr(j, i - j));
  }
  double number() {
    skip();
    const char* start = s.c_str() + i;
    char* end = nullptr;
    double v = std::strtod(start, &end);
    if (end == start) fail("expected a number");
    i += end - start;
    return v;
  }
  // comma-separated names inside the given brackets; may be empty
  std::vector<std::string> name_list(char open, char close) {
    expect(open);
    std::vector<std::string> out;
    if (take(close)) return out;
    out.push_back(ident());
    while (take(',')) out.push_back(ident());
    expect(close);
    return out;
  }
};

Expr lit(double v) {
  Expr e;
  e.kind = Expr::Kind::literal;
  e.literal = v;
  return e;
}

Expr binop(char op, Expr l, Expr r) {
  Expr e;
  e.kind = Expr::Kind::binary;
  e.op = op;
  e.children.push_back(std::move(l));
  e.children.push_back(std::move(r));
  return e;
}

Expr parse_sum(Lexer& lx, const std::set<std::string>& params);

Expr parse_primary(Lexer& lx, const std::set<std::string>& params) {
  char c = lx.peek();
  if (c == '(') {
    lx.take('(');
    Expr e = parse_sum(lx, params);
    lx.expect(')');
    return e;
  }
  if (std::isdigit(static_cast<unsigned char>(c))) return lit(lx.number());
  if (!lx.ident_ahead()) lx.fail("expected a value");
  std::string name = lx.ident();
  if (lx.peek() == '(') {
    if (!unary_funcs().count(name))
      lx.fail("unknown function " + name + " (defs cannot call other defs)");
    lx.take('(');
    Expr e;
    e.kind = Expr::Kind::unary;
    e.name = name;
    e.children.push_back(parse_sum(lx, params));
    lx.expect(')');
    return e;
  }
  if (lx.peek() == '[') {
    Expr e;
    e.kind = Expr::Kind::access;
    e.name = name;
    e.subs = lx.name_list('[', ']');
    for (const std::string& p : e.subs)
      if (!params.count(p)) lx.fail("subscript " + p + " is not a parameter");
    return e;
  }
  if (!params.count(name)) lx.fail(name + " is not a parameter");
  Expr e;
  e.kind = Expr::Kind::param;
  e.name = name;
  return e;
}

Expr parse_unary(Lexer& lx, const std::set<std::string>& params) {
  if (lx.take('-')) return binop('-', lit(0.0), parse_unary(lx, params));
  return parse_primary(lx, params);
}

Expr parse_product(Lexer& lx, const std::set<std::string>& params) {
  Expr e = parse_unary(lx, params);
  while (true) {
    if (lx.take('*'))
      e = binop('*', std::move(e), parse_unary(lx, params));
    else if (lx.take('/'))
      e = binop('/', std::move(e), parse_unary(lx, params));
    else
      return e;
  }
}

Expr parse_sum(Lexer& lx, const std::set<std::string>& params) {
  Expr e = parse_product(lx, params);
  while (true) {
    if (lx.take('+'))
      e = binop('+', std::move(e), parse_product(lx, params));
    else if (lx.take('-'))
      e = binop('-', std::move(e), parse_product(lx, params));
    else
      return e;
  }
}

int prec(const Expr& e) {
  if (e.kind != Expr::Kind::binary) return 3;
  return (e.op == '+' || e.op == '-') ? 1 : 2;
}

std::string print_expr(const Expr& e, int parent) {
  switch (e.kind) {
    case Expr::Kind::literal:
      return num_str(e.literal);
    case Expr::Kind::param:
      return e.name;
    case Expr::Kind::access:
      return e.name + "[" + join(e.subs) + "]";
    case Expr::Kind::unary:
      return e.name + "(" + print_expr(e.children[0], 0) + ")";
    case Expr::Kind::binary: {
      int own = prec(e);
      std::string s = print_expr(e.children[0], own) + e.op + print_expr(e.children[1], own + 1);
      if (own < parent) return "(" + s + ")";
      return s;
    }
  }
  return "";
}

std::string shape_str(const std::vector<std::int64_t>& shape) {
  if (shape.empty()) return "scalar";
  std::string s;
  for (size_t d = 0; d < shape.size(); ++d) {
    if (d) s += 'x';
    s += std::to_string(shape[d]);
  }
  return s;
}

// Per-parameter extents a def's body forces through its array reads.
std::map<std::string, std::int64_t> param_extents(const std::string& def_name,
                                                  const OperandExpr& op,
                                                  const std::map<std::string, ArrayMeta>& arrays) {
  std::map<std::string, std::int64_t> ext;
  walk(op.body, [&](const Expr& e) {
    if (e.kind != Expr::Kind::access) return;
    auto it = arrays.find(e.name);
    if (it == arrays.end())
      throw error(errc::domain, "def " + def_name + " reads undeclared array " + e.name);
    const ArrayMeta& m = it->second;
    if (e.subs.size() != m.shape.size())
      throw error(errc::domain, "def " + def_name + " reads " + e.name + " with " +
                                    std::to_string(e.subs.size()) + " subscripts; it has " +
                                    std::to_string(m.shape.size()) + " axes");
    for (size_t d = 0; d < e.subs.size(); ++d) {
      auto [pos, fresh] = ext.emplace(e.subs[d], m.shape[d]);
      if (!fresh && pos->second != m.shape[d])
        throw error(errc::domain, "def " + def_name + ": parameter " + e.subs[d] +
                                      " spans extents " + std::to_string(pos->second) + " and " +
                                      std::to_string(m.shape[d]));
    }
  });
  return ext;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

std::string fingerprint(const OperandExpr& op) {
  std::map<std::string, int> pidx;
  for (size_t k = 0; k < op.params.size(); ++k) pidx.emplace(op.params[k], static_cast<int>(k));
  return std::to_string(op.params.size()) + ":" + ser(op.body, pidx);
}

Dtype expr_dtype(const Expr& body, const std::map<std::string, ArrayMeta>& arrays) {
  Dtype widest = Dtype::float64;
  bool any = false;
  walk(body, [&](const Expr& e) {
    if (e.kind != Expr::Kind::access) return;
    auto it = arrays.find(e.name);
    if (it == arrays.end())
      throw error(errc::domain, "expression reads undeclared array " + e.name);
    if (!any || dtype_rank(it->second.dtype) > dtype_rank(widest)) widest = it->second.dtype;
    any = true;
  });
  return widest;
}

std::complex<double> eval_expr(const OperandExpr& op, const std::vector<std::int64_t>& at,
                               const Bindings& bindings) {
  if (at.size() != op.params.size())
    throw error(errc::domain, "eval_expr: got " + std::to_string(at.size()) + " values for " +
                                  std::to_string(op.params.size()) + " parameters");
  std::map<std::string, std::int64_t> env;
  for (size_t k = 0; k < at.size(); ++k) env[op.params[k]] = at[k];

  auto ev = [&](const Expr& e, auto&& self) -> std::complex<double> {
    switch (e.kind) {
      case Expr::Kind::literal:
        return {e.literal, 0.0};
      case Expr::Kind::param:
        return {static_cast<double>(env.at(e.name)), 0.0};
      case Expr::Kind::access: {
        auto it = bindings.find(e.name);
        if (it == bindings.end())
          throw error(errc::domain, "no binding for array " + e.name);
        const DenseArray& a = it->second;
        if (e.subs.size() != a.meta.shape.size())
          throw error(errc::domain, "array " + e.name + " read with " +
                                        std::to_string(e.subs.size()) + " subscripts, has " +
                                        std::to_string(a.meta.shape.size()) + " axes");
        std::int64_t flat = 0;
        for (size_t d = 0; d < e.subs.size(); ++d) {
          std::int64_t v = env.at(e.subs[d]);
          if (v < 0 || v >= a.meta.shape[d])
            throw error(errc::domain, "array " + e.name + " subscript " + std::to_string(v) +
                                          " out of range on axis " + std::to_string(d));
          flat = flat * a.meta.shape[d] + v;
        }
        return a.data[flat];
      }
      case Expr::Kind::unary: {
        std::complex<double> x = self(e.children[0], self);
        if (e.name == "sin") return std::sin(x);
        if (e.name == "cos") return std::cos(x);
        if (e.name == "exp") return std::exp(x);
        if (e.name == "sqrt") return std::sqrt(x);
        if (e.name == "reciprocal") return 1.0 / x;
        throw error(errc::domain, "unknown function " + e.name);
      }
      case Expr::Kind::binary: {
        std::complex<double> l = self(e.children[0], self);
        std::complex<double> r = self(e.children[1], self);
        switch (e.op) {
          case '+': return l + r;
          case '-': return l - r;
          case '*': return l * r;
          case '/': return l / r;
        }
        throw error(errc::domain, std::string("unknown operator ") + e.op);
      }
    }
    return {};
  };
  return ev(op.body, ev);
}

DenseArray materialize(const OperandExpr& op, const ArrayMeta& meta, const Bindings& bindings) {
  if (op.params.size() != meta.shape.size())
    throw error(errc::domain, "materialize: operand takes " + std::to_string(op.params.size()) +
                                  " parameters, shape has " + std::to_string(meta.shape.size()) +
                                  " axes");
  DenseArray a = DenseArray::zeros(meta);
  std::vector<std::int64_t> at(meta.shape.size(), 0);
  for (std::int64_t flat = 0; flat < meta.num_elements(); ++flat) {
    a.data[flat] = eval_expr(op, at, bindings);
    for (int d = static_cast<int>(at.size()) - 1; d >= 0; --d) {
      if (++at[d] < meta.shape[d]) break;
      at[d] = 0;
    }
  }
  return a;
}

bool is_idealized(const FunctionalBatchedEinsum& f) {
  std::set<std::string> read;
  for (const auto& [name, op] : f.operand_map) {
    const Expr& b = op.body;
    if (b.kind != Expr::Kind::access) return false;
    if (b.subs != op.params) return false;
    if (std::set<std::string>(op.params.begin(), op.params.end()).size() != op.params.size())
      return false;
    if (!read.insert(b.name).second) return false;
  }
  return true;
}

std::vector<DenseArray> evaluate_functional(const FunctionalBatchedEinsum& f,
                                            const Bindings& bindings) {
  Bindings synth;
  for (const ArrayMeta& m : universe(f.skeleton)) {
    auto it = f.operand_map.find(m.name);
    if (it == f.operand_map.end())
      throw error(errc::domain, "no operand expression for " + m.name);
    synth.emplace(m.name, materialize(it->second, m, bindings));
  }
  return evaluate(f.skeleton, synth);
}

FunctionalKernel parse_kernel(const std::string& text) {
  FunctionalKernel k;
  std::set<std::string> domain_idx;
  std::set<std::string> out_names;
  int stage = 0;  // 0 want domain, 1 defs/arrays, 2 stmts

  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string head;
    ls >> head;
    std::string rest = trim(line.substr(head.size()));
    auto fail = [&](const std::string& what) -> void {
      throw error(errc::domain, "line " + std::to_string(line_no) + ": " + what);
    };

    if (head == "domain:") {
      if (stage != 0) fail("stray domain line");
      Lexer lx(rest, line_no);
      while (!lx.eof()) {
        std::string name = lx.ident();
        lx.expect('<');
        std::int64_t ext = lx.integer();
        if (ext <= 0) fail("extent of " + name + " must be positive");
        if (!domain_idx.insert(name).second) fail("index " + name + " declared twice");
        k.domain.emplace_back(name, ext);
      }
      if (k.domain.empty()) fail("empty domain");
      stage = 1;
    } else if (head == "def") {
      if (stage == 0) fail("def before domain line");
      if (stage == 2) fail("def after stmt lines");
      Lexer lx(rest, line_no);
      std::string name = lx.ident();
      std::vector<std::string> params = lx.name_list('(', ')');
      std::set<std::string> pset(params.begin(), params.end());
      if (pset.size() != params.size()) fail("def " + name + " repeats a parameter");
      lx.expect(':');
      lx.expect('=');
      Expr body = parse_sum(lx, pset);
      if (!lx.eof()) lx.fail("trailing input after expression");
      if (!k.defs.emplace(name, OperandExpr{std::move(params), std::move(body)}).second)
        fail("def " + name + " defined twice");
    } else if (head == "array:") {
      if (stage == 0) fail("array before domain line");
      if (stage == 2) fail("array after stmt lines");
      std::istringstream fs(rest);
      std::string name, dtype_s, sh, extra;
      if (!(fs >> name >> dtype_s >> sh) || (fs >> extra))
        fail("want \"array: <name> <dtype> <shape>\", got \"" + rest + "\"");
      std::vector<std::int64_t> shape;
      if (sh != "scalar") {
        Lexer lx(sh, line_no);
        shape.push_back(lx.integer());
        while (lx.take('x')) shape.push_back(lx.integer());
        if (!lx.eof()) lx.fail("bad shape");
        for (std::int64_t d : shape)
          if (d <= 0) fail("shape axis must be positive");
      }
      if (!k.arrays.emplace(name, ArrayMeta{name, std::move(shape), dtype_from_name(dtype_s)}).second)
        fail("array " + name + " declared twice");
    } else if (head == "stmt") {
      if (stage == 0) fail("stmt before domain line");
      stage = 2;
      Lexer lx(rest, line_no);
      KernelStatement st;
      st.out_name = lx.ident();
      if (!out_names.insert(st.out_name).second) fail("two statements write " + st.out_name);
      st.out_idx = lx.name_list('[', ']');
      lx.expect('=');
      if (lx.ident() != "sum") lx.fail("expected sum(...)");
      lx.expect('(');
      st.red_idx = lx.name_list('[', ']');
      lx.expect(',');
      while (true) {
        KernelFactor f;
        f.callee = lx.ident();
        char c = lx.peek();
        if (c == '(') {
          f.is_access = false;
          f.args = lx.name_list('(', ')');
        } else if (c == '[') {
          f.is_access = true;
          f.args = lx.name_list('[', ']');
        } else {
          lx.fail("expected (indices) or [indices] after " + f.callee);
        }
        st.factors.push_back(std::move(f));
        if (!lx.take('*')) break;
      }
      if (lx.peek() == '+' || lx.peek() == '/' || lx.peek() == '-')
        lx.fail("a statement must be a plain product of def calls and array reads");
      lx.expect(')');
      if (!lx.eof()) lx.fail("trailing input after statement");

      std::set<std::string> red(st.red_idx.begin(), st.red_idx.end());
      if (red.size() != st.red_idx.size()) fail("duplicate reduction index");
      auto known = [&](const std::string& s) { return domain_idx.count(s) != 0; };
      for (const std::string& s : st.out_idx)
        if (!known(s)) fail("index " + s + " is not in the domain");
      for (const std::string& s : st.red_idx)
        if (!known(s)) fail("index " + s + " is not in the domain");
      for (const KernelFactor& f : st.factors) {
        for (const std::string& s : f.args)
          if (!known(s)) fail("index " + s + " is not in the domain");
        if (f.is_access) {
          if (!k.arrays.count(f.callee)) {
            if (k.defs.count(f.callee)) fail(f.callee + " is a def; call it as " + f.callee + "(...)");
            fail("unknown array " + f.callee);
          }
          if (f.args.size() != k.arrays.at(f.callee).shape.size())
            fail(f.callee + " has " + std::to_string(k.arrays.at(f.callee).shape.size()) +
                 " axes, read with " + std::to_string(f.args.size()) + " subscripts");
        } else {
          if (!k.defs.count(f.callee)) {
            if (k.arrays.count(f.callee))
              fail(f.callee + " is an array; read it as " + f.callee + "[...]");
            fail("unknown def " + f.callee);
          }
          if (f.args.size() != k.defs.at(f.callee).params.size())
            fail(f.callee + " takes " + std::to_string(k.defs.at(f.callee).params.size()) +
                 " parameters, called with " + std::to_string(f.args.size()));
        }
      }
      k.statements.push_back(std::move(st));
    } else {
      fail("unknown line kind \"" + head + "\"");
    }
  }

  if (k.domain.empty()) throw error(errc::domain, "missing domain line");
  if (k.statements.empty()) throw error(errc::domain, "missing stmt lines");
  for (const auto& [name, op] : k.defs) {
    if (k.arrays.count(name))
      throw error(errc::domain, "name " + name + " is both a def and an array");
    param_extents(name, op, k.arrays);  // reject inconsistent defs up front
  }
  return k;
}

std::string print_kernel(const FunctionalKernel& k) {
  std::string s = "domain:";
  for (const auto& [name, ext] : k.domain) s += " " + name + "<" + std::to_string(ext);
  s += '\n';
  for (const auto& [name, op] : k.defs)
    s += "def " + name + "(" + join(op.params) + ") := " + print_expr(op.body, 0) + "\n";
  for (const auto& [name, m] : k.arrays)
    s += "array: " + name + " " + std::string(dtype_name(m.dtype)) + " " + shape_str(m.shape) + "\n";
  for (const KernelStatement& st : k.statements) {
    s += "stmt " + st.out_name + "[" + join(st.out_idx) + "] = sum([" + join(st.red_idx) + "], ";
    for (size_t j = 0; j < st.factors.size(); ++j) {
      if (j) s += '*';
      const KernelFactor& f = st.factors[j];
      s += f.callee + (f.is_access ? "[" : "(") + join(f.args) + (f.is_access ? "]" : ")");
    }
    s += ")\n";
  }
  return s;
}

RaiseResult raise_to_batched_einsum(const FunctionalKernel& k) {
  const std::vector<KernelStatement>& sts = k.statements;
  if (sts.empty()) throw error(errc::domain, "kernel has no statements");
  size_t nf = sts[0].factors.size();
  if (nf == 0) throw error(errc::domain, "statement 1 has no factors");

  std::set<std::string> red0(sts[0].red_idx.begin(), sts[0].red_idx.end());
  for (size_t s = 1; s < sts.size(); ++s) {
    if (sts[s].factors.size() != nf)
      throw error(errc::domain, "statement " + std::to_string(s + 1) + " has " +
                                    std::to_string(sts[s].factors.size()) +
                                    " factors, statement 1 has " + std::to_string(nf));
    if (sts[s].out_idx != sts[0].out_idx)
      throw error(errc::domain, "statement " + std::to_string(s + 1) + " writes [" +
                                    join(sts[s].out_idx) + "], statement 1 writes [" +
                                    join(sts[0].out_idx) + "]");
    for (size_t j = 0; j < nf; ++j)
      if (sts[s].factors[j].args != sts[0].factors[j].args)
        throw error(errc::domain, "statement " + std::to_string(s + 1) + " factor " +
                                      std::to_string(j + 1) + " reads (" +
                                      join(sts[s].factors[j].args) + "), statement 1 reads (" +
                                      join(sts[0].factors[j].args) + ")");
    if (std::set<std::string>(sts[s].red_idx.begin(), sts[s].red_idx.end()) != red0)
      throw error(errc::domain,
                  "statement " + std::to_string(s + 1) + " reduces over [" + join(sts[s].red_idx) +
                      "], statement 1 over [" + join(sts[0].red_idx) + "]");
  }

  // declared reduction list must be exactly the read-but-not-written indices
  std::set<std::string> seen;
  for (const KernelFactor& f : sts[0].factors) seen.insert(f.args.begin(), f.args.end());
  std::set<std::string> out0(sts[0].out_idx.begin(), sts[0].out_idx.end());
  std::set<std::string> derived;
  for (const std::string& s : seen)
    if (!out0.count(s)) derived.insert(s);
  if (derived != red0) {
    std::vector<std::string> want(derived.begin(), derived.end());
    throw error(errc::domain, "statement reduction list [" + join(sts[0].red_idx) +
                                  "] does not match the reduced indices [" + join(want) + "]");
  }

  std::map<std::string, std::int64_t> ext;
  for (const auto& [name, e] : k.domain) ext[name] = e;

  RaiseResult rr;
  BatchedEinsum& e = rr.f.skeleton;
  e.i_out = sts[0].out_idx;
  for (const KernelFactor& f : sts[0].factors) e.i_in.push_back(f.args);

  std::map<std::pair<std::string, std::vector<std::int64_t>>, std::string> known;
  int counter = 0;
  for (const KernelStatement& st : sts) {
    std::vector<ArrayMeta> row;
    for (const KernelFactor& f : st.factors) {
      OperandExpr op;
      if (f.is_access) {
        const ArrayMeta& m = k.arrays.at(f.callee);
        for (size_t d = 0; d < f.args.size(); ++d) {
          op.params.push_back("p" + std::to_string(d));
          if (ext.at(f.args[d]) != m.shape[d])
            throw error(errc::domain, "index " + f.args[d] + " (extent " +
                                          std::to_string(ext.at(f.args[d])) + ") reads axis " +
                                          std::to_string(d) + " of " + f.callee + " (extent " +
                                          std::to_string(m.shape[d]) + ")");
        }
        Expr body;
        body.kind = Expr::Kind::access;
        body.name = f.callee;
        body.subs = op.params;
        op.body = std::move(body);
      } else {
        op = k.defs.at(f.callee);
        std::map<std::string, std::int64_t> need = param_extents(f.callee, op, k.arrays);
        for (size_t d = 0; d < f.args.size(); ++d) {
          auto it = need.find(op.params[d]);
          if (it != need.end() && it->second != ext.at(f.args[d]))
            throw error(errc::domain, "index " + f.args[d] + " (extent " +
                                          std::to_string(ext.at(f.args[d])) + ") bound to parameter " +
                                          op.params[d] + " of " + f.callee + " (extent " +
                                          std::to_string(it->second) + ")");
        }
      }
      std::vector<std::int64_t> shape;
      for (const std::string& s : f.args) shape.push_back(ext.at(s));
      auto key = std::make_pair(fingerprint(op), shape);
      auto it = known.find(key);
      std::string sname;
      if (it == known.end()) {
        sname = "op" + std::to_string(counter++);
        known.emplace(key, sname);
        rr.sigma_arg[sname] = f.callee;
        rr.f.operand_map.emplace(sname, std::move(op));
      } else {
        sname = it->second;
      }
      row.push_back(ArrayMeta{sname, std::move(shape),
                              expr_dtype(rr.f.operand_map.at(sname).body, k.arrays)});
    }
    e.args.push_back(std::move(row));
  }

  require_valid(e);
  for (const std::string& s : all_indices(e)) rr.sigma_idx[s] = s;
  return rr;
}

FunctionalKernel lower_to_kernel(const BatchedEinsum& e) {
  require_valid(e);
  FunctionalKernel k;
  std::map<std::string, std::int64_t> len = index_lengths(e);
  for (const std::string& s : all_indices(e)) k.domain.emplace_back(s, len.at(s));
  for (const ArrayMeta& m : universe(e)) k.arrays.emplace(m.name, m);
  IndexList red = reduction_indices(e);
  for (int i = 0; i < e.b(); ++i) {
    KernelStatement st;
    st.out_name = "y" + std::to_string(i + 1);
    st.out_idx = e.i_out;
    st.red_idx = red;
    for (int j = 0; j < e.n(); ++j)
      st.factors.push_back(KernelFactor{e.args[i][j].name, true, e.i_in[j]});
    k.statements.push_back(std::move(st));
  }
  return k;
}

MatchResult identify_as_einsum(const FunctionalKernel& k, const BatchedEinsum& ref) {
  RaiseResult rr = raise_to_batched_einsum(k);
  CanonResult cref = canonicalize(ref);
  CanonResult ck = canonicalize(rr.f.skeleton);
  if (!equals(cref.canonical, ck.canonical))
    throw error(errc::domain, "kernel does not compute the reference einsum\n  reference key: " +
                                  canonical_key(cref.canonical) +
                                  "\n  kernel key:    " + canonical_key(ck.canonical));

  MatchResult m;
  for (const auto& [canon_sym, ref_sym] : cref.sigma_idx)
    m.sigma_idx[ref_sym] = rr.sigma_idx.at(ck.sigma_idx.at(canon_sym));
  for (const auto& [canon_name, ref_name] : cref.sigma_arg) {
    const std::string& sk = ck.sigma_arg.at(canon_name);
    m.sigma_arg_skeleton[ref_name] = sk;
    m.sigma_arg[ref_name] = rr.sigma_arg.at(sk);
  }
  m.sigma_row.resize(cref.sigma_row.size());
  for (size_t q = 0; q < cref.sigma_row.size(); ++q)
    m.sigma_row[cref.sigma_row[q]] = ck.sigma_row[q];
  return m;
}

}  // namespace feinsum
