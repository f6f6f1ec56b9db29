#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "feinsum/core.hpp"

namespace feinsum {

// Scalar expression over loop parameters and array reads. Unary names:
// sin cos exp sqrt reciprocal neg.
struct Expr {
  enum class Kind { literal, param, access, binary, unary };
  Kind kind = Kind::literal;
  double literal = 0.0;
  std::string name;                 // param / array / unary function name
  char op = 0;                      // binary: + - * /
  std::vector<std::string> subs;    // access: subscript params, one per axis
  std::vector<Expr> children;
};

// A pure function (i1,...,ik) -> scalar.
struct OperandExpr {
  std::vector<std::string> params;
  Expr body;
};

// Structural identity of an OperandExpr: params renamed positionally,
// chains of + and * flattened and sorted, literals normalized. Two operands
// with equal fingerprints and equal shapes are the same operand.
std::string fingerprint(const OperandExpr& op);

// Widest dtype among arrays read by the body; float64 when it reads none.
Dtype expr_dtype(const Expr& body, const std::map<std::string, ArrayMeta>& arrays);

// Evaluate at a grid point. Params take their (0-based) integer values.
std::complex<double> eval_expr(const OperandExpr& op, const std::vector<std::int64_t>& at,
                               const Bindings& bindings);

// Tabulate op over meta.shape.
DenseArray materialize(const OperandExpr& op, const ArrayMeta& meta, const Bindings& bindings);

// Batched einsum whose operands are functions rather than plain arrays.
// operand_map keys are the skeleton array names.
struct FunctionalBatchedEinsum {
  BatchedEinsum skeleton;
  std::map<std::string, OperandExpr> operand_map;
};

// True when every operand is a plain positional read A[p0,...,pk-1] of a
// distinct array, i.e. the functional layer adds nothing.
bool is_idealized(const FunctionalBatchedEinsum& f);

// Evaluate by materializing each operand and running the plain evaluator.
// bindings cover the arrays read inside operand bodies.
std::vector<DenseArray> evaluate_functional(const FunctionalBatchedEinsum& f,
                                            const Bindings& bindings);

// Loop-nest kernel:
//
//   domain: i0<96 i1<4
//   def u(i,j) := P[i,j]*P[i,j]
//   array: P float64 96x4
//   array: v float64 4
//   stmt y1[i0] = sum([i1], u(i0,i1)*v(i1))
//
// domain first; def/array lines in any order; stmt lines last. A factor is a
// def call f(i,...) or a direct array read A[i,...].
struct KernelFactor {
  std::string callee;
  bool is_access = false;  // callee names an array, not a def
  std::vector<std::string> args;
};

struct KernelStatement {
  std::string out_name;
  std::vector<std::string> out_idx;
  std::vector<std::string> red_idx;
  std::vector<KernelFactor> factors;
};

struct FunctionalKernel {
  std::vector<std::pair<std::string, std::int64_t>> domain;
  std::map<std::string, OperandExpr> defs;
  std::map<std::string, ArrayMeta> arrays;
  std::vector<KernelStatement> statements;
};

FunctionalKernel parse_kernel(const std::string& text);
std::string print_kernel(const FunctionalKernel& k);

// Rebuild the batched einsum a kernel computes. Skeleton indices are the
// kernel's own loop indices; skeleton arg names are synthetic (op0, op1, ...)
// with one name per distinct (fingerprint, shape) pair.
struct RaiseResult {
  FunctionalBatchedEinsum f;
  std::map<std::string, std::string> sigma_arg;  // skeleton arg -> def/array name
  std::map<std::string, std::string> sigma_idx;  // skeleton index -> loop index (identity)
};

RaiseResult raise_to_batched_einsum(const FunctionalKernel& k);

// Inverse convenience for tests: a kernel of direct array reads computing e.
FunctionalKernel lower_to_kernel(const BatchedEinsum& e);

// Decide whether k computes ref up to renaming/reordering, and name the
// correspondence: reference index/array/row -> kernel loop index, def or
// array name, statement ordinal. Throws errc::domain (with both canonical
// keys) when the shapes of computation differ.
struct MatchResult {
  std::map<std::string, std::string> sigma_idx;
  std::map<std::string, std::string> sigma_arg;
  std::map<std::string, std::string> sigma_arg_skeleton;  // reference arg -> raised skeleton arg
  std::vector<int> sigma_row;                             // reference row -> statement, 0-based
};

MatchResult identify_as_einsum(const FunctionalKernel& k, const BatchedEinsum& ref);

}  // namespace feinsum
