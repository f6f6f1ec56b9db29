#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace feinsum {

// Error classes map to CLI exit statuses: domain -> 1, usage -> 2, io -> 3.
enum class errc { domain, usage, io };

class error : public std::runtime_error {
public:
  error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  errc kind() const { return kind_; }

private:
  errc kind_;
};

enum class Dtype : int {
  int8 = 1,
  int32 = 2,
  int64 = 3,
  float16 = 4,
  float32 = 5,
  float64 = 6,
  complex64 = 7,
  complex128 = 8,
};

// Total order on dtypes used for the dtype tournament and for "widest dtype" promotion.
inline int dtype_rank(Dtype t) { return static_cast<int>(t); }

int dtype_size_bytes(Dtype t);
const char* dtype_name(Dtype t);
Dtype dtype_from_name(const std::string& s);  // throws errc::domain on unknown name

struct ArrayMeta {
  std::string name;
  std::vector<std::int64_t> shape;  // axis lengths, all positive; empty means 0-dim
  Dtype dtype = Dtype::float64;

  int dim() const { return static_cast<int>(shape.size()); }
  std::int64_t num_elements() const;

  friend bool operator==(const ArrayMeta&, const ArrayMeta&) = default;
};

using IndexList = std::vector<std::string>;

// A batch of b einsums sharing one index notation: row i computes
//   R_i[i_out...] = sum over reduction indices of prod_j args[i][j][i_in[j]...]
// b = args.size(), n = i_in.size(); every args row has n entries.
struct BatchedEinsum {
  IndexList i_out;
  std::vector<IndexList> i_in;
  std::vector<std::vector<ArrayMeta>> args;

  int b() const { return static_cast<int>(args.size()); }
  int n() const { return static_cast<int>(i_in.size()); }

  friend bool operator==(const BatchedEinsum&, const BatchedEinsum&) = default;
};

// Single einsum is the b = 1 view.
struct EinsumSpec {
  IndexList i_out;
  std::vector<IndexList> i_in;
  std::vector<ArrayMeta> args;

  BatchedEinsum as_batched() const { return BatchedEinsum{i_out, i_in, {args}}; }
};

// Empty list means sound; otherwise one human-readable message per violation,
// each naming the row/slot/index implicated.
std::vector<std::string> validate(const BatchedEinsum& e);

// Throws errc::domain with all violations joined if validate(e) is nonempty.
void require_valid(const BatchedEinsum& e);

bool equals(const BatchedEinsum& a, const BatchedEinsum& b);

struct InputAccess {
  int row;          // 1-based
  int slot;         // 1-based
  std::string sym;  // index symbol
  int dim;          // 1-based position within the slot's index list

  auto operator<=>(const InputAccess&) const = default;
};

struct OutputAccess {
  std::string sym;
  int dim;

  auto operator<=>(const OutputAccess&) const = default;
};

// The derived sets below assume validate(e) passed.

// Distinct arrays by name, name-sorted. Same name always means same metadata.
std::vector<ArrayMeta> universe(const BatchedEinsum& e);

// Index symbols in first-occurrence order: slot 1 dims left to right, slot 2, ...
std::vector<std::string> all_indices(const BatchedEinsum& e);

// Indices summed over: all_indices minus i_out, first-occurrence order.
std::vector<std::string> reduction_indices(const BatchedEinsum& e);

// Axis length of every index symbol (consistency is a validate guarantee).
std::map<std::string, std::int64_t> index_lengths(const BatchedEinsum& e);

// {Dim(A) : A in universe} union {|i_out|}
std::set<int> all_dims(const BatchedEinsum& e);

std::vector<InputAccess> input_accesses(const BatchedEinsum& e);
std::vector<OutputAccess> output_accesses(const BatchedEinsum& e);

std::set<Dtype> dtypes(const BatchedEinsum& e);
std::set<std::int64_t> axis_lengths(const BatchedEinsum& e);

// Dense row-major array. Values are held as complex<double> regardless of the
// declared dtype; non-complex dtypes keep imaginary parts at zero.
struct DenseArray {
  ArrayMeta meta;
  std::vector<std::complex<double>> data;

  static DenseArray zeros(const ArrayMeta& m);
};

using Bindings = std::map<std::string, DenseArray>;

// Evaluates every row. bindings must cover universe(e) with matching shape and
// dtype. Output dtype of a row is the widest dtype among its operands.
// Throws errc::domain on missing or mismatched bindings.
std::vector<DenseArray> evaluate(const BatchedEinsum& e, const Bindings& bindings);

// Witness that e1 is isomorphic to e2. Rows and slots map e1 -> e2; index and
// array names map e2 -> e1 (the direction the substitution is applied in).
struct SubstitutionWitness {
  std::vector<int> sigma_row;                    // e1 row i (0-based) -> e2 row
  std::vector<int> sigma_slot;                   // e1 slot j (0-based) -> e2 slot
  std::map<std::string, std::string> sigma_idx;  // e2 index -> e1 index
  std::map<std::string, std::string> sigma_arg;  // e2 array name -> e1 array name
};

}  // namespace feinsum
