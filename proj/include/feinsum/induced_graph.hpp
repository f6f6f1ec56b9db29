#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "feinsum/core.hpp"
#include "feinsum/graph_canon.hpp"

namespace feinsum {

// Node colors, one per block, in block numbering order.
inline constexpr int color_arg = 1;
inline constexpr int color_index = 2;
inline constexpr int color_access_in = 3;
inline constexpr int color_access_out = 4;
inline constexpr int color_output = 5;
inline constexpr int color_arg_pos = 6;
inline constexpr int color_dtype = 7;
inline constexpr int color_length = 8;
inline constexpr int color_dim = 9;

struct InducedGraph {
  ColoredDigraph graph;
  std::map<int, Dtype> iota_dtype;          // dtype node -> dtype
  std::map<int, std::int64_t> iota_length;  // length node -> axis length
  std::map<int, std::string> iota_index;    // index node -> source symbol
  std::map<int, std::string> iota_arg;      // arg node -> source array name
  std::map<int, int> iota_output;           // output node -> source row 1..b
  std::map<int, int> iota_argpos;           // arg-pos node -> source slot 1..n
};

// Encodes a valid batched einsum as a colored digraph. Within-block node
// numbering follows source order (arrays name-sorted, indices by first
// occurrence, accesses row-major, lengths ascending, dtypes by rank); passing
// shuffle_seed randomizes it instead, which must not change the canonical
// form. Throws errc::domain on invalid input and on 0-dim operands, which
// have no access nodes and so cannot be encoded.
InducedGraph to_induced_graph(const BatchedEinsum& e,
                              std::optional<std::uint64_t> shuffle_seed = {});

// Every violated encoding condition, in a fixed order; empty means the graph
// is a structurally valid encoding and to_batched_einsum will succeed.
std::vector<std::string> check_compliance(const ColoredDigraph& g);

struct Reconstruction {
  BatchedEinsum e;
  std::map<int, int> iota_index_inferred;   // index node -> ordinal 1..N_index
  std::map<int, int> iota_arg_inferred;     // arg node -> ordinal 1..N_arg
  std::map<int, int> iota_output_inferred;  // output node -> row 1..b
  std::map<int, int> iota_argpos_inferred;  // arg-pos node -> slot 1..n
};

// Inverse of to_induced_graph up to isomorphism. Requires iota_dtype and
// iota_length to cover the dtype and length nodes. Index and array names are
// generated from inferred ordinals via default_index_name / default_arg_name.
// Throws errc::domain when check_compliance reports violations.
Reconstruction to_batched_einsum(const ColoredDigraph& g,
                                 const std::map<int, Dtype>& iota_dtype,
                                 const std::map<int, std::int64_t>& iota_length);

std::string default_index_name(int k);  // 1 -> "a", ..., 26 -> "z", 27 -> "idx27"
std::string default_arg_name(int k);    // 1 -> "A0", 2 -> "A1", ...

// Graphviz rendering for debugging.
std::string to_dot(const InducedGraph& g);

}  // namespace feinsum
