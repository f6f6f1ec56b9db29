#pragma once

#include <string>
#include <utility>

#include "feinsum/core.hpp"

namespace feinsum {

// Classic einsum notation, single letters a-z only: "ij,jk->ik".
// Returns (i_out, i_in). Errors carry the column of the offending character.
std::pair<IndexList, std::vector<IndexList>> parse_notation(const std::string& s);

std::string print_notation(const BatchedEinsum& e);  // requires single-letter indices

// Convenience constructor used all over the tests: one args matrix, notation
// on top. Validates.
BatchedEinsum make_batched(const std::string& notation,
                           std::vector<std::vector<ArrayMeta>> args);

// Spec document format:
//
//   # comment
//   einsum: ij,j->i
//   row: A,B
//   row: A,C
//   array: A float64 96x4
//   array: B float64 4
//   array: C float64 4
//
// One einsum line, then one row line per batch row, then one array line per
// referenced array ("scalar" for 0-dim). parse_classic(print_classic(e)) == e.
BatchedEinsum parse_classic(const std::string& text);
std::string print_classic(const BatchedEinsum& e);

// Versioned, byte-exact serialization of a canonical form, the persistent
// lookup key. Example:
//
//   FE1|b=1|n=2|out=a|in=ab;ac|rows=A0,A1|A0=float64:72x18|A1=float64:72x18
//
// in-lists are ;-separated, row entries comma-joined with ; between rows,
// array metadata name-sorted, an empty shape renders "scalar". Throws
// errc::domain if e is not in canonical form (checked by re-canonicalizing).
std::string canonical_key(const BatchedEinsum& e);

}  // namespace feinsum
