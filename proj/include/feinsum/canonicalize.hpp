#pragma once

#include <cstdint>
#include <optional>

#include "feinsum/core.hpp"
#include "feinsum/induced_graph.hpp"

namespace feinsum {

// Result of canonicalization. All sigma maps go canonical -> original, the
// direction in which a stored implementation of the canonical form would be
// rewritten to compute the original.
struct CanonResult {
  BatchedEinsum canonical;
  std::map<std::string, std::string> sigma_idx;  // canonical index -> original
  std::map<std::string, std::string> sigma_arg;  // canonical array -> original
  std::vector<int> sigma_row;                    // canonical row (0-based) -> original row
  std::vector<int> sigma_slot;                   // canonical slot (0-based) -> original slot
};

// Encode as a colored digraph, canonically relabel, reconstruct. Two batched
// einsums are isomorphic iff their canonical forms are equal, and
// canonicalize(canonicalize(e).canonical).canonical == canonicalize(e).canonical.
CanonResult canonicalize(const BatchedEinsum& e);

// Witness that e (left side) is isomorphic to c.canonical, where c came from
// canonicalize(e).
SubstitutionWitness canonical_witness(const CanonResult& c);

// Empty why-list iff w witnesses that e1 is isomorphic to e2; every violated
// bullet of the definition is reported otherwise.
bool verify_witness(const BatchedEinsum& e1, const BatchedEinsum& e2,
                    const SubstitutionWitness& w,
                    std::vector<std::string>* why = nullptr);

// Canonical-form comparison plus a composed witness on success.
std::optional<SubstitutionWitness> is_isomorphic(const BatchedEinsum& e1,
                                                 const BatchedEinsum& e2);

// Exact reference decision procedure: enumerates row and slot bijections, the
// index/array maps they force, and checks every definition bullet. Throws
// errc::domain when b! * n! * |I_all|! * |A_all|! exceeds budget.
std::optional<SubstitutionWitness> brute_force_isomorphic(
    const BatchedEinsum& e1, const BatchedEinsum& e2,
    std::uint64_t budget = 10'000'000);

struct GenParams {
  int b_min = 1, b_max = 4;
  int n_min = 1, n_max = 4;
  int max_indices = 6;  // at most 26
  int max_dim = 3;
  std::vector<std::int64_t> shape_pool = {2, 3, 4, 5};
  std::vector<Dtype> dtype_pool = {Dtype::float64};
  bool allow_empty_out = true;
  bool allow_repeated_index = true;
};

// Deterministic per seed: one seed, one instance, byte for byte. Generated
// instances always pass validate and contain no 0-dim operands.
BatchedEinsum generate_random(const GenParams& p, std::uint64_t seed);

struct Scrambled {
  BatchedEinsum e;
  SubstitutionWitness w;  // witness that (e_scrambled, e_original) are isomorphic
};

// Random row/slot permutation plus index and array renaming; the returned
// witness passes verify_witness(scrambled.e, e, scrambled.w).
Scrambled scramble(const BatchedEinsum& e, std::uint64_t seed);

}  // namespace feinsum
