#pragma once

#include <cstdint>
#include <vector>

namespace feinsum {

// Directed graph with positive integer node colors. Adjacency is dense
// row-major: adj[i*n + j] == 1 means an edge i -> j.
struct ColoredDigraph {
  int n = 0;
  std::vector<std::uint8_t> adj;
  std::vector<int> colors;

  static ColoredDigraph empty(int n_nodes);

  bool edge(int i, int j) const {
    return adj[static_cast<size_t>(i) * n + j] != 0;
  }
  void set_edge(int i, int j) { adj[static_cast<size_t>(i) * n + j] = 1; }

  friend bool operator==(const ColoredDigraph&, const ColoredDigraph&) = default;
};

// perm[i] is the canonical position of node i. Color-preserving: node i and
// position perm[i] carry the same color once applied.
struct Relabeling {
  std::vector<int> perm;

  std::vector<int> inverse() const;
};

// Individualization-refinement canonical labeling. The relabeled graph
// (apply_relabeling(g, canonical_labeling(g))) is identical for every member
// of g's color-preserving isomorphism class. Color values only matter through
// their relative order; the search normalizes them to 1..k internally.
Relabeling canonical_labeling(const ColoredDigraph& g);

// A'[r(i)][r(j)] = A[i][j], c'[r(i)] = c[i].
ColoredDigraph apply_relabeling(const ColoredDigraph& g, const Relabeling& r);

inline ColoredDigraph canonical_form(const ColoredDigraph& g) {
  return apply_relabeling(g, canonical_labeling(g));
}

}  // namespace feinsum
