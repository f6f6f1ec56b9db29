#include "feinsum/graph_canon.hpp"

#include <algorithm>

#include "doctest.h"
#include "feinsum/rng.hpp"

using namespace feinsum;

namespace {

ColoredDigraph relabel_by(const ColoredDigraph& g, const std::vector<int>& perm) {
  return apply_relabeling(g, Relabeling{perm});
}

// All permutations of 0..n-1, n small.
std::vector<std::vector<int>> all_perms(int n) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  std::vector<std::vector<int>> out;
  do out.push_back(p);
  while (std::next_permutation(p.begin(), p.end()));
  return out;
}

ColoredDigraph random_graph(std::mt19937_64& rng, int n, int n_colors) {
  ColoredDigraph g = ColoredDigraph::empty(n);
  for (int i = 0; i < n; ++i) {
    g.colors[i] = 1 + static_cast<int>(draw_below(rng, n_colors));
    for (int j = 0; j < n; ++j)
      if (rng() & 1) g.set_edge(i, j);
  }
  return g;
}

std::vector<int> random_perm(std::mt19937_64& rng, int n) {
  auto p = iota_perm(n);
  shuffle_vec(rng, p);
  return p;
}

}  // namespace

TEST_CASE("apply_relabeling moves edges and colors together") {
  // 0 -> 1 with colors (2,1,1); send 0 to position 2, 1 to 0, 2 to 1
  ColoredDigraph g = ColoredDigraph::empty(3);
  g.colors = {2, 1, 1};
  g.set_edge(0, 1);
  ColoredDigraph h = relabel_by(g, {2, 0, 1});
  CHECK(h.colors == std::vector<int>{1, 1, 2});
  CHECK(h.edge(2, 0));
  int edges = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) edges += h.edge(i, j);
  CHECK(edges == 1);
}

TEST_CASE("Relabeling::inverse composes to the identity") {
  Relabeling r{{2, 0, 1, 4, 3}};
  auto inv = r.inverse();
  for (int i = 0; i < 5; ++i) CHECK(inv[r.perm[i]] == i);
}

TEST_CASE("canonical form is invariant: exhaustive 3-node sweep") {
  // every digraph on 3 nodes (self-loops included) with colors in {1,2},
  // against every relabeling of it
  auto perms = all_perms(3);
  int classes_hit = 0;
  for (int bits = 0; bits < (1 << 9); ++bits) {
    for (int cbits = 0; cbits < (1 << 3); ++cbits) {
      ColoredDigraph g = ColoredDigraph::empty(3);
      for (int k = 0; k < 9; ++k)
        if (bits & (1 << k)) g.set_edge(k / 3, k % 3);
      for (int i = 0; i < 3; ++i) g.colors[i] = 1 + ((cbits >> i) & 1);

      ColoredDigraph f = canonical_form(g);
      REQUIRE(std::is_sorted(f.colors.begin(), f.colors.end()));
      REQUIRE(canonical_form(f) == f);
      for (const auto& p : perms) REQUIRE(canonical_form(relabel_by(g, p)) == f);
      ++classes_hit;
    }
  }
  CHECK(classes_hit == 512 * 8);
}

TEST_CASE("canonical form is invariant: random 4-6 node graphs") {
  std::mt19937_64 rng(2024);
  for (int n = 4; n <= 6; ++n) {
    int reps = n == 6 ? 120 : 300;
    for (int t = 0; t < reps; ++t) {
      ColoredDigraph g = random_graph(rng, n, 3);
      ColoredDigraph f = canonical_form(g);
      CHECK(std::is_sorted(f.colors.begin(), f.colors.end()));
      for (int k = 0; k < 4; ++k)
        REQUIRE(canonical_form(relabel_by(g, random_perm(rng, n))) == f);
    }
  }
}

TEST_CASE("canonical form separates non-isomorphic graphs") {
  // directed 3-cycle vs transitive triangle: same degrees in total, different graphs
  ColoredDigraph cyc = ColoredDigraph::empty(3);
  cyc.colors = {1, 1, 1};
  cyc.set_edge(0, 1);
  cyc.set_edge(1, 2);
  cyc.set_edge(2, 0);
  ColoredDigraph tri = cyc;
  tri.adj.assign(9, 0);
  tri.set_edge(0, 1);
  tri.set_edge(0, 2);
  tri.set_edge(1, 2);
  CHECK_FALSE(canonical_form(cyc) == canonical_form(tri));

  // same digraph, different coloring: also distinct
  ColoredDigraph cyc2 = cyc;
  cyc2.colors = {1, 1, 2};
  CHECK_FALSE(canonical_form(cyc) == canonical_form(cyc2));
}

TEST_CASE("highly symmetric graphs stay fast and stable") {
  std::mt19937_64 rng(99);
  SUBCASE("empty and complete on one color") {
    for (int n : {6, 9}) {
      ColoredDigraph g = ColoredDigraph::empty(n);
      g.colors.assign(n, 1);
      CHECK(canonical_form(g) == g);  // nothing to reorder
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (i != j) g.set_edge(i, j);
      CHECK(canonical_form(g) == g);
    }
  }
  SUBCASE("directed cycle: rotations collapse") {
    const int n = 8;
    ColoredDigraph g = ColoredDigraph::empty(n);
    g.colors.assign(n, 1);
    for (int i = 0; i < n; ++i) g.set_edge(i, (i + 1) % n);
    ColoredDigraph f = canonical_form(g);
    for (int t = 0; t < 6; ++t)
      CHECK(canonical_form(relabel_by(g, random_perm(rng, n))) == f);
  }
  SUBCASE("two identical components double the automorphisms") {
    const int n = 10;  // two disjoint directed 5-cycles
    ColoredDigraph g = ColoredDigraph::empty(n);
    g.colors.assign(n, 1);
    for (int i = 0; i < 5; ++i) {
      g.set_edge(i, (i + 1) % 5);
      g.set_edge(5 + i, 5 + (i + 1) % 5);
    }
    ColoredDigraph f = canonical_form(g);
    for (int t = 0; t < 6; ++t)
      CHECK(canonical_form(relabel_by(g, random_perm(rng, n))) == f);
  }
}

TEST_CASE("transitive tournaments canonicalize regardless of input order") {
  const int n = 7;
  ColoredDigraph g = ColoredDigraph::empty(n);
  g.colors.assign(n, 1);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) g.set_edge(i, j);
  ColoredDigraph f = canonical_form(g);
  std::mt19937_64 rng(5);
  for (int t = 0; t < 10; ++t)
    CHECK(canonical_form(relabel_by(g, random_perm(rng, n))) == f);
  // a tournament is rigid, so the canonical form is a transitive tournament too
  int edges = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) edges += f.edge(i, j);
  CHECK(edges == n * (n - 1) / 2);
}

TEST_CASE("single node and discrete colorings") {
  ColoredDigraph one = ColoredDigraph::empty(1);
  one.colors = {4};
  CHECK(canonical_form(one) == one);
  one.set_edge(0, 0);
  CHECK(canonical_form(one) == one);

  // all colors distinct: the canonical order is the color order
  ColoredDigraph g = ColoredDigraph::empty(3);
  g.colors = {3, 1, 2};
  g.set_edge(0, 1);  // color 3 node -> color 1 node
  ColoredDigraph f = canonical_form(g);
  CHECK(f.colors == std::vector<int>{1, 2, 3});
  CHECK(f.edge(2, 0));
}

TEST_CASE("color values only matter through their order") {
  std::mt19937_64 rng(31);
  for (int t = 0; t < 50; ++t) {
    ColoredDigraph g = random_graph(rng, 5, 2);  // colors in {1,2}
    ColoredDigraph h = g;
    for (auto& c : h.colors) c = c == 1 ? 17 : 900;  // same order, new values
    auto fg = canonical_form(g);
    auto fh = canonical_form(h);
    CHECK(fg.adj == fh.adj);
  }
}
