#include "feinsum/graph_canon.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "feinsum/core.hpp"

namespace feinsum {

ColoredDigraph ColoredDigraph::empty(int n_nodes) {
  ColoredDigraph g;
  g.n = n_nodes;
  g.adj.assign(static_cast<size_t>(n_nodes) * n_nodes, 0);
  g.colors.assign(n_nodes, 1);
  return g;
}

std::vector<int> Relabeling::inverse() const {
  std::vector<int> inv(perm.size());
  for (size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = static_cast<int>(i);
  return inv;
}

ColoredDigraph apply_relabeling(const ColoredDigraph& g, const Relabeling& r) {
  if (static_cast<int>(r.perm.size()) != g.n)
    throw error(errc::domain, "relabeling size does not match graph");
  ColoredDigraph out = ColoredDigraph::empty(g.n);
  for (int i = 0; i < g.n; ++i) {
    out.colors[r.perm[i]] = g.colors[i];
    for (int j = 0; j < g.n; ++j)
      if (g.edge(i, j)) out.set_edge(r.perm[i], r.perm[j]);
  }
  return out;
}

namespace {

// Ordered partition, outer order = cell order. Refinement only ever splits a
// cell in place, so cell order is stable and permutation-invariant.
using Cells = std::vector<std::vector<int>>;

struct Dsu {
  std::vector<int> p;
  explicit Dsu(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int x) {
    while (p[x] != x) x = p[x] = p[p[x]];
    return x;
  }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

struct Search {
  const ColoredDigraph& g;
  int n;
  std::vector<std::vector<int>> out_nbrs, in_nbrs;

  bool have_best = false;
  std::vector<std::uint64_t> best_cert;
  std::vector<int> best_label;  // node -> canonical position

  // Automorphism generators discovered from equal-certificate leaves. Used
  // only to skip branch candidates lying in one orbit of the subgroup fixing
  // the current individualization path (the standard sound pruning rule).
  std::vector<std::vector<int>> autos;
  std::vector<int> path;

  explicit Search(const ColoredDigraph& graph) : g(graph), n(graph.n) {
    out_nbrs.resize(n);
    in_nbrs.resize(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (g.edge(i, j)) {
          out_nbrs[i].push_back(j);
          in_nbrs[j].push_back(i);
        }
  }

  // Split every cell by the per-cell counts of out- and in-neighbors until no
  // cell splits. Subcells are ordered by their signature, which depends only
  // on the partition itself, never on node identities.
  void refine(Cells& cells) {
    std::vector<int> cell_of(n);
    bool changed = true;
    while (changed) {
      changed = false;
      for (size_t c = 0; c < cells.size(); ++c)
        for (int v : cells[c]) cell_of[v] = static_cast<int>(c);
      const int k = static_cast<int>(cells.size());

      Cells next;
      next.reserve(cells.size());
      std::vector<int> sig;
      for (auto& cell : cells) {
        if (cell.size() == 1) {
          next.push_back(cell);
          continue;
        }
        std::map<std::vector<int>, std::vector<int>> groups;
        for (int v : cell) {
          sig.assign(2 * k, 0);
          for (int u : out_nbrs[v]) ++sig[cell_of[u]];
          for (int u : in_nbrs[v]) ++sig[k + cell_of[u]];
          groups[sig].push_back(v);
        }
        if (groups.size() > 1) changed = true;
        // Descending signature order: busier nodes first, so the output index
        // of ab,ac->a style contractions gets the first canonical number.
        for (auto it = groups.rbegin(); it != groups.rend(); ++it)
          next.push_back(std::move(it->second));
      }
      cells = std::move(next);
    }
  }

  std::vector<std::uint64_t> certificate(const std::vector<int>& label) const {
    std::vector<int> inv(n);
    for (int v = 0; v < n; ++v) inv[label[v]] = v;
    const size_t bits = static_cast<size_t>(n) * n;
    std::vector<std::uint64_t> cert((bits + 63) / 64, 0);
    size_t bit = 0;
    for (int p = 0; p < n; ++p)
      for (int q = 0; q < n; ++q, ++bit)
        if (g.edge(inv[p], inv[q])) cert[bit / 64] |= 1ull << (63 - bit % 64);
    return cert;
  }

  void leaf(const Cells& cells) {
    std::vector<int> label(n);
    for (size_t p = 0; p < cells.size(); ++p) label[cells[p][0]] = static_cast<int>(p);
    auto cert = certificate(label);
    if (!have_best || cert < best_cert) {
      best_cert = std::move(cert);
      best_label = label;
      have_best = true;
      return;
    }
    if (cert == best_cert) {
      // Equal leaves compose to an automorphism: x -> best_label^-1(label(x)).
      std::vector<int> binv(n), gamma(n);
      for (int v = 0; v < n; ++v) binv[best_label[v]] = v;
      bool ident = true;
      for (int v = 0; v < n; ++v) {
        gamma[v] = binv[label[v]];
        if (gamma[v] != v) ident = false;
      }
      if (!ident) autos.push_back(std::move(gamma));
    }
  }

  void rec(Cells cells) {
    refine(cells);

    int target = -1;
    size_t target_size = 1;
    for (size_t c = 0; c < cells.size(); ++c)
      if (cells[c].size() > target_size) {
        target = static_cast<int>(c);
        target_size = cells[c].size();
      }
    if (target < 0) {
      leaf(cells);
      return;
    }

    std::vector<int> tried;
    size_t autos_seen = 0;
    Dsu orbits(n);
    for (int v : cells[target]) {
      if (!tried.empty()) {
        while (autos_seen < autos.size()) {
          const auto& a = autos[autos_seen++];
          bool fixes_path = true;
          for (int w : path)
            if (a[w] != w) {
              fixes_path = false;
              break;
            }
          if (fixes_path)
            for (int x = 0; x < n; ++x) orbits.unite(x, a[x]);
        }
        bool skip = false;
        for (int u : tried)
          if (orbits.find(u) == orbits.find(v)) {
            skip = true;
            break;
          }
        if (skip) continue;
      }
      tried.push_back(v);

      Cells child;
      child.reserve(cells.size() + 1);
      for (size_t c = 0; c < cells.size(); ++c) {
        if (static_cast<int>(c) != target) {
          child.push_back(cells[c]);
          continue;
        }
        child.push_back({v});
        std::vector<int> rest;
        for (int w : cells[c])
          if (w != v) rest.push_back(w);
        child.push_back(std::move(rest));
      }
      path.push_back(v);
      rec(std::move(child));
      path.pop_back();
    }
  }
};

}  // namespace

Relabeling canonical_labeling(const ColoredDigraph& g) {
  if (g.n == 0) return Relabeling{{}};
  if (static_cast<int>(g.colors.size()) != g.n ||
      g.adj.size() != static_cast<size_t>(g.n) * g.n)
    throw error(errc::domain, "malformed colored digraph");

  // Initial cells: one per distinct color value, ascending.
  std::map<int, std::vector<int>> by_color;
  for (int v = 0; v < g.n; ++v) by_color[g.colors[v]].push_back(v);
  Cells cells;
  for (auto& [color, members] : by_color) cells.push_back(std::move(members));

  Search s(g);
  s.rec(std::move(cells));
  return Relabeling{std::move(s.best_label)};
}

}  // namespace feinsum
