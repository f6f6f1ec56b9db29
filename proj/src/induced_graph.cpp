#include "feinsum/induced_graph.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "feinsum/rng.hpp"

namespace feinsum {

std::string default_index_name(int k) {
  if (k >= 1 && k <= 26) return std::string(1, static_cast<char>('a' + k - 1));
  return "idx" + std::to_string(k);
}

std::string default_arg_name(int k) { return "A" + std::to_string(k - 1); }

InducedGraph to_induced_graph(const BatchedEinsum& e,
                              std::optional<std::uint64_t> shuffle_seed) {
  require_valid(e);
  const auto args = universe(e);
  for (const auto& a : args)
    if (a.dim() == 0)
      throw error(errc::domain, "array " + a.name +
                                    " has 0 dims; a 0-dim operand has no access nodes "
                                    "and cannot be encoded");

  const auto indices = all_indices(e);
  const auto acc_in = input_accesses(e);
  const auto acc_out = output_accesses(e);
  const int b = e.b();
  const int n = e.n();
  const auto dts = dtypes(e);
  const auto lens = axis_lengths(e);
  const auto dims = all_dims(e);
  const int n_dim = *dims.rbegin();

  const int n_arg = static_cast<int>(args.size());
  const int n_index = static_cast<int>(indices.size());
  const int n_acc_in = static_cast<int>(acc_in.size());
  const int n_acc_out = static_cast<int>(acc_out.size());
  const int n_dtype = static_cast<int>(dts.size());
  const int n_length = static_cast<int>(lens.size());

  // Block bases, in block numbering order.
  const int arg_base = 0;
  const int index_base = arg_base + n_arg;
  const int accin_base = index_base + n_index;
  const int accout_base = accin_base + n_acc_in;
  const int output_base = accout_base + n_acc_out;
  const int argpos_base = output_base + b;
  const int dtype_base = argpos_base + n;
  const int length_base = dtype_base + n_dtype;
  const int dim_base = length_base + n_length;
  const int total = dim_base + n_dim;

  // Within-block assignment order; shuffled on request to demonstrate that
  // the enumeration choice is erased by canonicalization.
  std::vector<std::vector<int>> perms;
  for (int sz : {n_arg, n_index, n_acc_in, n_acc_out, b, n, n_dtype, n_length, n_dim})
    perms.push_back(iota_perm(sz));
  if (shuffle_seed) {
    std::mt19937_64 rng(*shuffle_seed);
    for (auto& p : perms) shuffle_vec(rng, p);
  }

  InducedGraph ig;
  ig.graph = ColoredDigraph::empty(total);

  std::map<std::string, int> arg_node, index_node;
  std::map<std::array<int, 3>, int> accin_node;  // (row, slot, dim), 1-based
  std::map<int, int> accout_node, output_node, argpos_node, dim_node;
  std::map<Dtype, int> dtype_node;
  std::map<std::int64_t, int> length_node;

  for (int i = 0; i < n_arg; ++i) {
    int v = arg_base + perms[0][i];
    arg_node[args[i].name] = v;
    ig.graph.colors[v] = color_arg;
    ig.iota_arg[v] = args[i].name;
  }
  for (int i = 0; i < n_index; ++i) {
    int v = index_base + perms[1][i];
    index_node[indices[i]] = v;
    ig.graph.colors[v] = color_index;
    ig.iota_index[v] = indices[i];
  }
  for (int i = 0; i < n_acc_in; ++i) {
    int v = accin_base + perms[2][i];
    accin_node[{acc_in[i].row, acc_in[i].slot, acc_in[i].dim}] = v;
    ig.graph.colors[v] = color_access_in;
  }
  for (int i = 0; i < n_acc_out; ++i) {
    int v = accout_base + perms[3][i];
    accout_node[acc_out[i].dim] = v;
    ig.graph.colors[v] = color_access_out;
  }
  for (int i = 0; i < b; ++i) {
    int v = output_base + perms[4][i];
    output_node[i + 1] = v;
    ig.graph.colors[v] = color_output;
    ig.iota_output[v] = i + 1;
  }
  for (int i = 0; i < n; ++i) {
    int v = argpos_base + perms[5][i];
    argpos_node[i + 1] = v;
    ig.graph.colors[v] = color_arg_pos;
    ig.iota_argpos[v] = i + 1;
  }
  {
    int i = 0;
    for (Dtype t : dts) {
      int v = dtype_base + perms[6][i++];
      dtype_node[t] = v;
      ig.graph.colors[v] = color_dtype;
      ig.iota_dtype[v] = t;
    }
  }
  {
    int i = 0;
    for (std::int64_t l : lens) {
      int v = length_base + perms[7][i++];
      length_node[l] = v;
      ig.graph.colors[v] = color_length;
      ig.iota_length[v] = l;
    }
  }
  for (int d = 1; d <= n_dim; ++d) {
    int v = dim_base + perms[8][d - 1];
    dim_node[d] = v;
    ig.graph.colors[v] = color_dim;
  }

  // Input access a = (row, slot, sym, dim): the access reads its argument, is
  // selected by its arg-pos and output, and is indexed by its index and dim.
  for (const auto& a : acc_in) {
    int m = accin_node[{a.row, a.slot, a.dim}];
    ig.graph.set_edge(m, arg_node[e.args[a.row - 1][a.slot - 1].name]);
    ig.graph.set_edge(argpos_node[a.slot], m);
    ig.graph.set_edge(output_node[a.row], m);
    ig.graph.set_edge(index_node[a.sym], m);
    ig.graph.set_edge(dim_node[a.dim], m);
  }
  for (const auto& a : acc_out) {
    int m = accout_node[a.dim];
    ig.graph.set_edge(index_node[a.sym], m);
    ig.graph.set_edge(dim_node[a.dim], m);
  }
  // Each index is tagged with its axis length, each argument with its dtype.
  for (int r = 0; r < b; ++r)
    for (int k = 0; k < n; ++k)
      for (size_t d = 0; d < e.i_in[k].size(); ++d)
        ig.graph.set_edge(length_node[e.args[r][k].shape[d]],
                          index_node[e.i_in[k][d]]);
  for (const auto& a : args)
    ig.graph.set_edge(dtype_node[a.dtype], arg_node[a.name]);

  // Rank tournaments: edge from smaller to larger value.
  for (auto i = lens.begin(); i != lens.end(); ++i)
    for (auto j = std::next(i); j != lens.end(); ++j)
      ig.graph.set_edge(length_node[*i], length_node[*j]);
  for (auto i = dts.begin(); i != dts.end(); ++i)
    for (auto j = std::next(i); j != dts.end(); ++j)
      ig.graph.set_edge(dtype_node[*i], dtype_node[*j]);
  for (int d1 = 1; d1 <= n_dim; ++d1)
    for (int d2 = d1 + 1; d2 <= n_dim; ++d2)
      ig.graph.set_edge(dim_node[d1], dim_node[d2]);

  return ig;
}

namespace {

struct GraphView {
  const ColoredDigraph& g;
  std::vector<std::vector<int>> succs, preds;
  std::vector<std::vector<int>> by_color;  // index 1..9

  explicit GraphView(const ColoredDigraph& graph) : g(graph) {
    succs.resize(g.n);
    preds.resize(g.n);
    by_color.resize(10);
    for (int v = 0; v < g.n; ++v)
      if (g.colors[v] >= 1 && g.colors[v] <= 9) by_color[g.colors[v]].push_back(v);
    for (int i = 0; i < g.n; ++i)
      for (int j = 0; j < g.n; ++j)
        if (g.edge(i, j)) {
          succs[i].push_back(j);
          preds[j].push_back(i);
        }
  }

  int count_color(const std::vector<int>& nodes, int color) const {
    int c = 0;
    for (int v : nodes)
      if (g.colors[v] == color) ++c;
    return c;
  }

  bool all_colors_in(const std::vector<int>& nodes, std::initializer_list<int> allowed) const {
    for (int v : nodes) {
      bool ok = false;
      for (int c : allowed)
        if (g.colors[v] == c) ok = true;
      if (!ok) return false;
    }
    return true;
  }

  // The single predecessor of v with the given color, or -1.
  int pred_of_color(int v, int color) const {
    int found = -1;
    for (int u : preds[v])
      if (g.colors[u] == color) {
        if (found >= 0) return -1;
        found = u;
      }
    return found;
  }
};

std::string node_str(int v, int color) {
  static const char* names[] = {"?",      "arg",     "index", "access-in", "access-out",
                                "output", "arg-pos", "dtype", "length",    "dim"};
  std::ostringstream os;
  os << "node " << v << " (" << (color >= 1 && color <= 9 ? names[color] : "?") << ")";
  return os.str();
}

// A tournament on `nodes` is transitive iff it is complete, irreflexive and
// its out-degrees within the block are pairwise distinct (score sequence
// 0..m-1). rank_out gets 1 + in-degree per node, the position in the order.
bool transitive_tournament(const GraphView& gv, const std::vector<int>& nodes,
                           std::map<int, int>* rank_out) {
  const size_t m = nodes.size();
  std::set<int> degs;
  for (int v : nodes) {
    if (gv.g.edge(v, v)) return false;
    int d = 0;
    for (int u : nodes)
      if (u != v) {
        bool vu = gv.g.edge(v, u), uv = gv.g.edge(u, v);
        if (vu == uv) return false;  // missing or doubled pair
        if (vu) ++d;
      }
    degs.insert(d);
    if (rank_out) (*rank_out)[v] = static_cast<int>(m) - d;
  }
  return degs.size() == m;
}

}  // namespace

std::vector<std::string> check_compliance(const ColoredDigraph& g) {
  std::vector<std::string> v;
  auto bad = [&v](const std::string& msg) { v.push_back(msg); };

  for (int i = 0; i < g.n; ++i)
    if (g.colors[i] < 1 || g.colors[i] > 9) {
      bad("node " + std::to_string(i) + " has color " + std::to_string(g.colors[i]) +
          ", outside 1..9");
      return v;  // classification below would be meaningless
    }

  GraphView gv(g);
  const auto& args = gv.by_color[color_arg];
  const auto& indices = gv.by_color[color_index];
  const auto& acc_in = gv.by_color[color_access_in];
  const auto& acc_out = gv.by_color[color_access_out];
  const auto& outputs = gv.by_color[color_output];
  const auto& argpos = gv.by_color[color_arg_pos];
  const auto& dts = gv.by_color[color_dtype];
  const auto& lens = gv.by_color[color_length];
  const auto& dims = gv.by_color[color_dim];

  if (outputs.empty()) bad("no output nodes (b must be >= 1)");
  if (argpos.empty()) bad("no arg-pos nodes (n must be >= 1)");

  for (int a : args) {
    if (!gv.succs[a].empty()) bad(node_str(a, color_arg) + " has successors");
    if (!gv.all_colors_in(gv.preds[a], {color_access_in, color_dtype}))
      bad(node_str(a, color_arg) + " has a predecessor outside access-in/dtype");
    if (gv.count_color(gv.preds[a], color_dtype) != 1)
      bad(node_str(a, color_arg) + " does not have exactly one dtype predecessor");
  }
  for (int t : dts) {
    if (!gv.all_colors_in(gv.preds[t], {color_dtype}))
      bad(node_str(t, color_dtype) + " has a non-dtype predecessor");
    if (!gv.all_colors_in(gv.succs[t], {color_arg, color_dtype}))
      bad(node_str(t, color_dtype) + " has a successor outside arg/dtype");
  }
  for (int m : acc_in) {
    if (!gv.all_colors_in(gv.succs[m], {color_arg}))
      bad(node_str(m, color_access_in) + " has a non-arg successor");
    bool four = gv.preds[m].size() == 4 &&
                gv.count_color(gv.preds[m], color_arg_pos) == 1 &&
                gv.count_color(gv.preds[m], color_index) == 1 &&
                gv.count_color(gv.preds[m], color_output) == 1 &&
                gv.count_color(gv.preds[m], color_dim) == 1;
    if (!four)
      bad(node_str(m, color_access_in) +
          " must have exactly four predecessors: one arg-pos, one index, one output, one dim");
  }
  for (int o : outputs) {
    if (!gv.all_colors_in(gv.succs[o], {color_access_in}))
      bad(node_str(o, color_output) + " has a successor outside access-in");
    if (!gv.preds[o].empty()) bad(node_str(o, color_output) + " has predecessors");
  }
  for (int m : acc_out) {
    if (!gv.succs[m].empty()) bad(node_str(m, color_access_out) + " has successors");
    bool two = gv.preds[m].size() == 2 && gv.count_color(gv.preds[m], color_index) == 1 &&
               gv.count_color(gv.preds[m], color_dim) == 1;
    if (!two)
      bad(node_str(m, color_access_out) +
          " must have exactly two predecessors: one index, one dim");
  }
  for (int i : indices) {
    if (!gv.all_colors_in(gv.succs[i], {color_access_in, color_access_out}))
      bad(node_str(i, color_index) + " has a successor outside access-in/access-out");
    if (gv.preds[i].size() != 1 || g.colors[gv.preds[i][0]] != color_length)
      bad(node_str(i, color_index) +
          " must have exactly one predecessor, which must be a length node");
  }
  for (int l : lens) {
    if (!gv.all_colors_in(gv.preds[l], {color_length}))
      bad(node_str(l, color_length) + " has a non-length predecessor");
    if (!gv.all_colors_in(gv.succs[l], {color_index, color_length}))
      bad(node_str(l, color_length) + " has a successor outside index/length");
  }
  for (int d : dims) {
    if (!gv.all_colors_in(gv.preds[d], {color_dim}))
      bad(node_str(d, color_dim) + " has a non-dim predecessor");
    if (!gv.all_colors_in(gv.succs[d], {color_access_in, color_access_out, color_dim}))
      bad(node_str(d, color_dim) + " has a successor outside access-in/access-out/dim");
  }
  for (int k : argpos) {
    if (!gv.preds[k].empty()) bad(node_str(k, color_arg_pos) + " has predecessors");
    if (!gv.all_colors_in(gv.succs[k], {color_access_in}))
      bad(node_str(k, color_arg_pos) + " has a successor outside access-in");
  }

  std::map<int, int> dim_rank;
  if (!transitive_tournament(gv, dims, &dim_rank))
    bad("dim block is not a transitive tournament");
  if (!transitive_tournament(gv, lens, nullptr))
    bad("length block is not a transitive tournament");
  if (!transitive_tournament(gv, dts, nullptr))
    bad("dtype block is not a transitive tournament");
  if (!v.empty()) return v;  // the relational checks below assume the above

  // Per input access: its index, dim, arg-pos and output predecessors and its
  // arg successor set.
  struct AccInfo {
    int idx, dim, pos, out;
    std::vector<int> arg_succs;
  };
  std::map<int, AccInfo> info;
  for (int m : acc_in) {
    AccInfo a;
    a.idx = gv.pred_of_color(m, color_index);
    a.dim = gv.pred_of_color(m, color_dim);
    a.pos = gv.pred_of_color(m, color_arg_pos);
    a.out = gv.pred_of_color(m, color_output);
    a.arg_succs = gv.succs[m];
    std::sort(a.arg_succs.begin(), a.arg_succs.end());
    info[m] = a;
  }

  // Shape consistency: accesses of the same argument at the same dim must use
  // indices of the same length.
  for (int m1 : acc_in)
    for (int m2 : acc_in) {
      if (m2 <= m1) continue;
      const auto& a1 = info[m1];
      const auto& a2 = info[m2];
      if (a1.arg_succs == a2.arg_succs && a1.dim == a2.dim &&
          gv.preds[a1.idx] != gv.preds[a2.idx])
        bad("accesses " + std::to_string(m1) + " and " + std::to_string(m2) +
            " read the same argument at the same dim with different index lengths");
    }

  // Every output index must be read by some input access.
  for (int m : acc_out) {
    int i = gv.pred_of_color(m, color_index);
    bool used = false;
    for (int s : gv.succs[i])
      if (g.colors[s] == color_access_in) used = true;
    if (!used)
      bad("index of " + node_str(m, color_access_out) + " does not appear in any input");
  }

  // All output indices distinct.
  {
    std::set<int> out_idx;
    for (int m : acc_out) out_idx.insert(gv.pred_of_color(m, color_index));
    if (out_idx.size() != acc_out.size()) bad("output indices are not distinct");
  }

  // The input indexing must be consistent across outputs: each (index, dim,
  // arg-pos) triple present anywhere must occur exactly once per output.
  {
    std::map<std::array<int, 4>, int> count;
    for (int m : acc_in) {
      const auto& a = info[m];
      ++count[{a.idx, a.dim, a.pos, a.out}];
    }
    std::set<std::array<int, 3>> triples;
    for (int m : acc_in) {
      const auto& a = info[m];
      triples.insert({a.idx, a.dim, a.pos});
    }
    for (const auto& t : triples)
      for (int o : outputs) {
        int c = 0;
        auto it = count.find({t[0], t[1], t[2], o});
        if (it != count.end()) c = it->second;
        if (c != 1)
          bad("access with index " + std::to_string(t[0]) + ", dim " + std::to_string(t[1]) +
              ", arg-pos " + std::to_string(t[2]) + " occurs " + std::to_string(c) +
              " times for output " + std::to_string(o) + ", expected once");
      }
  }

  // Argument resolution and dim chains per (arg-pos, output) group.
  for (int k : argpos)
    for (int o : outputs) {
      std::vector<int> group;
      for (int m : acc_in)
        if (info[m].pos == k && info[m].out == o) group.push_back(m);

      std::set<int> arg_union;
      for (int m : group) arg_union.insert(info[m].arg_succs.begin(), info[m].arg_succs.end());
      if (arg_union.size() != 1)
        bad("arg-pos " + std::to_string(k) + " with output " + std::to_string(o) +
            " resolves to " + std::to_string(arg_union.size()) + " arguments, expected one");

      // Dim ranks must be exactly 1..|group|: every operand is indexed by one
      // access per dimension, dimensions consecutive from the first.
      std::set<int> ranks;
      for (int m : group) ranks.insert(dim_rank[info[m].dim]);
      bool chain = ranks.size() == group.size() &&
                   (group.empty() || (*ranks.begin() == 1 &&
                                      *ranks.rbegin() == static_cast<int>(group.size())));
      if (!chain)
        bad("accesses of arg-pos " + std::to_string(k) + " with output " + std::to_string(o) +
            " do not form a consecutive dimension chain");
    }

  // Same chain condition for the output accesses (vacuous when there are none).
  if (!acc_out.empty()) {
    std::set<int> ranks;
    for (int m : acc_out) ranks.insert(dim_rank[gv.pred_of_color(m, color_dim)]);
    bool chain = ranks.size() == acc_out.size() && *ranks.begin() == 1 &&
                 *ranks.rbegin() == static_cast<int>(acc_out.size());
    if (!chain) bad("output accesses do not form a consecutive dimension chain");
  }

  return v;
}

Reconstruction to_batched_einsum(const ColoredDigraph& g,
                                 const std::map<int, Dtype>& iota_dtype,
                                 const std::map<int, std::int64_t>& iota_length) {
  {
    auto viols = check_compliance(g);
    if (!viols.empty()) {
      std::string msg = "graph is not a valid encoding:";
      for (const auto& s : viols) msg += "\n  " + s;
      throw error(errc::domain, msg);
    }
  }

  GraphView gv(g);
  const auto& acc_in = gv.by_color[color_access_in];
  const auto& acc_out = gv.by_color[color_access_out];

  for (int t : gv.by_color[color_dtype])
    if (!iota_dtype.count(t))
      throw error(errc::domain, "iota_dtype does not cover " + node_str(t, color_dtype));
  for (int l : gv.by_color[color_length])
    if (!iota_length.count(l))
      throw error(errc::domain, "iota_length does not cover " + node_str(l, color_length));

  Reconstruction rec;
  // Inferred numberings: ascending node label within each block, and dim rank
  // from the tournament (1 + number of dim predecessors).
  auto number = [](const std::vector<int>& nodes, std::map<int, int>& out) {
    int k = 1;
    for (int v : nodes) out[v] = k++;
  };
  number(gv.by_color[color_arg_pos], rec.iota_argpos_inferred);
  number(gv.by_color[color_output], rec.iota_output_inferred);
  number(gv.by_color[color_index], rec.iota_index_inferred);
  number(gv.by_color[color_arg], rec.iota_arg_inferred);

  std::map<int, int> dim_rank;
  transitive_tournament(gv, gv.by_color[color_dim], &dim_rank);

  const int b = static_cast<int>(gv.by_color[color_output].size());
  const int n = static_cast<int>(gv.by_color[color_arg_pos].size());

  struct AccInfo {
    int idx, rank, pos, out, arg;
  };
  std::vector<AccInfo> info;
  info.reserve(acc_in.size());
  for (int m : acc_in) {
    AccInfo a;
    a.idx = gv.pred_of_color(m, color_index);
    a.rank = dim_rank[gv.pred_of_color(m, color_dim)];
    a.pos = rec.iota_argpos_inferred[gv.pred_of_color(m, color_arg_pos)];
    a.out = rec.iota_output_inferred[gv.pred_of_color(m, color_output)];
    a.arg = gv.succs[m].empty() ? -1 : gv.succs[m][0];
    info.push_back(a);
  }

  BatchedEinsum e;
  e.i_out.resize(acc_out.size());
  for (int m : acc_out) {
    int d = dim_rank[gv.pred_of_color(m, color_dim)];
    int i = gv.pred_of_color(m, color_index);
    e.i_out[d - 1] = default_index_name(rec.iota_index_inferred[i]);
  }

  // Slot index lists: the index read at (slot, dim) is the same for every
  // output, so any access at that position determines it.
  e.i_in.resize(n);
  std::vector<std::vector<int>> slot_idx_node(n);  // per slot, per dim, index node
  for (int j = 0; j < n; ++j) {
    int arg_dim = 0;
    for (const auto& a : info)
      if (a.pos == j + 1) arg_dim = std::max(arg_dim, a.rank);
    e.i_in[j].resize(arg_dim);
    slot_idx_node[j].assign(arg_dim, -1);
    for (const auto& a : info)
      if (a.pos == j + 1) {
        if (slot_idx_node[j][a.rank - 1] >= 0 && slot_idx_node[j][a.rank - 1] != a.idx)
          throw error(errc::domain, "slot " + std::to_string(j + 1) + " dim " +
                                        std::to_string(a.rank) +
                                        " is read through two different indices");
        slot_idx_node[j][a.rank - 1] = a.idx;
        e.i_in[j][a.rank - 1] = default_index_name(rec.iota_index_inferred[a.idx]);
      }
  }

  // Argument matrix: the arg of (row, slot) is the common successor of that
  // group's accesses; its shape comes from the slot's index lengths and its
  // dtype from the arg's dtype predecessor.
  e.args.assign(b, std::vector<ArrayMeta>(n));
  for (int r = 0; r < b; ++r)
    for (int j = 0; j < n; ++j) {
      int arg = -1;
      for (const auto& a : info)
        if (a.pos == j + 1 && a.out == r + 1 && a.arg >= 0) arg = a.arg;
      if (arg < 0)
        throw error(errc::domain, "no argument for row " + std::to_string(r + 1) +
                                      " slot " + std::to_string(j + 1));
      ArrayMeta& meta = e.args[r][j];
      meta.name = default_arg_name(rec.iota_arg_inferred[arg]);
      meta.dtype = iota_dtype.at(gv.pred_of_color(arg, color_dtype));
      for (int idx_node : slot_idx_node[j])
        meta.shape.push_back(iota_length.at(gv.preds[idx_node][0]));
    }

  rec.e = std::move(e);
  require_valid(rec.e);
  return rec;
}

std::string to_dot(const InducedGraph& ig) {
  static const char* fill[] = {"white",   "lightblue", "khaki",  "palegreen", "pink",
                               "orange",  "gray80",    "plum",   "lightcyan", "salmon"};
  std::ostringstream os;
  os << "digraph induced {\n  rankdir=LR;\n  node [style=filled];\n";
  const ColoredDigraph& g = ig.graph;
  for (int v = 0; v < g.n; ++v) {
    std::string label = node_str(v, g.colors[v]);
    if (auto it = ig.iota_arg.find(v); it != ig.iota_arg.end())
      label += "\\n" + it->second;
    if (auto it = ig.iota_index.find(v); it != ig.iota_index.end())
      label += "\\n" + it->second;
    if (auto it = ig.iota_length.find(v); it != ig.iota_length.end())
      label += "\\n" + std::to_string(it->second);
    if (auto it = ig.iota_dtype.find(v); it != ig.iota_dtype.end())
      label += std::string("\\n") + dtype_name(it->second);
    os << "  n" << v << " [label=\"" << label << "\", fillcolor="
       << fill[g.colors[v] >= 1 && g.colors[v] <= 9 ? g.colors[v] : 0] << "];\n";
  }
  for (int i = 0; i < g.n; ++i)
    for (int j = 0; j < g.n; ++j)
      if (g.edge(i, j)) os << "  n" << i << " -> n" << j << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace feinsum
