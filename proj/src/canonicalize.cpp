#include "feinsum/canonicalize.hpp"

#include <algorithm>
#include <sstream>

#include "feinsum/graph_canon.hpp"
#include "feinsum/rng.hpp"

namespace feinsum {

CanonResult canonicalize(const BatchedEinsum& e) {
  InducedGraph ig = to_induced_graph(e);
  Relabeling r = canonical_labeling(ig.graph);
  ColoredDigraph cg = apply_relabeling(ig.graph, r);

  std::map<int, Dtype> cdtype;
  std::map<int, std::int64_t> clength;
  for (const auto& [node, t] : ig.iota_dtype) cdtype[r.perm[node]] = t;
  for (const auto& [node, l] : ig.iota_length) clength[r.perm[node]] = l;

  Reconstruction rec = to_batched_einsum(cg, cdtype, clength);

  CanonResult out;
  out.canonical = rec.e;
  for (const auto& [node, sym] : ig.iota_index)
    out.sigma_idx[default_index_name(rec.iota_index_inferred.at(r.perm[node]))] = sym;
  for (const auto& [node, name] : ig.iota_arg)
    out.sigma_arg[default_arg_name(rec.iota_arg_inferred.at(r.perm[node]))] = name;
  out.sigma_row.assign(e.b(), -1);
  for (const auto& [node, row] : ig.iota_output)
    out.sigma_row[rec.iota_output_inferred.at(r.perm[node]) - 1] = row - 1;
  out.sigma_slot.assign(e.n(), -1);
  for (const auto& [node, slot] : ig.iota_argpos)
    out.sigma_slot[rec.iota_argpos_inferred.at(r.perm[node]) - 1] = slot - 1;
  return out;
}

SubstitutionWitness canonical_witness(const CanonResult& c) {
  SubstitutionWitness w;
  w.sigma_idx = c.sigma_idx;
  w.sigma_arg = c.sigma_arg;
  w.sigma_row.assign(c.sigma_row.size(), -1);
  for (size_t q = 0; q < c.sigma_row.size(); ++q)
    w.sigma_row[c.sigma_row[q]] = static_cast<int>(q);
  w.sigma_slot.assign(c.sigma_slot.size(), -1);
  for (size_t q = 0; q < c.sigma_slot.size(); ++q)
    w.sigma_slot[c.sigma_slot[q]] = static_cast<int>(q);
  return w;
}

namespace {

bool is_permutation_of(const std::vector<int>& p, int n) {
  if (static_cast<int>(p.size()) != n) return false;
  std::vector<bool> seen(n, false);
  for (int x : p) {
    if (x < 0 || x >= n || seen[x]) return false;
    seen[x] = true;
  }
  return true;
}

// Keys of m must be exactly `from`, values a bijection onto a subset of `to`.
bool is_bijection(const std::map<std::string, std::string>& m,
                  const std::vector<std::string>& from, const std::vector<std::string>& to,
                  std::string* msg) {
  std::set<std::string> from_set(from.begin(), from.end());
  std::set<std::string> to_set(to.begin(), to.end());
  if (from_set.size() != to_set.size()) {
    *msg = "domain and codomain sizes differ";
    return false;
  }
  std::set<std::string> hit;
  for (const auto& s : from_set) {
    auto it = m.find(s);
    if (it == m.end()) {
      *msg = "no image for " + s;
      return false;
    }
    if (!to_set.count(it->second)) {
      *msg = "image " + it->second + " of " + s + " is not on the other side";
      return false;
    }
    if (!hit.insert(it->second).second) {
      *msg = "two symbols map to " + it->second;
      return false;
    }
  }
  return true;
}

}  // namespace

bool verify_witness(const BatchedEinsum& e1, const BatchedEinsum& e2,
                    const SubstitutionWitness& w, std::vector<std::string>* why) {
  std::vector<std::string> local;
  std::vector<std::string>& out = why ? *why : local;
  out.clear();

  if (e1.b() != e2.b()) out.push_back("row counts differ");
  if (e1.n() != e2.n()) out.push_back("slot counts differ");
  if (!out.empty()) return false;
  const int b = e1.b(), n = e1.n();

  if (!is_permutation_of(w.sigma_row, b)) out.push_back("sigma_row is not a row bijection");
  if (!is_permutation_of(w.sigma_slot, n)) out.push_back("sigma_slot is not a slot bijection");

  {
    std::string msg;
    if (!is_bijection(w.sigma_idx, all_indices(e2), all_indices(e1), &msg))
      out.push_back("sigma_idx is not an index bijection: " + msg);
    std::vector<std::string> names1, names2;
    for (const auto& a : universe(e1)) names1.push_back(a.name);
    for (const auto& a : universe(e2)) names2.push_back(a.name);
    if (!is_bijection(w.sigma_arg, names2, names1, &msg))
      out.push_back("sigma_arg is not an array bijection: " + msg);
  }
  if (!out.empty()) return false;

  // Index lists must correspond positionwise through sigma_idx.
  if (e1.i_out.size() != e2.i_out.size()) {
    out.push_back("output index lists have different lengths");
  } else {
    for (size_t d = 0; d < e1.i_out.size(); ++d)
      if (e1.i_out[d] != w.sigma_idx.at(e2.i_out[d])) {
        std::ostringstream os;
        os << "output position " << d + 1 << ": " << e1.i_out[d] << " vs sigma("
           << e2.i_out[d] << ") = " << w.sigma_idx.at(e2.i_out[d]);
        out.push_back(os.str());
      }
  }
  for (int j = 0; j < n; ++j) {
    const auto& l1 = e1.i_in[j];
    const auto& l2 = e2.i_in[w.sigma_slot[j]];
    if (l1.size() != l2.size()) {
      std::ostringstream os;
      os << "slot " << j + 1 << " and its image have different arity";
      out.push_back(os.str());
      continue;
    }
    for (size_t d = 0; d < l1.size(); ++d)
      if (l1[d] != w.sigma_idx.at(l2[d])) {
        std::ostringstream os;
        os << "slot " << j + 1 << " position " << d + 1 << ": " << l1[d] << " vs sigma("
           << l2[d] << ") = " << w.sigma_idx.at(l2[d]);
        out.push_back(os.str());
      }
  }

  // Arguments must correspond cellwise through sigma_arg with equal metadata.
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < n; ++j) {
      const ArrayMeta& a1 = e1.args[i][j];
      const ArrayMeta& a2 = e2.args[w.sigma_row[i]][w.sigma_slot[j]];
      if (a1.name != w.sigma_arg.at(a2.name)) {
        std::ostringstream os;
        os << "row " << i + 1 << " slot " << j + 1 << ": array " << a1.name
           << " vs sigma(" << a2.name << ") = " << w.sigma_arg.at(a2.name);
        out.push_back(os.str());
      }
      if (a1.shape != a2.shape || a1.dtype != a2.dtype) {
        std::ostringstream os;
        os << "row " << i + 1 << " slot " << j + 1 << ": shape or dtype differs from image";
        out.push_back(os.str());
      }
    }

  return out.empty();
}

std::optional<SubstitutionWitness> is_isomorphic(const BatchedEinsum& e1,
                                                 const BatchedEinsum& e2) {
  CanonResult c1 = canonicalize(e1);
  CanonResult c2 = canonicalize(e2);
  if (!equals(c1.canonical, c2.canonical)) return std::nullopt;

  // Compose through the shared canonical form.
  SubstitutionWitness w;
  for (const auto& [canon, orig2] : c2.sigma_idx) w.sigma_idx[orig2] = c1.sigma_idx.at(canon);
  for (const auto& [canon, orig2] : c2.sigma_arg) w.sigma_arg[orig2] = c1.sigma_arg.at(canon);
  w.sigma_row.assign(e1.b(), -1);
  for (int q = 0; q < e1.b(); ++q) w.sigma_row[c1.sigma_row[q]] = c2.sigma_row[q];
  w.sigma_slot.assign(e1.n(), -1);
  for (int q = 0; q < e1.n(); ++q) w.sigma_slot[c1.sigma_slot[q]] = c2.sigma_slot[q];
  return w;
}

std::optional<SubstitutionWitness> brute_force_isomorphic(const BatchedEinsum& e1,
                                                          const BatchedEinsum& e2,
                                                          std::uint64_t budget) {
  require_valid(e1);
  require_valid(e2);

  auto fact_mul = [](std::uint64_t acc, int k) {
    for (int i = 2; i <= k; ++i) {
      if (acc > UINT64_MAX / static_cast<std::uint64_t>(i)) return UINT64_MAX;
      acc *= static_cast<std::uint64_t>(i);
    }
    return acc;
  };
  std::uint64_t cost = 1;
  cost = fact_mul(cost, e1.b());
  cost = fact_mul(cost, e1.n());
  cost = fact_mul(cost, static_cast<int>(all_indices(e1).size()));
  cost = fact_mul(cost, static_cast<int>(universe(e1).size()));
  if (cost > budget)
    throw error(errc::domain, "brute force budget exceeded: " + std::to_string(cost) +
                                  " candidate substitutions > " + std::to_string(budget));

  if (e1.b() != e2.b() || e1.n() != e2.n()) return std::nullopt;
  const int b = e1.b(), n = e1.n();

  std::vector<int> rows(b), slots(n);
  for (int i = 0; i < b; ++i) rows[i] = i;

  do {
    for (int j = 0; j < n; ++j) slots[j] = j;
    do {
      // The index and array maps are forced positionwise; derive and check.
      SubstitutionWitness w;
      w.sigma_row = rows;
      w.sigma_slot = slots;

      bool ok = true;
      auto force = [&ok](std::map<std::string, std::string>& m, const std::string& from,
                         const std::string& to) {
        auto [it, fresh] = m.emplace(from, to);
        if (!fresh && it->second != to) ok = false;
      };

      for (int j = 0; j < n && ok; ++j) {
        const auto& l1 = e1.i_in[j];
        const auto& l2 = e2.i_in[slots[j]];
        if (l1.size() != l2.size()) {
          ok = false;
          break;
        }
        for (size_t d = 0; d < l1.size() && ok; ++d) force(w.sigma_idx, l2[d], l1[d]);
      }
      if (ok && e1.i_out.size() == e2.i_out.size())
        for (size_t d = 0; d < e1.i_out.size() && ok; ++d)
          force(w.sigma_idx, e2.i_out[d], e1.i_out[d]);

      for (int i = 0; i < b && ok; ++i)
        for (int j = 0; j < n && ok; ++j)
          force(w.sigma_arg, e2.args[rows[i]][slots[j]].name, e1.args[i][j].name);

      if (ok && verify_witness(e1, e2, w)) return w;
    } while (std::next_permutation(slots.begin(), slots.end()));
  } while (std::next_permutation(rows.begin(), rows.end()));

  return std::nullopt;
}

BatchedEinsum generate_random(const GenParams& p, std::uint64_t seed) {
  if (p.b_min < 1 || p.b_min > p.b_max || p.n_min < 1 || p.n_min > p.n_max)
    throw error(errc::domain, "generator: empty row or slot range");
  if (p.max_indices < 1 || p.max_indices > 26)
    throw error(errc::domain, "generator: max_indices must be in 1..26");
  if (p.max_dim < 1) throw error(errc::domain, "generator: max_dim must be >= 1");
  if (p.shape_pool.empty() || p.dtype_pool.empty())
    throw error(errc::domain, "generator: empty shape or dtype pool");
  for (auto l : p.shape_pool)
    if (l < 1) throw error(errc::domain, "generator: shape pool entries must be positive");

  std::mt19937_64 rng(seed);
  BatchedEinsum e;
  const int b = static_cast<int>(draw_range(rng, p.b_min, p.b_max));
  const int n = static_cast<int>(draw_range(rng, p.n_min, p.n_max));
  const int n_idx = static_cast<int>(draw_range(rng, 1, p.max_indices));

  std::vector<std::string> syms;
  std::map<std::string, std::int64_t> len;
  for (int k = 1; k <= n_idx; ++k) {
    syms.push_back(default_index_name(k));
    len[syms.back()] = p.shape_pool[draw_below(rng, p.shape_pool.size())];
  }

  e.i_in.resize(n);
  for (int j = 0; j < n; ++j) {
    int dim = static_cast<int>(draw_range(rng, 1, p.max_dim));
    for (int d = 0; d < dim; ++d) {
      std::string s = syms[draw_below(rng, syms.size())];
      if (!p.allow_repeated_index) {
        int guard = 0;
        while (std::count(e.i_in[j].begin(), e.i_in[j].end(), s) && ++guard < 64)
          s = syms[draw_below(rng, syms.size())];
        if (std::count(e.i_in[j].begin(), e.i_in[j].end(), s)) break;
      }
      e.i_in[j].push_back(s);
    }
  }

  std::vector<std::string> used = [&] {
    std::vector<std::string> u;
    std::set<std::string> seen;
    for (const auto& l2 : e.i_in)
      for (const auto& s : l2)
        if (seen.insert(s).second) u.push_back(s);
    return u;
  }();

  std::vector<std::string> out_pool = used;
  shuffle_vec(rng, out_pool);
  for (const auto& s : out_pool)
    if (draw_below(rng, 2) == 0) e.i_out.push_back(s);
  if (e.i_out.empty() && !p.allow_empty_out)
    e.i_out.push_back(out_pool[draw_below(rng, out_pool.size())]);

  // Arrays keyed by shape so reuse across cells is always consistent.
  std::map<std::vector<std::int64_t>, std::vector<ArrayMeta>> made;
  int counter = 0;
  e.args.assign(b, std::vector<ArrayMeta>(n));
  for (int r = 0; r < b; ++r)
    for (int j = 0; j < n; ++j) {
      std::vector<std::int64_t> shape;
      for (const auto& s : e.i_in[j]) shape.push_back(len[s]);
      auto& bucket = made[shape];
      if (!bucket.empty() && draw_below(rng, 2) == 0) {
        e.args[r][j] = bucket[draw_below(rng, bucket.size())];
      } else {
        ArrayMeta a;
        a.name = "T" + std::to_string(counter++);
        a.shape = shape;
        a.dtype = p.dtype_pool[draw_below(rng, p.dtype_pool.size())];
        bucket.push_back(a);
        e.args[r][j] = a;
      }
    }

  require_valid(e);
  return e;
}

Scrambled scramble(const BatchedEinsum& e, std::uint64_t seed) {
  require_valid(e);
  std::mt19937_64 rng(seed);
  const int b = e.b(), n = e.n();

  std::vector<int> rho = iota_perm(b);   // scrambled row i holds original row rho[i]
  std::vector<int> tau = iota_perm(n);   // scrambled slot j holds original slot tau[j]
  shuffle_vec(rng, rho);
  shuffle_vec(rng, tau);

  const auto idx = all_indices(e);
  std::map<std::string, std::string> f;  // original index -> new index
  {
    std::vector<std::string> pool;
    if (idx.size() <= 26)
      for (int k = 1; k <= 26; ++k) pool.push_back(default_index_name(k));
    else
      for (size_t k = 0; k < idx.size(); ++k) pool.push_back("x" + std::to_string(k));
    shuffle_vec(rng, pool);
    for (size_t i = 0; i < idx.size(); ++i) f[idx[i]] = pool[i];
  }
  std::map<std::string, std::string> g;  // original array name -> new name
  {
    const auto uni = universe(e);
    std::vector<std::string> pool;
    for (size_t k = 0; k < uni.size(); ++k) pool.push_back("S" + std::to_string(k));
    shuffle_vec(rng, pool);
    for (size_t i = 0; i < uni.size(); ++i) g[uni[i].name] = pool[i];
  }

  Scrambled out;
  for (const auto& s : e.i_out) out.e.i_out.push_back(f[s]);
  out.e.i_in.resize(n);
  for (int j = 0; j < n; ++j)
    for (const auto& s : e.i_in[tau[j]]) out.e.i_in[j].push_back(f[s]);
  out.e.args.assign(b, std::vector<ArrayMeta>(n));
  for (int i = 0; i < b; ++i)
    for (int j = 0; j < n; ++j) {
      const ArrayMeta& src = e.args[rho[i]][tau[j]];
      out.e.args[i][j] = ArrayMeta{g[src.name], src.shape, src.dtype};
    }

  out.w.sigma_row = rho;
  out.w.sigma_slot = tau;
  for (const auto& [orig, fresh] : f) out.w.sigma_idx[orig] = fresh;
  for (const auto& [orig, fresh] : g) out.w.sigma_arg[orig] = fresh;
  require_valid(out.e);
  return out;
}

}  // namespace feinsum
