#include "feinsum/core.hpp"

#include <algorithm>
#include <sstream>

namespace feinsum {

int dtype_size_bytes(Dtype t) {
  switch (t) {
    case Dtype::int8: return 1;
    case Dtype::int32: return 4;
    case Dtype::int64: return 8;
    case Dtype::float16: return 2;
    case Dtype::float32: return 4;
    case Dtype::float64: return 8;
    case Dtype::complex64: return 8;
    case Dtype::complex128: return 16;
  }
  throw error(errc::domain, "bad dtype code");
}

const char* dtype_name(Dtype t) {
  switch (t) {
    case Dtype::int8: return "int8";
    case Dtype::int32: return "int32";
    case Dtype::int64: return "int64";
    case Dtype::float16: return "float16";
    case Dtype::float32: return "float32";
    case Dtype::float64: return "float64";
    case Dtype::complex64: return "complex64";
    case Dtype::complex128: return "complex128";
  }
  throw error(errc::domain, "bad dtype code");
}

Dtype dtype_from_name(const std::string& s) {
  static const std::pair<const char*, Dtype> table[] = {
      {"int8", Dtype::int8},       {"int32", Dtype::int32},
      {"int64", Dtype::int64},     {"float16", Dtype::float16},
      {"float32", Dtype::float32}, {"float64", Dtype::float64},
      {"complex64", Dtype::complex64}, {"complex128", Dtype::complex128},
  };
  for (const auto& [name, t] : table)
    if (s == name) return t;
  throw error(errc::domain, "unknown dtype: " + s);
}

std::int64_t ArrayMeta::num_elements() const {
  std::int64_t p = 1;
  for (auto d : shape) p *= d;
  return p;
}

static std::string join_syms(const IndexList& l) {
  std::string s;
  for (size_t i = 0; i < l.size(); ++i) {
    if (i) s += ",";
    s += l[i];
  }
  return s;
}

std::vector<std::string> validate(const BatchedEinsum& e) {
  std::vector<std::string> v;
  const int b = e.b();
  const int n = e.n();
  if (b < 1) v.push_back("b must be >= 1 (no rows)");
  if (n < 1) v.push_back("n must be >= 1 (no operand slots)");

  bool widths_ok = true;
  for (int r = 0; r < b; ++r) {
    if (static_cast<int>(e.args[r].size()) != n) {
      std::ostringstream os;
      os << "row " << r + 1 << " has " << e.args[r].size() << " args, expected " << n;
      v.push_back(os.str());
      widths_ok = false;
    }
  }
  if (!widths_ok || b < 1 || n < 1) return v;

  // One metadata per array name, positive axis lengths, nonempty names.
  std::map<std::string, const ArrayMeta*> by_name;
  for (int r = 0; r < b; ++r) {
    for (int k = 0; k < n; ++k) {
      const ArrayMeta& a = e.args[r][k];
      if (a.name.empty()) {
        std::ostringstream os;
        os << "row " << r + 1 << " slot " << k + 1 << ": array name is empty";
        v.push_back(os.str());
        continue;
      }
      for (size_t d = 0; d < a.shape.size(); ++d) {
        if (a.shape[d] < 1) {
          std::ostringstream os;
          os << "array " << a.name << " axis " << d + 1 << " has nonpositive length "
             << a.shape[d];
          v.push_back(os.str());
        }
      }
      auto [it, fresh] = by_name.emplace(a.name, &a);
      if (!fresh && !(*it->second == a)) {
        std::ostringstream os;
        os << "row " << r + 1 << " slot " << k + 1 << ": array " << a.name
           << " redeclared with different shape or dtype";
        v.push_back(os.str());
      }
    }
  }

  // Arity: slot k's index list length must equal the dim of every array in slot k.
  bool arity_ok = true;
  for (int r = 0; r < b; ++r) {
    for (int k = 0; k < n; ++k) {
      const ArrayMeta& a = e.args[r][k];
      if (a.dim() != static_cast<int>(e.i_in[k].size())) {
        std::ostringstream os;
        os << "row " << r + 1 << " slot " << k + 1 << ": array " << a.name << " has "
           << a.dim() << " dims but index list (" << join_syms(e.i_in[k]) << ") has "
           << e.i_in[k].size();
        v.push_back(os.str());
        arity_ok = false;
      }
    }
  }

  for (int k = 0; k < n; ++k)
    for (const auto& s : e.i_in[k])
      if (s.empty()) {
        std::ostringstream os;
        os << "slot " << k + 1 << ": empty index symbol";
        v.push_back(os.str());
        return v;
      }

  // Positions sharing an index symbol agree on axis length, across rows too:
  // the notation is shared, so an index has a single extent for the whole batch.
  if (arity_ok) {
    std::map<std::string, std::int64_t> len;
    for (int k = 0; k < n; ++k) {
      for (size_t d = 0; d < e.i_in[k].size(); ++d) {
        const std::string& sym = e.i_in[k][d];
        for (int r = 0; r < b; ++r) {
          std::int64_t l = e.args[r][k].shape[d];
          auto [it, fresh] = len.emplace(sym, l);
          if (!fresh && it->second != l) {
            std::ostringstream os;
            os << "row " << r + 1 << " slot " << k + 1 << ": index " << sym
               << " length mismatch (" << it->second << " vs " << l << ")";
            v.push_back(os.str());
          }
        }
      }
    }
  }

  // Output indices: distinct, and each must appear in some input.
  std::set<std::string> seen_out;
  std::set<std::string> in_syms;
  for (const auto& l : e.i_in) in_syms.insert(l.begin(), l.end());
  for (const auto& s : e.i_out) {
    if (s.empty()) {
      v.push_back("empty output index symbol");
      continue;
    }
    if (!seen_out.insert(s).second) v.push_back("duplicate output index " + s);
    if (!in_syms.count(s)) v.push_back("output index " + s + " not found in any input");
  }

  return v;
}

void require_valid(const BatchedEinsum& e) {
  auto v = validate(e);
  if (v.empty()) return;
  std::string msg = "invalid batched einsum:";
  for (const auto& s : v) msg += "\n  " + s;
  throw error(errc::domain, msg);
}

bool equals(const BatchedEinsum& a, const BatchedEinsum& b) { return a == b; }

std::vector<ArrayMeta> universe(const BatchedEinsum& e) {
  std::map<std::string, ArrayMeta> m;
  for (const auto& row : e.args)
    for (const auto& a : row) m.emplace(a.name, a);
  std::vector<ArrayMeta> out;
  out.reserve(m.size());
  for (auto& [name, a] : m) out.push_back(a);
  return out;
}

std::vector<std::string> all_indices(const BatchedEinsum& e) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& l : e.i_in)
    for (const auto& s : l)
      if (seen.insert(s).second) out.push_back(s);
  return out;
}

std::vector<std::string> reduction_indices(const BatchedEinsum& e) {
  std::set<std::string> out_syms(e.i_out.begin(), e.i_out.end());
  std::vector<std::string> red;
  for (const auto& s : all_indices(e))
    if (!out_syms.count(s)) red.push_back(s);
  return red;
}

std::map<std::string, std::int64_t> index_lengths(const BatchedEinsum& e) {
  std::map<std::string, std::int64_t> len;
  for (int k = 0; k < e.n(); ++k)
    for (size_t d = 0; d < e.i_in[k].size(); ++d)
      len.emplace(e.i_in[k][d], e.args[0][k].shape[d]);
  return len;
}

std::set<int> all_dims(const BatchedEinsum& e) {
  std::set<int> d;
  for (const auto& a : universe(e)) d.insert(a.dim());
  d.insert(static_cast<int>(e.i_out.size()));
  return d;
}

std::vector<InputAccess> input_accesses(const BatchedEinsum& e) {
  std::vector<InputAccess> out;
  for (int r = 1; r <= e.b(); ++r)
    for (int k = 1; k <= e.n(); ++k)
      for (size_t d = 1; d <= e.i_in[k - 1].size(); ++d)
        out.push_back({r, k, e.i_in[k - 1][d - 1], static_cast<int>(d)});
  return out;
}

std::vector<OutputAccess> output_accesses(const BatchedEinsum& e) {
  std::vector<OutputAccess> out;
  for (size_t d = 1; d <= e.i_out.size(); ++d)
    out.push_back({e.i_out[d - 1], static_cast<int>(d)});
  return out;
}

std::set<Dtype> dtypes(const BatchedEinsum& e) {
  std::set<Dtype> t;
  for (const auto& a : universe(e)) t.insert(a.dtype);
  return t;
}

std::set<std::int64_t> axis_lengths(const BatchedEinsum& e) {
  std::set<std::int64_t> l;
  for (const auto& a : universe(e)) l.insert(a.shape.begin(), a.shape.end());
  return l;
}

DenseArray DenseArray::zeros(const ArrayMeta& m) {
  DenseArray a;
  a.meta = m;
  a.data.assign(static_cast<size_t>(m.num_elements()), {0.0, 0.0});
  return a;
}

static std::complex<double> pairwise_sum(const std::complex<double>* p, size_t n) {
  if (n <= 8) {
    std::complex<double> s{0.0, 0.0};
    for (size_t i = 0; i < n; ++i) s += p[i];
    return s;
  }
  size_t h = n / 2;
  return pairwise_sum(p, h) + pairwise_sum(p + h, n - h);
}

std::vector<DenseArray> evaluate(const BatchedEinsum& e, const Bindings& bindings) {
  require_valid(e);
  for (const auto& a : universe(e)) {
    auto it = bindings.find(a.name);
    if (it == bindings.end()) throw error(errc::domain, "no binding for array " + a.name);
    if (!(it->second.meta == a))
      throw error(errc::domain, "binding for array " + a.name +
                                    " does not match the declared shape/dtype");
    if (static_cast<std::int64_t>(it->second.data.size()) != a.num_elements())
      throw error(errc::domain, "binding for array " + a.name + " has wrong element count");
  }

  auto lengths = index_lengths(e);
  auto red = reduction_indices(e);

  // Loop symbols: outputs first, then reduction indices.
  std::vector<std::string> syms = e.i_out;
  syms.insert(syms.end(), red.begin(), red.end());
  std::map<std::string, int> sym_pos;
  std::vector<std::int64_t> extent(syms.size());
  for (size_t i = 0; i < syms.size(); ++i) {
    sym_pos[syms[i]] = static_cast<int>(i);
    extent[i] = lengths.at(syms[i]);
  }
  const size_t n_out = e.i_out.size();

  std::int64_t out_points = 1, red_points = 1;
  for (size_t i = 0; i < syms.size(); ++i)
    (i < n_out ? out_points : red_points) *= extent[i];

  struct SlotPlan {
    const std::vector<std::complex<double>>* data;
    std::vector<int> pos;              // loop-symbol position per operand dim
    std::vector<std::int64_t> stride;  // row-major strides
  };

  std::vector<DenseArray> results;
  std::vector<std::complex<double>> terms(static_cast<size_t>(red_points));

  for (int r = 0; r < e.b(); ++r) {
    std::vector<SlotPlan> plan(e.n());
    Dtype widest = e.args[r][0].dtype;
    for (int k = 0; k < e.n(); ++k) {
      const ArrayMeta& a = e.args[r][k];
      if (dtype_rank(a.dtype) > dtype_rank(widest)) widest = a.dtype;
      SlotPlan& p = plan[k];
      p.data = &bindings.at(a.name).data;
      p.pos.resize(a.dim());
      p.stride.resize(a.dim());
      std::int64_t s = 1;
      for (int d = a.dim() - 1; d >= 0; --d) {
        p.pos[d] = sym_pos.at(e.i_in[k][d]);
        p.stride[d] = s;
        s *= a.shape[d];
      }
    }

    ArrayMeta out_meta;
    out_meta.name = "R" + std::to_string(r + 1);
    out_meta.dtype = widest;
    for (const auto& s : e.i_out) out_meta.shape.push_back(lengths.at(s));
    DenseArray out = DenseArray::zeros(out_meta);

    std::vector<std::int64_t> val(syms.size(), 0);
    for (std::int64_t op = 0; op < out_points; ++op) {
      for (std::int64_t rp = 0; rp < red_points; ++rp) {
        std::complex<double> prod{1.0, 0.0};
        for (const auto& p : plan) {
          std::int64_t off = 0;
          for (size_t d = 0; d < p.pos.size(); ++d) off += val[p.pos[d]] * p.stride[d];
          prod *= (*p.data)[static_cast<size_t>(off)];
        }
        terms[static_cast<size_t>(rp)] = prod;
        // odometer over reduction symbols
        for (size_t i = syms.size(); i-- > n_out;) {
          if (++val[i] < extent[i]) break;
          val[i] = 0;
        }
      }
      out.data[static_cast<size_t>(op)] =
          pairwise_sum(terms.data(), static_cast<size_t>(red_points));
      for (size_t i = n_out; i-- > 0;) {
        if (++val[i] < extent[i]) break;
        val[i] = 0;
      }
    }
    results.push_back(std::move(out));
  }
  return results;
}

}  // namespace feinsum
