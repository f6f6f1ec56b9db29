#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "feinsum/canonicalize.hpp"
#include "feinsum/core.hpp"
#include "feinsum/rng.hpp"

namespace feinsum::test {

inline ArrayMeta am(std::string name, std::vector<std::int64_t> shape,
                    Dtype t = Dtype::float64) {
  return ArrayMeta{std::move(name), std::move(shape), t};
}

// Deterministic values in [-1, 1), real axis only.
inline Bindings random_bindings(const BatchedEinsum& e, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bindings b;
  for (const auto& a : universe(e)) {
    DenseArray arr = DenseArray::zeros(a);
    for (auto& x : arr.data)
      x = {static_cast<double>(draw_below(rng, 1u << 20)) / (1u << 19) - 1.0, 0.0};
    b.emplace(a.name, std::move(arr));
  }
  return b;
}

inline double rel_err(std::complex<double> got, std::complex<double> want) {
  double scale = std::max(1.0, std::abs(want));
  return std::abs(got - want) / scale;
}

inline double max_rel_err(const DenseArray& got, const DenseArray& want) {
  if (got.data.size() != want.data.size()) return 1e300;
  double m = 0.0;
  for (size_t i = 0; i < got.data.size(); ++i)
    m = std::max(m, rel_err(got.data[i], want.data[i]));
  return m;
}

// Semantic check of a witness (e1, e2, w): bind e2's arrays to e1's data
// through sigma_arg and compare row outputs through sigma_row. Returns the
// worst elementwise relative error.
inline double rebind_and_compare(const BatchedEinsum& e1, const BatchedEinsum& e2,
                                 const SubstitutionWitness& w, std::uint64_t seed) {
  Bindings b1 = random_bindings(e1, seed);
  Bindings b2;
  for (const auto& a2 : universe(e2)) {
    DenseArray arr = b1.at(w.sigma_arg.at(a2.name));
    arr.meta = a2;
    b2.emplace(a2.name, std::move(arr));
  }
  auto r1 = evaluate(e1, b1);
  auto r2 = evaluate(e2, b2);
  double worst = 0.0;
  for (int i = 0; i < e1.b(); ++i)
    worst = std::max(worst, max_rel_err(r1[static_cast<size_t>(i)],
                                        r2[static_cast<size_t>(w.sigma_row[i])]));
  return worst;
}

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(std::string(FIXTURE_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace feinsum::test
