#include "feinsum/core.hpp"

#include <complex>

#include "doctest.h"
#include "feinsum/notation.hpp"
#include "test_util.hpp"

using namespace feinsum;
using test::am;

namespace {

std::string joined(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += x + "\n";
  return s;
}

}  // namespace

TEST_CASE("dtype table") {
  CHECK(dtype_size_bytes(Dtype::int8) == 1);
  CHECK(dtype_size_bytes(Dtype::float16) == 2);
  CHECK(dtype_size_bytes(Dtype::float64) == 8);
  CHECK(dtype_size_bytes(Dtype::complex128) == 16);
  CHECK(dtype_name(Dtype::float32) == std::string("float32"));
  CHECK(dtype_from_name("complex64") == Dtype::complex64);
  CHECK_THROWS_WITH_AS(dtype_from_name("float8"), "unknown dtype: float8", error);
  // promotion order: every integer below every float below every complex
  CHECK(dtype_rank(Dtype::int64) < dtype_rank(Dtype::float16));
  CHECK(dtype_rank(Dtype::float64) < dtype_rank(Dtype::complex64));
}

TEST_CASE("validate accepts the sound cases") {
  CHECK(validate(make_batched("ik,kj->ij", {{am("A", {10, 4}), am("B", {4, 10})}})).empty());
  // shared notation, two rows
  CHECK(validate(make_batched("ij,ik->i", {{am("A", {72, 18}), am("B", {72, 18})}})).empty());
  // repeated index inside one slot reads the diagonal
  CHECK(validate(BatchedEinsum{{"i"}, {{"i", "i"}}, {{am("A", {5, 5})}}}).empty());
  // 0-dim operand
  CHECK(validate(BatchedEinsum{{"i"}, {{"i"}, {}}, {{am("A", {5}), am("s", {})}}}).empty());
  // empty output = full reduction
  CHECK(validate(make_batched("i,i->", {{am("x", {7}), am("y", {7})}})).empty());
}

TEST_CASE("validate reports every violation") {
  SUBCASE("no rows / no slots") {
    auto v = validate(BatchedEinsum{});
    CHECK(joined(v) == "b must be >= 1 (no rows)\nn must be >= 1 (no operand slots)\n");
  }
  SUBCASE("ragged args matrix") {
    BatchedEinsum e{{"i"}, {{"i"}, {"i"}}, {{am("A", {3})}}};
    auto v = validate(e);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "row 1 has 1 args, expected 2");
  }
  SUBCASE("arity mismatch") {
    BatchedEinsum e{{"i"}, {{"i", "j"}}, {{am("A", {3})}}};
    auto v = validate(e);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "row 1 slot 1: array A has 1 dims but index list (i,j) has 2");
  }
  SUBCASE("index length mismatch across slots") {
    BatchedEinsum e{{"i"}, {{"i", "j"}, {"j"}}, {{am("A", {3, 4}), am("x", {5})}}};
    auto v = validate(e);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "row 1 slot 2: index j length mismatch (4 vs 5)");
  }
  SUBCASE("index length mismatch across rows") {
    BatchedEinsum e{{"i"}, {{"i"}}, {{am("A", {3})}, {am("B", {4})}}};
    auto v = validate(e);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "row 2 slot 1: index i length mismatch (3 vs 4)");
  }
  SUBCASE("same name, different metadata") {
    BatchedEinsum e{{"i"}, {{"i"}}, {{am("A", {3})}, {am("A", {3}, Dtype::float32)}}};
    auto v = validate(e);
    REQUIRE(v.size() >= 1);
    CHECK(v[0] == "row 2 slot 1: array A redeclared with different shape or dtype");
  }
  SUBCASE("duplicate output index") {
    BatchedEinsum e{{"i", "i"}, {{"i"}}, {{am("A", {3})}}};
    auto v = validate(e);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "duplicate output index i");
  }
  SUBCASE("output index not read anywhere") {
    BatchedEinsum e{{"q"}, {{"i"}}, {{am("A", {3})}}};
    auto v = validate(e);
    REQUIRE(v.size() == 1);
    CHECK(v[0] == "output index q not found in any input");
  }
  SUBCASE("nonpositive axis length") {
    BatchedEinsum e{{"i"}, {{"i"}}, {{am("A", {0})}}};
    auto v = validate(e);
    CHECK(joined(v).find("array A axis 1 has nonpositive length 0") != std::string::npos);
  }
  SUBCASE("multiple violations come back together") {
    BatchedEinsum e{{"q", "q"}, {{"i", "j"}, {"j"}},
                    {{am("A", {3, 4}), am("x", {5})}}};
    auto v = validate(e);
    CHECK(v.size() == 4);  // length mismatch, duplicate q, q unread (per occurrence)
    CHECK(joined(v).find("index j length mismatch") != std::string::npos);
    CHECK(joined(v).find("duplicate output index q") != std::string::npos);
    CHECK(joined(v).find("output index q not found in any input") != std::string::npos);
  }
  SUBCASE("require_valid throws errc::domain with all messages") {
    BatchedEinsum e{{"i", "i"}, {{"i"}}, {{am("A", {3})}}};
    try {
      require_valid(e);
      FAIL("expected a throw");
    } catch (const error& err) {
      CHECK(err.kind() == errc::domain);
      CHECK(std::string(err.what()).find("duplicate output index i") != std::string::npos);
    }
  }
}

TEST_CASE("derived sets") {
  // B appears twice, universe keeps one name-sorted copy
  auto e = make_batched("ijk,ik,ij,ij->i",
                        {{am("A", {5, 10, 10}), am("B", {5, 10}), am("C", {5, 10}), am("B", {5, 10})},
                         {am("A", {5, 10, 10}), am("B", {5, 10}), am("C", {5, 10}), am("B", {5, 10})}});
  auto u = universe(e);
  REQUIRE(u.size() == 3);
  CHECK(u[0].name == "A");
  CHECK(u[1].name == "B");
  CHECK(u[2].name == "C");

  CHECK(all_indices(e) == std::vector<std::string>{"i", "j", "k"});
  CHECK(reduction_indices(e) == std::vector<std::string>{"j", "k"});
  CHECK(index_lengths(e) == std::map<std::string, std::int64_t>{{"i", 5}, {"j", 10}, {"k", 10}});
  CHECK(all_dims(e) == std::set<int>{1, 2, 3});
  CHECK(axis_lengths(e) == std::set<std::int64_t>{5, 10});
  CHECK(dtypes(e) == std::set<Dtype>{Dtype::float64});

  auto acc = input_accesses(e);
  CHECK(acc.size() == 2u * (3 + 2 + 2 + 2));
  CHECK(acc[0] == InputAccess{1, 1, "i", 1});
  CHECK(acc[2] == InputAccess{1, 1, "k", 3});
  CHECK(acc.back() == InputAccess{2, 4, "j", 2});

  auto oacc = output_accesses(e);
  REQUIRE(oacc.size() == 1);
  CHECK(oacc[0] == OutputAccess{"i", 1});

  // first-occurrence order is by slot, not alphabetical
  auto e2 = make_batched("kj,ji->ik", {{am("P", {4, 3}), am("Q", {3, 2})}});
  CHECK(all_indices(e2) == std::vector<std::string>{"k", "j", "i"});
  CHECK(reduction_indices(e2) == std::vector<std::string>{"j"});
}

TEST_CASE("evaluate matches a hand-rolled matmul loop") {
  // R[i,j] = sum_k A[i,k] B[k,j], 10x4 times 4x10
  auto e = make_batched("ik,kj->ij", {{am("A", {10, 4}), am("B", {4, 10})}});
  auto bind = test::random_bindings(e, 42);
  auto got = evaluate(e, bind);
  REQUIRE(got.size() == 1);
  CHECK(got[0].meta.shape == std::vector<std::int64_t>{10, 10});
  CHECK(got[0].meta.dtype == Dtype::float64);
  CHECK(got[0].meta.name == "R1");

  const auto& A = bind.at("A").data;
  const auto& B = bind.at("B").data;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      std::complex<double> s = 0.0;
      for (int k = 0; k < 4; ++k) s += A[i * 4 + k] * B[k * 10 + j];
      worst = std::max(worst, test::rel_err(got[0].data[i * 10 + j], s));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("evaluate handles batching, diagonals and full reductions") {
  SUBCASE("two rows share the notation but not the data") {
    auto e = make_batched("ij,j->i", {{am("A", {3, 4}), am("x", {4})},
                                      {am("A", {3, 4}), am("y", {4})}});
    auto bind = test::random_bindings(e, 7);
    auto got = evaluate(e, bind);
    REQUIRE(got.size() == 2);
    CHECK(got[1].meta.name == "R2");
    const auto& A = bind.at("A").data;
    for (int r = 0; r < 2; ++r) {
      const auto& x = bind.at(r == 0 ? "x" : "y").data;
      for (int i = 0; i < 3; ++i) {
        std::complex<double> s = 0.0;
        for (int j = 0; j < 4; ++j) s += A[i * 4 + j] * x[j];
        CHECK(test::rel_err(got[r].data[i], s) < 1e-13);
      }
    }
  }
  SUBCASE("diagonal read") {
    BatchedEinsum e{{"i"}, {{"i", "i"}}, {{am("A", {4, 4})}}};
    auto bind = test::random_bindings(e, 9);
    auto got = evaluate(e, bind);
    for (int i = 0; i < 4; ++i) CHECK(got[0].data[i] == bind.at("A").data[i * 4 + i]);
  }
  SUBCASE("dot product reduces to a 0-dim result") {
    auto e = make_batched("i,i->", {{am("x", {64}), am("y", {64})}});
    auto bind = test::random_bindings(e, 11);
    auto got = evaluate(e, bind);
    REQUIRE(got[0].data.size() == 1);
    std::complex<double> s = 0.0;
    for (int i = 0; i < 64; ++i) s += bind.at("x").data[i] * bind.at("y").data[i];
    CHECK(test::rel_err(got[0].data[0], s) < 1e-13);
  }
  SUBCASE("0-dim operand scales") {
    BatchedEinsum e{{"i"}, {{"i"}, {}}, {{am("x", {5}), am("c", {})}}};
    Bindings bind = test::random_bindings(e, 13);
    auto got = evaluate(e, bind);
    for (int i = 0; i < 5; ++i)
      CHECK(got[0].data[i] == bind.at("x").data[i] * bind.at("c").data[0]);
  }
  SUBCASE("output dtype is the widest per row") {
    auto e = make_batched("i,i->i", {{am("x", {3}, Dtype::float32), am("y", {3}, Dtype::float64)},
                                     {am("x", {3}, Dtype::float32), am("z", {3}, Dtype::int8)}});
    auto got = evaluate(e, test::random_bindings(e, 17));
    CHECK(got[0].meta.dtype == Dtype::float64);
    CHECK(got[1].meta.dtype == Dtype::float32);
  }
  SUBCASE("complex data multiplies without conjugation") {
    // (i)(i) + (1)(2) = -1 + 2 = 1
    auto e = make_batched("i,i->", {{am("x", {2}, Dtype::complex128), am("y", {2}, Dtype::complex128)}});
    Bindings bind;
    bind["x"] = DenseArray{am("x", {2}, Dtype::complex128), {{0, 1}, {1, 0}}};
    bind["y"] = DenseArray{am("y", {2}, Dtype::complex128), {{0, 1}, {2, 0}}};
    auto got = evaluate(e, bind);
    CHECK(got[0].data[0] == std::complex<double>{1.0, 0.0});
    CHECK(got[0].meta.dtype == Dtype::complex128);
  }
}

TEST_CASE("evaluate rejects bad bindings") {
  auto e = make_batched("i->i", {{am("x", {5})}});
  SUBCASE("missing") {
    CHECK_THROWS_WITH_AS(evaluate(e, {}), "no binding for array x", error);
  }
  SUBCASE("wrong shape") {
    Bindings b;
    b["x"] = DenseArray::zeros(am("x", {6}));
    CHECK_THROWS_AS(evaluate(e, b), error);
  }
  SUBCASE("wrong dtype counts as a mismatch too") {
    Bindings b;
    b["x"] = DenseArray::zeros(am("x", {5}, Dtype::float32));
    CHECK_THROWS_AS(evaluate(e, b), error);
  }
}

TEST_CASE("evaluate is deterministic") {
  auto e = make_batched("ij,jk,kl->il", {{am("A", {4, 5}), am("B", {5, 6}), am("C", {6, 3})}});
  auto bind = test::random_bindings(e, 23);
  auto r1 = evaluate(e, bind);
  auto r2 = evaluate(e, bind);
  CHECK(r1[0].data == r2[0].data);
}
