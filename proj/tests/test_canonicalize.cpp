#include "feinsum/canonicalize.hpp"

#include <set>

#include "doctest.h"
#include "feinsum/notation.hpp"
#include "test_util.hpp"

using namespace feinsum;
using test::am;

namespace {

bool verified(const BatchedEinsum& e1, const BatchedEinsum& e2, const SubstitutionWitness& w) {
  std::vector<std::string> why;
  bool ok = verify_witness(e1, e2, w, &why);
  for (const auto& s : why) MESSAGE(s);
  return ok;
}

}  // namespace

TEST_CASE("two shared-axis contractions, the worked golden") {
  auto e1 = make_batched("ij,ik->i", {{am("A", {72, 18}), am("B", {72, 18})}});
  auto c = canonicalize(e1);

  CHECK(c.canonical == make_batched("ab,ac->a", {{am("A0", {72, 18}), am("A1", {72, 18})}}));
  CHECK(c.sigma_idx == std::map<std::string, std::string>{{"a", "i"}, {"b", "j"}, {"c", "k"}});
  CHECK(c.sigma_arg == std::map<std::string, std::string>{{"A0", "A"}, {"A1", "B"}});
  CHECK(c.sigma_row == std::vector<int>{0});
  CHECK(c.sigma_slot == std::vector<int>{0, 1});
  CHECK(verified(e1, c.canonical, canonical_witness(c)));

  // the same computation written the other way around lands on the same form
  auto e2 = make_batched("ik,ij->i", {{am("X", {72, 18}), am("Y", {72, 18})}});
  auto c2 = canonicalize(e2);
  CHECK(c2.canonical == c.canonical);
  CHECK(verified(e2, c2.canonical, canonical_witness(c2)));
}

TEST_CASE("matrix product example by hand") {
  auto e1 = parse_classic(test::read_fixture("iso_plain_first.es"));
  auto e2 = parse_classic(test::read_fixture("iso_plain_second.es"));

  // the witness from the worked example, 0-based
  SubstitutionWitness w;
  w.sigma_row = {0};
  w.sigma_slot = {1, 0};
  w.sigma_idx = {{"p", "i"}, {"q", "j"}, {"r", "k"}};
  w.sigma_arg = {{"Y", "A"}, {"X", "B"}};
  CHECK(verified(e1, e2, w));
  CHECK(test::rebind_and_compare(e1, e2, w, 404) < 1e-12);

  auto found = is_isomorphic(e1, e2);
  REQUIRE(found.has_value());
  CHECK(verified(e1, e2, *found));
}

TEST_CASE("four-slot batch example by hand") {
  auto e1 = parse_classic(test::read_fixture("iso_batched_first.es"));
  auto e2 = parse_classic(test::read_fixture("iso_batched_second.es"));

  SubstitutionWitness w;
  w.sigma_row = {1, 0};
  w.sigma_slot = {0, 3, 2, 1};
  w.sigma_idx = {{"i", "i"}, {"j", "k"}, {"k", "j"}};
  w.sigma_arg = {{"P", "A"}, {"S", "B"}, {"R", "C"}, {"Q", "D"}};
  CHECK(verified(e1, e2, w));
  CHECK(test::rebind_and_compare(e1, e2, w, 405) < 1e-12);

  auto found = is_isomorphic(e1, e2);
  REQUIRE(found.has_value());
  CHECK(verified(e1, e2, *found));
  CHECK(canonicalize(e1).canonical == canonicalize(e2).canonical);
}

TEST_CASE("three-operand batch pair from the figure") {
  auto e1 = parse_classic(test::read_fixture("fig_pair_first.es"));
  auto e2 = parse_classic(test::read_fixture("fig_pair_second.es"));
  CHECK(canonicalize(e1).canonical == canonicalize(e2).canonical);

  auto w = is_isomorphic(e1, e2);
  REQUIRE(w.has_value());
  CHECK(verified(e1, e2, *w));
  CHECK(test::rebind_and_compare(e1, e2, *w, 406) < 1e-12);

  // too big for the default brute-force budget: 3! 3! 6! 6! = 18.7M
  CHECK_THROWS_AS(brute_force_isomorphic(e1, e2), error);
  auto bw = brute_force_isomorphic(e1, e2, 20'000'000);
  REQUIRE(bw.has_value());
  CHECK(verified(e1, e2, *bw));
}

TEST_CASE("canonicalization is idempotent and witnessed") {
  GenParams p;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto e = generate_random(p, seed);
    auto c = canonicalize(e);
    CHECK(verified(e, c.canonical, canonical_witness(c)));
    auto cc = canonicalize(c.canonical);
    CHECK(cc.canonical == c.canonical);
    CHECK(verified(c.canonical, cc.canonical, canonical_witness(cc)));
  }
}

TEST_CASE("scrambling never changes the canonical form") {
  GenParams p;
  for (std::uint64_t seed = 500; seed < 650; ++seed) {
    auto e = generate_random(p, seed);
    auto sc = scramble(e, seed * 31 + 7);
    CHECK(verified(sc.e, e, sc.w));
    CHECK(canonicalize(sc.e).canonical == canonicalize(e).canonical);

    auto w = is_isomorphic(sc.e, e);
    REQUIRE(w.has_value());
    CHECK(verified(sc.e, e, *w));
  }
}

TEST_CASE("non-isomorphic pairs come back empty") {
  auto base = make_batched("ik,kj->ij", {{am("A", {10, 4}), am("B", {4, 10})}});
  SUBCASE("different axis length") {
    auto other = make_batched("ik,kj->ij", {{am("A", {10, 5}), am("B", {5, 10})}});
    CHECK_FALSE(is_isomorphic(base, other).has_value());
  }
  SUBCASE("different dtype") {
    auto other = make_batched("ik,kj->ij", {{am("A", {10, 4}, Dtype::float32), am("B", {4, 10})}});
    CHECK_FALSE(is_isomorphic(base, other).has_value());
  }
  SUBCASE("transposed read is a different computation") {
    auto other = make_batched("ij,kj->ik", {{am("A", {10, 4}), am("B", {10, 4})}});
    CHECK_FALSE(is_isomorphic(base, other).has_value());
    CHECK_FALSE(brute_force_isomorphic(base, other).has_value());
  }
  SUBCASE("row count differs") {
    auto two = make_batched("ik,kj->ij", {{am("A", {10, 4}), am("B", {4, 10})},
                                          {am("A", {10, 4}), am("C", {4, 10})}});
    CHECK_FALSE(is_isomorphic(base, two).has_value());
  }
  SUBCASE("slot count differs") {
    auto three = make_batched("ik,kk,kj->ij",
                              {{am("A", {10, 4}), am("D", {4, 4}), am("B", {4, 10})}});
    CHECK_FALSE(is_isomorphic(base, three).has_value());
  }
  SUBCASE("shared array split in two") {
    auto shared = make_batched("ij,j->i", {{am("A", {9, 3}), am("B", {3})},
                                           {am("A", {9, 3}), am("C", {3})}});
    auto split = make_batched("ij,j->i", {{am("A", {9, 3}), am("B", {3})},
                                          {am("D", {9, 3}), am("C", {3})}});
    CHECK_FALSE(is_isomorphic(shared, split).has_value());
    CHECK_FALSE(brute_force_isomorphic(shared, split).has_value());
  }
}

TEST_CASE("the decision procedure and the reference agree") {
  GenParams p;
  p.b_max = 2;
  p.n_max = 2;
  p.max_indices = 3;
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    auto a = generate_random(p, seed * 2);
    auto b = generate_random(p, seed * 2 + 1);
    auto fast = is_isomorphic(a, b);
    auto slow = brute_force_isomorphic(a, b);
    REQUIRE(fast.has_value() == slow.has_value());
    if (fast) {
      ++hits;
      CHECK(verified(a, b, *fast));
      CHECK(verified(a, b, *slow));
    }
    // scrambles are always found by both
    auto sc = scramble(a, seed + 9000);
    auto fast2 = is_isomorphic(sc.e, a);
    auto slow2 = brute_force_isomorphic(sc.e, a);
    REQUIRE(fast2.has_value());
    REQUIRE(slow2.has_value());
  }
  MESSAGE("random cross pairs that happened to match: ", hits);
}

TEST_CASE("brute force budget contract") {
  // 4 rows, 4 slots, 6 indices, 5 arrays: 4! 4! 6! 5! = 49.8 million
  auto e = make_batched("abcdef,ab,cd,ef->ace",
                        {{am("T", {2, 2, 2, 2, 2, 2}), am("U", {2, 2}), am("V", {2, 2}), am("W", {2, 2})},
                         {am("T", {2, 2, 2, 2, 2, 2}), am("U", {2, 2}), am("V", {2, 2}), am("W", {2, 2})},
                         {am("T", {2, 2, 2, 2, 2, 2}), am("U", {2, 2}), am("V", {2, 2}), am("W", {2, 2})},
                         {am("T", {2, 2, 2, 2, 2, 2}), am("U", {2, 2}), am("X", {2, 2}), am("W", {2, 2})}});
  try {
    brute_force_isomorphic(e, e);
    FAIL("expected a throw");
  } catch (const error& err) {
    CHECK(err.kind() == errc::domain);
    CHECK(std::string(err.what()).find("budget") != std::string::npos);
  }
  // small instances stay well inside the default budget
  auto small = make_batched("ij,j->i", {{am("A", {4, 3}), am("B", {3})}});
  CHECK(brute_force_isomorphic(small, small).has_value());
}

TEST_CASE("verify_witness rejects every corruption") {
  auto e = make_batched("ik,kj->ij", {{am("A", {10, 4}), am("B", {4, 10})}});
  auto sc = scramble(e, 77);
  REQUIRE(verify_witness(sc.e, e, sc.w));

  auto expect_fail = [&](SubstitutionWitness w, const char* what) {
    std::vector<std::string> why;
    bool ok = verify_witness(sc.e, e, w, &why);
    CHECK_FALSE(ok);
    CHECK(!why.empty());
    MESSAGE(what, ": ", why.empty() ? std::string("(no reason)") : why[0]);
  };

  {
    auto w = sc.w;
    std::swap(w.sigma_slot[0], w.sigma_slot[1]);
    expect_fail(w, "slots swapped");
  }
  {
    auto w = sc.w;
    w.sigma_row = {0, 0};
    expect_fail(w, "row map not a bijection");
  }
  {
    auto w = sc.w;
    auto it = w.sigma_idx.begin();
    auto jt = std::next(it);
    std::swap(it->second, jt->second);
    expect_fail(w, "index map scrambled");
  }
  {
    auto w = sc.w;
    w.sigma_arg.begin()->second = "nonexistent";
    expect_fail(w, "array map points nowhere");
  }
  {
    auto w = sc.w;
    w.sigma_idx.erase(w.sigma_idx.begin());
    expect_fail(w, "index map incomplete");
  }
  {
    auto w = sc.w;
    w.sigma_slot.pop_back();
    expect_fail(w, "slot map too short");
  }
}

TEST_CASE("witnesses mean what they say about the numbers") {
  GenParams p;
  for (std::uint64_t seed = 300; seed < 330; ++seed) {
    auto e = generate_random(p, seed);
    auto sc = scramble(e, seed ^ 0xabcdef);
    CHECK(test::rebind_and_compare(sc.e, e, sc.w, seed) < 1e-10);
  }
}

TEST_CASE("generated instances respect their parameters") {
  GenParams p;
  p.b_min = 2;
  p.b_max = 3;
  p.n_min = 1;
  p.n_max = 4;
  p.max_indices = 5;
  p.shape_pool = {2, 3, 7};
  p.dtype_pool = {Dtype::float32, Dtype::float64};
  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto e = generate_random(p, seed);
    CHECK(validate(e).empty());
    CHECK(e.b() >= 2);
    CHECK(e.b() <= 3);
    CHECK(e.n() >= 1);
    CHECK(e.n() <= 4);
    CHECK(all_indices(e).size() <= 5);
    for (auto l : axis_lengths(e)) CHECK((l == 2 || l == 3 || l == 7));
    for (auto t : dtypes(e)) CHECK((t == Dtype::float32 || t == Dtype::float64));
    for (const auto& a : universe(e)) CHECK(a.dim() >= 1);
    CHECK(generate_random(p, seed) == e);  // same seed, same instance
    seen.insert(print_classic(e));
  }
  CHECK(seen.size() >= 150);  // not all distinct, but nearly
}

TEST_CASE("canonical naming is the default naming") {
  GenParams p;
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    auto c = canonicalize(generate_random(p, seed));
    // names are 'a'.. and "A0".. but first-occurrence order is the canonical
    // node order, not the alphabet ("ij,j->i" canonicalizes to "ba,a->b")
    auto idx = all_indices(c.canonical);
    std::set<std::string> inames(idx.begin(), idx.end()), iwant;
    for (size_t k = 0; k < idx.size(); ++k) iwant.insert(std::string(1, static_cast<char>('a' + k)));
    CHECK(inames == iwant);
    // universe is sorted lexicographically (A10 < A2), so compare as sets
    std::set<std::string> names, want;
    for (const auto& a : universe(c.canonical)) names.insert(a.name);
    for (size_t k = 0; k < names.size(); ++k) want.insert("A" + std::to_string(k));
    CHECK(names == want);
  }
}
