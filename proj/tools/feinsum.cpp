#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "feinsum/canonicalize.hpp"
#include "feinsum/factsdb.hpp"
#include "feinsum/notation.hpp"
#include "feinsum/raising.hpp"

namespace {

using namespace feinsum;

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::ostringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_map(const char* label, const std::map<std::string, std::string>& m) {
  std::cout << label << ":";
  bool first = true;
  for (const auto& [k, v] : m) {
    std::cout << (first ? " " : ", ") << k << " -> " << v;
    first = false;
  }
  std::cout << "\n";
}

void print_perm(const char* label, const std::vector<int>& p) {
  std::cout << label << ":";
  for (size_t i = 0; i < p.size(); ++i)
    std::cout << (i ? ", " : " ") << (i + 1) << " -> " << (p[i] + 1);
  std::cout << "\n";
}

int run_canonicalize(const std::string& file, const std::string& format) {
  BatchedEinsum e = parse_classic(slurp(file));
  CanonResult c = canonicalize(e);
  std::string key = canonical_key(c.canonical);
  if (format == "key-only") {
    std::cout << key << "\n";
    return 0;
  }
  std::cout << print_classic(c.canonical);
  std::cout << "key: " << key << "\n";
  print_perm("rows (canonical -> input)", c.sigma_row);
  print_perm("slots (canonical -> input)", c.sigma_slot);
  print_map("indices (canonical -> input)", c.sigma_idx);
  print_map("arrays (canonical -> input)", c.sigma_arg);
  return 0;
}

int run_isomorphic(const std::string& file1, const std::string& file2) {
  BatchedEinsum e1 = parse_classic(slurp(file1));
  BatchedEinsum e2 = parse_classic(slurp(file2));
  std::optional<SubstitutionWitness> w = is_isomorphic(e1, e2);
  if (!w) {
    std::cout << "not isomorphic\n";
    return 0;
  }
  std::cout << "isomorphic\n";
  print_perm("rows (first -> second)", w->sigma_row);
  print_perm("slots (first -> second)", w->sigma_slot);
  print_map("indices (second -> first)", w->sigma_idx);
  print_map("arrays (second -> first)", w->sigma_arg);
  return 0;
}

int run_match(const std::string& kernel_file, const std::string& ref_file) {
  FunctionalKernel k = parse_kernel(slurp(kernel_file));
  BatchedEinsum ref = parse_classic(slurp(ref_file));
  MatchResult m = identify_as_einsum(k, ref);
  std::cout << "match\n";
  std::cout << "rows (reference -> statement):";
  for (size_t i = 0; i < m.sigma_row.size(); ++i)
    std::cout << (i ? ", " : " ") << (i + 1) << " -> " << (m.sigma_row[i] + 1);
  std::cout << "\n";
  print_map("indices (reference -> kernel)", m.sigma_idx);
  print_map("arrays (reference -> kernel)", m.sigma_arg);
  return 0;
}

int run_record(const std::string& file, const std::string& db, const std::string& device,
               const std::string& transform, double wall, double rate, const std::string& meta) {
  BatchedEinsum e = parse_classic(slurp(file));
  CanonResult c = canonicalize(e);
  FactRecord r;
  r.canonical_key = canonical_key(c.canonical);
  r.device_id = device;
  r.transform_id = transform;
  r.wall_time_s = wall;
  r.flop_rate = rate > 0.0 ? rate : flop_count(e) / wall;
  r.meta = meta;
  record_facts(db, {r});
  std::cout << "recorded " << r.canonical_key << "\n";
  return 0;
}

int run_retrieve(const std::string& file, const std::string& db, const std::string& device) {
  BatchedEinsum e = parse_classic(slurp(file));
  std::string key = canonical_key(canonicalize(e).canonical);
  std::optional<FactRecord> r = retrieve(db, key, device);
  if (!r) {
    std::cout << "no facts for this einsum on " << device << "\n";
    return 0;
  }
  std::cout << "key: " << r->canonical_key << "\n";
  std::cout << "transform: " << r->transform_id << "\n";
  std::cout << "wall_time_s: " << num(r->wall_time_s) << "\n";
  std::cout << "flop_rate: " << num(r->flop_rate) << "\n";
  std::cout << "recorded_at: " << r->recorded_at << "\n";
  if (!r->meta.empty()) std::cout << "meta: " << r->meta << "\n";
  return 0;
}

int run_stats(const std::string& file, const std::string& device) {
  BatchedEinsum e = parse_classic(slurp(file));
  std::cout << "flops: " << num(flop_count(e)) << "\n";
  std::cout << "bytes: " << num(footprint_bytes(e)) << "\n";
  std::cout << "intensity: " << num(arithmetic_intensity(e)) << "\n";
  std::vector<DeviceModel> devs;
  if (!device.empty()) {
    std::optional<DeviceModel> d = device_preset(device);
    if (!d) throw error(errc::usage, "unknown device " + device + " (have: mi250x h100 titanv p100)");
    devs.push_back(*d);
  } else {
    devs = device_presets();
  }
  for (const DeviceModel& d : devs)
    std::cout << "device " << d.id << ": roofline " << num(roofline_flop_rate(e, d)) << ", "
              << (memory_bound(e, d) ? "memory bound" : "compute bound") << "\n";
  return 0;
}

int run_fuzz(std::uint64_t seed, int count) {
  GenParams p;
  for (int t = 0; t < count; ++t) {
    std::uint64_t s = seed + 1000003ull * static_cast<std::uint64_t>(t);
    BatchedEinsum e = generate_random(p, s);
    Scrambled sc = scramble(e, s ^ 0x9e3779b97f4a7c15ull);
    auto bad = [&](const std::string& what) {
      std::cout << "fuzz case " << t << " (seed " << s << "): " << what << "\n";
      std::cout << "--- original ---\n" << print_classic(e);
      std::cout << "--- scrambled ---\n" << print_classic(sc.e);
      return 1;
    };
    if (!verify_witness(sc.e, e, sc.w)) return bad("scramble witness does not check out");
    CanonResult c1 = canonicalize(e);
    CanonResult c2 = canonicalize(sc.e);
    if (!equals(c1.canonical, c2.canonical)) return bad("canonical forms differ");
    if (!verify_witness(e, c1.canonical, canonical_witness(c1)))
      return bad("canonicalization witness does not check out");
    if (!equals(canonicalize(c1.canonical).canonical, c1.canonical))
      return bad("canonicalize is not idempotent");
  }
  std::cout << "ok: " << count << " cases\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"canonicalize batched einsums and keep tuning facts about them"};
  app.require_subcommand(1);

  std::string file, file2, format = "text";
  std::string db = "./feinsum-facts.db", device, transform = "baseline", meta;
  double wall = 0.0, rate = 0.0;
  std::uint64_t seed = 1;
  int count = 100;

  CLI::App* c = app.add_subcommand("canonicalize", "print the canonical form of an einsum file");
  c->add_option("file", file, "einsum file, - for stdin")->required();
  c->add_option("--format", format, "text or key-only")
      ->check(CLI::IsMember({"text", "key-only"}));

  CLI::App* iso = app.add_subcommand("isomorphic", "decide whether two einsum files agree");
  iso->add_option("first", file, "einsum file")->required();
  iso->add_option("second", file2, "einsum file")->required();

  CLI::App* mt = app.add_subcommand("match", "match a kernel file against a reference einsum");
  mt->add_option("kernel", file, "kernel file")->required();
  mt->add_option("reference", file2, "einsum file")->required();

  CLI::App* rec = app.add_subcommand("record", "store a tuning fact for an einsum");
  rec->add_option("file", file, "einsum file")->required();
  rec->add_option("--db", db, "facts database path");
  rec->add_option("--device", device, "device id")->required();
  rec->add_option("--transform", transform, "transform id");
  rec->add_option("--wall", wall, "wall time in seconds")->required();
  rec->add_option("--rate", rate, "flop rate (computed from the cost model when omitted)");
  rec->add_option("--meta", meta, "free-form note");

  CLI::App* ret = app.add_subcommand("retrieve", "look up the best known fact for an einsum");
  ret->add_option("file", file, "einsum file")->required();
  ret->add_option("--db", db, "facts database path");
  ret->add_option("--device", device, "device id")->required();

  CLI::App* st = app.add_subcommand("stats", "cost model numbers for an einsum");
  st->add_option("file", file, "einsum file")->required();
  st->add_option("--device", device, "preset device id (default: all presets)");

  CLI::App* fz = app.add_subcommand("fuzz", "internal self-check over random einsums");
  fz->group("");  // hidden
  fz->add_option("--seed", seed, "base seed");
  fz->add_option("--count", count, "number of cases");

  try {
    app.parse(argc, argv);
    if (*c) return run_canonicalize(file, format);
    if (*iso) return run_isomorphic(file, file2);
    if (*mt) return run_match(file, file2);
    if (*rec) return run_record(file, db, device, transform, wall, rate, meta);
    if (*ret) return run_retrieve(file, db, device);
    if (*st) return run_stats(file, device);
    if (*fz) return run_fuzz(seed, count);
    return 2;
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const feinsum::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case feinsum::errc::usage: return 2;
      case feinsum::errc::io: return 3;
      default: return 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
