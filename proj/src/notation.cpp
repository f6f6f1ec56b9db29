#include "feinsum/notation.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

#include "feinsum/canonicalize.hpp"

namespace feinsum {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

bool is_ident(const std::string& s) {
  if (s.empty()) return false;
  if (!std::isalpha(static_cast<unsigned char>(s[0])) && s[0] != '_') return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string shape_str(const ArrayMeta& m) {
  if (m.shape.empty()) return "scalar";
  std::string s;
  for (size_t d = 0; d < m.shape.size(); ++d) {
    if (d) s += 'x';
    s += std::to_string(m.shape[d]);
  }
  return s;
}

std::vector<std::int64_t> parse_shape(const std::string& s, int line_no) {
  if (s == "scalar") return {};
  std::vector<std::int64_t> shape;
  for (const std::string& part : split(s, 'x')) {
    if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
      throw error(errc::domain, "line " + std::to_string(line_no) + ": bad shape \"" + s +
                                    "\" (want e.g. 96x4, or scalar)");
    errno = 0;
    long long v = std::stoll(part);
    if (v <= 0)
      throw error(errc::domain,
                  "line " + std::to_string(line_no) + ": shape axis must be positive, got " + part);
    shape.push_back(v);
  }
  return shape;
}

}  // namespace

std::pair<IndexList, std::vector<IndexList>> parse_notation(const std::string& s) {
  auto fail = [&](size_t col, const std::string& what) {
    throw error(errc::domain, "col " + std::to_string(col + 1) + ": " + what +
                                  " in einsum notation \"" + s + "\"");
  };
  size_t arrow = s.find("->");
  if (arrow == std::string::npos) fail(s.size(), "missing \"->\"");

  std::vector<IndexList> in;
  IndexList cur;
  for (size_t i = 0; i < arrow; ++i) {
    char c = s[i];
    if (c == ',') {
      in.push_back(cur);
      cur.clear();
    } else if (c >= 'a' && c <= 'z') {
      cur.emplace_back(1, c);
    } else if (c == ' ') {
      // allowed between operands
    } else {
      fail(i, std::string("unexpected character '") + c + "'");
    }
  }
  in.push_back(cur);

  IndexList out;
  for (size_t i = arrow + 2; i < s.size(); ++i) {
    char c = s[i];
    if (c >= 'a' && c <= 'z')
      out.emplace_back(1, c);
    else if (c != ' ')
      fail(i, std::string("unexpected character '") + c + "'");
  }
  return {out, in};
}

std::string print_notation(const BatchedEinsum& e) {
  auto put = [](std::string& s, const IndexList& idx) {
    for (const std::string& sym : idx) {
      if (sym.size() != 1 || sym[0] < 'a' || sym[0] > 'z')
        throw error(errc::domain,
                    "index \"" + sym + "\" is not a single letter a-z; cannot print as notation");
      s += sym;
    }
  };
  std::string s;
  for (size_t j = 0; j < e.i_in.size(); ++j) {
    if (j) s += ',';
    put(s, e.i_in[j]);
  }
  s += "->";
  put(s, e.i_out);
  return s;
}

BatchedEinsum make_batched(const std::string& notation,
                           std::vector<std::vector<ArrayMeta>> args) {
  auto [out, in] = parse_notation(notation);
  BatchedEinsum e{out, in, std::move(args)};
  require_valid(e);
  return e;
}

BatchedEinsum parse_classic(const std::string& text) {
  std::optional<std::pair<IndexList, std::vector<IndexList>>> notation;
  std::vector<std::pair<int, std::vector<std::string>>> rows;  // line no + array names
  std::map<std::string, ArrayMeta> arrays;
  std::vector<std::string> array_order;

  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  int stage = 0;  // 0 = want einsum, 1 = rows, 2 = arrays
  while (std::getline(is, raw)) {
    ++line_no;
    size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty()) continue;

    size_t colon = line.find(':');
    if (colon == std::string::npos)
      throw error(errc::domain,
                  "line " + std::to_string(line_no) + ": expected \"key: value\", got \"" + line + "\"");
    std::string key = trim(line.substr(0, colon));
    std::string val = trim(line.substr(colon + 1));

    if (key == "einsum") {
      if (stage != 0)
        throw error(errc::domain, "line " + std::to_string(line_no) + ": stray einsum line");
      notation = parse_notation(val);
      stage = 1;
    } else if (key == "row") {
      if (stage == 0)
        throw error(errc::domain, "line " + std::to_string(line_no) + ": row before einsum line");
      if (stage == 2)
        throw error(errc::domain, "line " + std::to_string(line_no) + ": row after array lines");
      std::vector<std::string> names;
      for (const std::string& part : split(val, ',')) {
        std::string name = trim(part);
        if (!is_ident(name))
          throw error(errc::domain,
                      "line " + std::to_string(line_no) + ": bad array name \"" + name + "\"");
        names.push_back(name);
      }
      rows.emplace_back(line_no, names);
    } else if (key == "array") {
      if (stage == 0)
        throw error(errc::domain, "line " + std::to_string(line_no) + ": array before einsum line");
      stage = 2;
      std::istringstream fs(val);
      std::string name, dtype_s, shape_s, extra;
      if (!(fs >> name >> dtype_s >> shape_s) || (fs >> extra))
        throw error(errc::domain, "line " + std::to_string(line_no) +
                                      ": want \"array: <name> <dtype> <shape>\", got \"" + val + "\"");
      if (!is_ident(name))
        throw error(errc::domain,
                    "line " + std::to_string(line_no) + ": bad array name \"" + name + "\"");
      if (arrays.count(name))
        throw error(errc::domain,
                    "line " + std::to_string(line_no) + ": array " + name + " defined twice");
      ArrayMeta m{name, parse_shape(shape_s, line_no), dtype_from_name(dtype_s)};
      arrays.emplace(name, std::move(m));
      array_order.push_back(name);
    } else {
      throw error(errc::domain,
                  "line " + std::to_string(line_no) + ": unknown line kind \"" + key + "\"");
    }
  }

  if (!notation) throw error(errc::domain, "missing einsum line");
  if (rows.empty()) throw error(errc::domain, "missing row lines");

  BatchedEinsum e;
  e.i_out = notation->first;
  e.i_in = notation->second;
  std::set<std::string> used;
  for (auto& [no, names] : rows) {
    if (names.size() != e.i_in.size())
      throw error(errc::domain, "line " + std::to_string(no) + ": row has " +
                                    std::to_string(names.size()) + " arrays, einsum has " +
                                    std::to_string(e.i_in.size()) + " operands");
    std::vector<ArrayMeta> row;
    for (const std::string& name : names) {
      auto it = arrays.find(name);
      if (it == arrays.end())
        throw error(errc::domain,
                    "line " + std::to_string(no) + ": array " + name + " has no array line");
      row.push_back(it->second);
      used.insert(name);
    }
    e.args.push_back(std::move(row));
  }
  for (const std::string& name : array_order)
    if (!used.count(name))
      throw error(errc::domain, "array " + name + " is defined but never used");

  require_valid(e);
  return e;
}

std::string print_classic(const BatchedEinsum& e) {
  require_valid(e);
  std::string s = "einsum: " + print_notation(e) + "\n";
  for (const auto& row : e.args) {
    s += "row: ";
    for (size_t j = 0; j < row.size(); ++j) {
      if (j) s += ',';
      s += row[j].name;
    }
    s += '\n';
  }
  for (const ArrayMeta& m : universe(e))
    s += "array: " + m.name + " " + std::string(dtype_name(m.dtype)) + " " + shape_str(m) + "\n";
  return s;
}

std::string canonical_key(const BatchedEinsum& e) {
  CanonResult c = canonicalize(e);
  if (!equals(c.canonical, e))
    throw error(errc::domain, "canonical_key wants a canonical form; canonicalize first");

  std::string s = "FE1|b=" + std::to_string(e.b()) + "|n=" + std::to_string(e.n()) + "|out=";
  for (const std::string& sym : e.i_out) s += sym;
  s += "|in=";
  for (size_t j = 0; j < e.i_in.size(); ++j) {
    if (j) s += ';';
    for (const std::string& sym : e.i_in[j]) s += sym;
  }
  s += "|rows=";
  for (size_t i = 0; i < e.args.size(); ++i) {
    if (i) s += ';';
    for (size_t j = 0; j < e.args[i].size(); ++j) {
      if (j) s += ',';
      s += e.args[i][j].name;
    }
  }
  for (const ArrayMeta& m : universe(e))
    s += "|" + m.name + "=" + std::string(dtype_name(m.dtype)) + ":" + shape_str(m);
  return s;
}

}  // namespace feinsum
