#include "feinsum/factsdb.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <sys/stat.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

namespace feinsum {

namespace {

constexpr const char* kHeader = "feinsum-facts v1";

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '%': out += "%25"; break;
      case '\t': out += "%09"; break;
      case '\n': out += "%0A"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape(const std::string& s, int line_no) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size())
      throw error(errc::io, "facts line " + std::to_string(line_no) + ": truncated escape");
    std::string hex = s.substr(i + 1, 2);
    if (hex == "25") out += '%';
    else if (hex == "09") out += '\t';
    else if (hex == "0A") out += '\n';
    else
      throw error(errc::io, "facts line " + std::to_string(line_no) + ": bad escape %" + hex);
    i += 2;
  }
  return out;
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s, int line_no) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw error(errc::io, "facts line " + std::to_string(line_no) + ": bad number \"" + s + "\"");
  return v;
}

std::string encode_row(const FactRecord& r) {
  return escape(r.canonical_key) + "\t" + escape(r.device_id) + "\t" + escape(r.transform_id) +
         "\t" + fmt_double(r.wall_time_s) + "\t" + fmt_double(r.flop_rate) + "\t" +
         escape(r.recorded_at) + "\t" + escape(r.meta);
}

struct LockFile {
  int fd = -1;
  explicit LockFile(const std::string& path) {
    fd = ::open(path.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
    if (fd < 0)
      throw error(errc::io, "cannot open lock file " + path + ": " + std::strerror(errno));
    if (::flock(fd, LOCK_EX) != 0) {
      int e = errno;
      ::close(fd);
      throw error(errc::io, "cannot lock " + path + ": " + std::strerror(e));
    }
  }
  ~LockFile() {
    if (fd >= 0) {
      ::flock(fd, LOCK_UN);
      ::close(fd);
    }
  }
  LockFile(const LockFile&) = delete;
  LockFile& operator=(const LockFile&) = delete;
};

}  // namespace

std::string now_iso8601_utc() {
  using namespace std::chrono;
  auto now = system_clock::now();
  std::time_t secs = system_clock::to_time_t(now);
  auto micros = duration_cast<microseconds>(now.time_since_epoch()).count() % 1000000;
  if (micros < 0) micros += 1000000;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[80];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%06lldZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec,
                static_cast<long long>(micros));
  return buf;
}

std::vector<FactRecord> load_facts(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    if (::access(path.c_str(), F_OK) != 0) return {};  // no database yet
    throw error(errc::io, "cannot read " + path + ": " + std::strerror(errno));
  }
  std::string line;
  if (!std::getline(in, line) || line != kHeader)
    throw error(errc::io, path + " is not a facts database (bad header)");

  std::vector<FactRecord> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cur;
    for (char c : line) {
      if (c == '\t') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    f.push_back(cur);
    if (f.size() != 7)
      throw error(errc::io, "facts line " + std::to_string(line_no) + ": want 7 fields, got " +
                                std::to_string(f.size()));
    FactRecord r;
    r.canonical_key = unescape(f[0], line_no);
    r.device_id = unescape(f[1], line_no);
    r.transform_id = unescape(f[2], line_no);
    r.wall_time_s = parse_double(f[3], line_no);
    r.flop_rate = parse_double(f[4], line_no);
    r.recorded_at = unescape(f[5], line_no);
    r.meta = unescape(f[6], line_no);
    out.push_back(std::move(r));
  }
  return out;
}

void record_facts(const std::string& path, const std::vector<FactRecord>& batch) {
  if (batch.empty()) return;
  std::vector<FactRecord> stamped = batch;
  for (FactRecord& r : stamped) {
    if (r.canonical_key.empty()) throw error(errc::domain, "fact has an empty canonical key");
    if (r.device_id.empty()) throw error(errc::domain, "fact has an empty device id");
    if (r.transform_id.empty()) throw error(errc::domain, "fact has an empty transform id");
    if (!(r.wall_time_s > 0.0) || !std::isfinite(r.wall_time_s))
      throw error(errc::domain, "fact wall time must be positive and finite");
    if (r.flop_rate < 0.0 || !std::isfinite(r.flop_rate))
      throw error(errc::domain, "fact flop rate must be nonnegative and finite");
    if (r.recorded_at.empty()) r.recorded_at = now_iso8601_utc();
  }

  LockFile lock(path + ".lock");
  std::vector<FactRecord> existing = load_facts(path);

  std::string tmp = path + ".tmp";
  std::ofstream out(tmp, std::ios::trunc);
  if (!out) throw error(errc::io, "cannot write " + tmp + ": " + std::strerror(errno));
  out << kHeader << "\n";
  for (const FactRecord& r : existing) out << encode_row(r) << "\n";
  for (const FactRecord& r : stamped) out << encode_row(r) << "\n";
  out.flush();
  if (!out) throw error(errc::io, "write to " + tmp + " failed");
  out.close();

  int fd = ::open(tmp.c_str(), O_RDONLY);
  if (fd >= 0) {
    ::fsync(fd);
    ::close(fd);
  }
  if (::rename(tmp.c_str(), path.c_str()) != 0)
    throw error(errc::io, "cannot replace " + path + ": " + std::strerror(errno));
}

std::optional<FactRecord> retrieve(const std::string& path, const std::string& canonical_key,
                                   const std::string& device_id) {
  std::optional<FactRecord> best;
  for (const FactRecord& r : load_facts(path)) {
    if (r.canonical_key != canonical_key || r.device_id != device_id) continue;
    if (!best || r.wall_time_s < best->wall_time_s ||
        (r.wall_time_s == best->wall_time_s && r.recorded_at >= best->recorded_at))
      best = r;
  }
  return best;
}

double flop_count(const BatchedEinsum& e) {
  double points = 1.0;
  for (const auto& [sym, len] : index_lengths(e)) {
    (void)sym;
    points *= static_cast<double>(len);
  }
  double per_point = static_cast<double>(e.n() - 1);
  if (!reduction_indices(e).empty()) per_point += 1.0;
  return static_cast<double>(e.b()) * points * per_point;
}

double footprint_bytes(const BatchedEinsum& e) {
  double bytes = 0.0;
  for (const ArrayMeta& m : universe(e))
    bytes += static_cast<double>(m.num_elements()) * dtype_size_bytes(m.dtype);

  std::map<std::string, std::int64_t> len = index_lengths(e);
  double out_elems = 1.0;
  for (const std::string& sym : e.i_out) out_elems *= static_cast<double>(len.at(sym));
  for (const auto& row : e.args) {
    Dtype widest = row[0].dtype;
    for (const ArrayMeta& m : row)
      if (dtype_rank(m.dtype) > dtype_rank(widest)) widest = m.dtype;
    bytes += out_elems * dtype_size_bytes(widest);
  }
  return bytes;
}

double arithmetic_intensity(const BatchedEinsum& e) {
  return flop_count(e) / footprint_bytes(e);
}

std::vector<DeviceModel> device_presets() {
  return {
      {"mi250x", 14.9, 1.0},
      {"h100", 12.55, 1.0},
      {"titanv", 9.41, 1.0},
      {"p100", 7.24, 1.0},
  };
}

std::optional<DeviceModel> device_preset(const std::string& id) {
  for (const DeviceModel& d : device_presets())
    if (d.id == id) return d;
  return std::nullopt;
}

double roofline_flop_rate(const BatchedEinsum& e, const DeviceModel& d) {
  return std::min(d.peak_flops, arithmetic_intensity(e) * d.bandwidth);
}

bool memory_bound(const BatchedEinsum& e, const DeviceModel& d) {
  return arithmetic_intensity(e) < d.peak_flops / d.bandwidth;
}

}  // namespace feinsum
