#include "ksns/io.hpp"

#include <charconv>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace ksns {

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double to_double(const std::string& s, const char* what) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = b + s.size();
  while (b < e && *b == ' ') ++b;
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw IoError(std::string("snapshot: bad ") + what + " '" + s + "'");
  return v;
}

}  // namespace

void write_snapshot(std::ostream& os, const ScalarField& f, const std::string& name, double t) {
  if (name.find(',') != std::string::npos || name.find('\n') != std::string::npos) {
    throw IoError("snapshot name must not contain commas or newlines");
  }
  const DomainSpec& d = f.domain();
  os << std::setprecision(17);
  os << d.nx << ',' << d.ny << ',' << d.lx << ',' << d.ly << ',' << name << ',' << t << '\n';
  for (int j = 0; j < d.ny; ++j) {
    for (int i = 0; i < d.nx; ++i) {
      if (i) os << ',';
      os << f.at(i, j);
    }
    os << '\n';
  }
}

Snapshot read_snapshot(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw IoError("snapshot: missing header");
  const auto head = split(line);
  if (head.size() != 6) throw IoError("snapshot: header needs 6 fields");
  Snapshot s;
  s.domain.nx = static_cast<int>(to_double(head[0], "nx"));
  s.domain.ny = static_cast<int>(to_double(head[1], "ny"));
  s.domain.lx = to_double(head[2], "Lx");
  s.domain.ly = to_double(head[3], "Ly");
  s.name = head[4];
  s.t = to_double(head[5], "t");
  if (s.domain.nx <= 0 || s.domain.ny <= 0) throw IoError("snapshot: bad dimensions");
  s.values.reserve(static_cast<std::size_t>(s.domain.nx) * s.domain.ny);
  for (int j = 0; j < s.domain.ny; ++j) {
    if (!std::getline(is, line)) throw IoError("snapshot: missing row " + std::to_string(j));
    const auto row = split(line);
    if (static_cast<int>(row.size()) != s.domain.nx) {
      throw IoError("snapshot: row " + std::to_string(j) + " has " + std::to_string(row.size()) + " values");
    }
    for (const auto& v : row) s.values.push_back(to_double(v, "value"));
  }
  return s;
}

void write_snapshot_file(const std::filesystem::path& path, const ScalarField& f, const std::string& name,
                         double t) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  write_snapshot(os, f, name, t);
  if (!os) throw IoError("write failed: " + path.string());
}

Snapshot read_snapshot_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open " + path.string());
  return read_snapshot(is);
}

}  // namespace ksns
