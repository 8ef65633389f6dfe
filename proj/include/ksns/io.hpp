#pragma once

// Field snapshot files. First line: nx,ny,Lx,Ly,name,t (the values), then
// ny rows (increasing y) of nx comma-separated values (increasing x), 17
// significant digits.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "ksns/grid.hpp"

namespace ksns {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Snapshot {
  DomainSpec domain;
  std::string name;
  double t = 0.0;
  std::vector<double> values;  // row-major, k = j*nx + i

  ScalarField field() const { return ScalarField(domain, values); }
};

void write_snapshot(std::ostream& os, const ScalarField& f, const std::string& name, double t);
Snapshot read_snapshot(std::istream& is);

void write_snapshot_file(const std::filesystem::path& path, const ScalarField& f, const std::string& name, double t);
Snapshot read_snapshot_file(const std::filesystem::path& path);

}  // namespace ksns
