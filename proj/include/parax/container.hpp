#pragma once

// Self-describing container for gridded scalar data and field snapshots:
// an ASCII header (magic, kind, n0, dims, spacing, origin, optional extra
// key/value pairs) terminated by a "data" line, followed by the samples as
// raw little-endian float64, row-major with x fastest.

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "parax/errors.hpp"
#include "parax/types.hpp"

namespace parax {

struct Container {
  std::string kind;  // "zeta2d", "zeta3d", "field4", ...
  double n0 = 0.0;
  std::array<std::int64_t, 3> dims{1, 1, 1};
  Vec3 spacing{0, 0, 0};
  Vec3 origin{0, 0, 0};
  std::map<std::string, double> extra;
  std::vector<double> data;

  std::int64_t sample_count() const { return dims[0] * dims[1] * dims[2]; }
};

inline constexpr const char* kContainerMagic = "PXC1";

inline void write_container(const std::string& path, const Container& c) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_container: cannot open " + path);
  out.precision(17);
  out << kContainerMagic << "\n";
  out << "kind " << c.kind << "\n";
  out << "n0 " << c.n0 << "\n";
  out << "dims " << c.dims[0] << " " << c.dims[1] << " " << c.dims[2] << "\n";
  out << "spacing " << c.spacing.x() << " " << c.spacing.y() << " "
      << c.spacing.z() << "\n";
  out << "origin " << c.origin.x() << " " << c.origin.y() << " " << c.origin.z()
      << "\n";
  for (const auto& [k, v] : c.extra) out << "extra " << k << " " << v << "\n";
  out << "data\n";
  out.write(reinterpret_cast<const char*>(c.data.data()),
            std::streamsize(c.data.size() * sizeof(double)));
  if (!out) throw IoError("write_container: write failed for " + path);
}

inline Container read_container(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("read_container: cannot open " + path);
  Container c;
  std::string line;
  if (!std::getline(in, line) || line != kContainerMagic)
    throw IoError("read_container: bad magic in " + path);
  bool saw_data = false;
  while (std::getline(in, line)) {
    if (line == "data") {
      saw_data = true;
      break;
    }
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "kind") {
      ls >> c.kind;
    } else if (key == "n0") {
      ls >> c.n0;
    } else if (key == "dims") {
      ls >> c.dims[0] >> c.dims[1] >> c.dims[2];
    } else if (key == "spacing") {
      ls >> c.spacing.x() >> c.spacing.y() >> c.spacing.z();
    } else if (key == "origin") {
      ls >> c.origin.x() >> c.origin.y() >> c.origin.z();
    } else if (key == "extra") {
      std::string name;
      double v;
      ls >> name >> v;
      c.extra[name] = v;
    } else {
      throw IoError("read_container: unknown header key '" + key + "' in " + path);
    }
    if (ls.fail())
      throw IoError("read_container: malformed header line '" + line + "' in " + path);
  }
  if (!saw_data) throw IoError("read_container: missing data section in " + path);
  std::int64_t count = c.sample_count();
  if (c.kind == "field4") count *= 8;  // re/im planes for 4 components
  if (count <= 0) throw IoError("read_container: non-positive sample count");
  c.data.resize(std::size_t(count));
  in.read(reinterpret_cast<char*>(c.data.data()),
          std::streamsize(c.data.size() * sizeof(double)));
  if (in.gcount() != std::streamsize(c.data.size() * sizeof(double)))
    throw IoError("read_container: truncated payload in " + path);
  return c;
}

}  // namespace parax
