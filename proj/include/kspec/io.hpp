#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "kspec/errors.hpp"
#include "kspec/signal.hpp"

namespace kspec {

// Round-trip-exact decimal formatting for all persisted doubles.
inline std::string format_double(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

// Single-column CSV, one sample per line, no header.
inline void write_signal_csv(const std::string& path, const Signal& x) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for write: " + path);
  for (double v : x) f << format_double(v) << "\n";
}

inline Signal read_signal_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open for read: " + path);
  Signal x;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    x.push_back(std::stod(line));
  }
  return x;
}

// Two-column CSV for (u, y) pairs.
inline void write_pair_csv(const std::string& path, const Signal& u,
                           const Signal& y) {
  if (u.size() != y.size()) throw LengthMismatch("write_pair_csv");
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open for write: " + path);
  for (std::size_t t = 0; t < u.size(); ++t) {
    f << format_double(u[t]) << "," << format_double(y[t]) << "\n";
  }
}

inline std::pair<Signal, Signal> read_pair_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open for read: " + path);
  Signal u, y;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw ConfigError("read_pair_csv: malformed line in " + path);
    }
    u.push_back(std::stod(line.substr(0, comma)));
    y.push_back(std::stod(line.substr(comma + 1)));
  }
  return {u, y};
}

// Binary signal container: "KSPSIG1\0" magic, u64 length, raw doubles.
inline void write_signal_bin(const std::string& path, const Signal& x) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for write: " + path);
  const char magic[8] = {'K', 'S', 'P', 'S', 'I', 'G', '1', '\0'};
  f.write(magic, 8);
  const std::uint64_t n = x.size();
  f.write(reinterpret_cast<const char*>(&n), sizeof(n));
  f.write(reinterpret_cast<const char*>(x.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
}

inline Signal read_signal_bin(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open for read: " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, "KSPSIG1\0", 8) != 0) {
    throw ConfigError("read_signal_bin: bad magic in " + path);
  }
  std::uint64_t n = 0;
  f.read(reinterpret_cast<char*>(&n), sizeof(n));
  Signal x(n);
  f.read(reinterpret_cast<char*>(x.data()),
         static_cast<std::streamsize>(n * sizeof(double)));
  if (!f) throw ConfigError("read_signal_bin: truncated file " + path);
  return x;
}

}  // namespace kspec
