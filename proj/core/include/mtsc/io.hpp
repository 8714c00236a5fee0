#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mtsc/discrete.hpp"

namespace mtsc {

inline constexpr char kVersion[] = "0.1.0";

// Parses the pmf file format {"pmf": [[...], ...]} and validates it.
JointPmf load_pmf(const std::string& path);

// Optional aux-channel file {"channel": [[...], ...]} (rows = y).
AuxChannel load_channel(const std::string& path);

/// A rectangular numeric table; the unit of CSV emission.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format_g9(double v);  // 9 significant digits
void write_csv(const Table& t, const std::string& path);
Table read_csv(const std::string& path);

/// One CLI invocation: command, input, command-specific parameters, seed,
/// and output destination. Every artifact's sidecar records the manifest
/// that produced it.
struct RunManifest {
  std::string command;  // region-jd | region-xd | simulate | rdfun | verify
  std::string scheme;   // simulate only: wz | rd | jd | smsw | xd
  std::string input_path;
  std::string channel_path;  // simulate xd only; empty = identity channel
  std::map<std::string, double> params;
  std::uint64_t seed = 0;
  std::string output_path;
  std::string format = "csv";  // csv | json
};

// Dispatches a manifest, writes artifacts and a one-line summary to `out`.
// Returns the process exit status (0 ok, 2 validation, 3 convergence flag,
// 4 io).
int run(const RunManifest& m, std::ostream& out);

// Maps a thrown error onto the documented exit codes.
int exit_code_for(const std::exception& e);

// Machine-readable error record emitted on failure.
std::string error_record(const std::exception& e);

}  // namespace mtsc
