#pragma once

#include <iosfwd>
#include <map>
#include <string>

#include "epsolve/budget.hpp"
#include "epsolve/problem.hpp"

namespace epsolve::config {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Flat INI-style sections of key = value pairs; '#' starts a comment.
class Ini {
 public:
  static Ini parse(const std::string& text);
  static Ini parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key, double fallback) const;

  void set(const std::string& section, const std::string& key, const std::string& value);
  /// Overlay: entries of `other` replace entries here.
  void merge(const Ini& other);

  const std::map<std::string, std::map<std::string, std::string>>& sections() const {
    return sections_;
  }

 private:
  std::map<std::string, std::map<std::string, std::string>> sections_;
};

/// A fully-built problem instance ready for planning and solving.
struct BuiltProblem {
  ProblemSpec problem;
  InitialState state;
  PotentialModel potential;
  budget::Constants constants;
  double eps = 0.0625;
  std::string output_path = "out.csv";
  int snapshot_stride = 0;
  std::string builtin;  // preset name when one seeded the config
  // Coherent-field reference parameters (builtin runs carry them along).
  cplx a0{1.0, 0.0};
  cplx b0{0.0, -1.0};
  double forcing_amplitude = 0.0;
};

/// Parses a config (optionally seeded by [builtin] name = ...) into a
/// runnable problem.  Spatial expressions use the expr grammar with
/// variables x1..xd; certificate tables are "R:value" lists.
BuiltProblem build_problem(const Ini& ini, bool pin_constants);

/// Embedded preset configs: "free-gaussian", "coherent-field",
/// "quintic-blowup", "lattice-cubic".
const std::string& preset_config(const std::string& name);

}  // namespace epsolve::config
