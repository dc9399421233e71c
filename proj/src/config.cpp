#include "epsolve/config.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "epsolve/expr.hpp"

namespace epsolve::config {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string item;
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::map<double, double> parse_table(const std::string& text, const std::string& what) {
  std::map<double, double> table;
  for (const std::string& entry : split(text, ',')) {
    auto pos = entry.find(':');
    if (pos == std::string::npos) {
      throw ConfigError(what + ": table entries are 'R:value', got '" + entry + "'");
    }
    table[std::stod(entry.substr(0, pos))] = std::stod(entry.substr(pos + 1));
  }
  if (table.empty()) throw ConfigError(what + ": empty table");
  return table;
}

Sampler expr_sampler(const std::string& re_src, const std::string& im_src, int dim) {
  expr::Expr re = expr::parse(re_src, dim);
  expr::Expr im = im_src.empty() ? expr::Expr() : expr::parse(im_src, dim);
  return [re, im](std::span<const double> x, int) -> cplx {
    return {expr::evaluate(re, x, 0.0), im.empty() ? 0.0 : expr::evaluate(im, x, 0.0)};
  };
}

}  // namespace

Ini Ini::parse(const std::string& text) {
  Ini ini;
  std::istringstream is(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (auto pos = line.find('#'); pos != std::string::npos) line.erase(pos);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("line " + std::to_string(lineno) + ": key outside any [section]");
    }
    ini.sections_[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return ini;
}

Ini Ini::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool Ini::has(const std::string& section, const std::string& key) const {
  auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key) > 0;
}

std::string Ini::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ConfigError("missing [" + section + "] " + key);
  return sections_.at(section).at(key);
}

std::string Ini::get_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Ini::number(const std::string& section, const std::string& key) const {
  const std::string v = get(section, key);
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("[" + section + "] " + key + ": not a number: '" + v + "'");
  }
}

double Ini::number_or(const std::string& section, const std::string& key,
                      double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

void Ini::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

void Ini::merge(const Ini& other) {
  for (const auto& [sec, kv] : other.sections_) {
    for (const auto& [k, v] : kv) sections_[sec][k] = v;
  }
}

namespace {

const std::map<std::string, std::string> kPresets = {
    {"free-gaussian", R"ini(
[problem]
family = linear
dimension = 1
horizon = 1
mu = 1

[state]
builtin = gaussian
class = H2+eps
C = 2.2
eps = 0.5
omega = 2:2, 4:2, 8:2, 16:2, 64:2, 4096:2

[accuracy]
eps = 0.0625

[pinned-constants]
C_T = 0.02
D1 = 1
c_grid = 16
c_time = 0.005
c_split = 0.001
c_sub = 1

[output]
path = free_gaussian.csv
snapshot_stride = 0
)ini"},
    {"coherent-field", R"ini(
[problem]
family = linear
dimension = 1
horizon = 1
mu = 0.14142135623730951

[state]
builtin = gaussian
class = H2+eps
C = 2.2
eps = 0.5
omega = 2:2, 4:2, 8:2, 16:2, 64:2, 4096:2

[potential]
v_con = -x1
v_con_g = 2:3, 4:5, 8:9, 16:17, 32:33, 64:65, 4096:4097
u_breakpoints = 0, 1
u_values = 50, 50
u_w11 = 50

[accuracy]
eps = 0.05

[pinned-constants]
C_T = 0.0075
D1 = 1
c_grid = 400
c_time = 2e-6
c_split = 1e-4
c_sub = 1

[output]
path = coherent_field.csv
snapshot_stride = 0
)ini"},
    {"quintic-blowup", R"ini(
[problem]
family = defocusing-nls
dimension = 1
horizon = 9.9
mu = 1
sigma = 5

[state]
builtin = quintic-soliton
class = H3+eps
C = 2.0
eps = 0.5
omega = 2:6, 4:6, 8:6, 4096:6

[accuracy]
eps = 0.125

[output]
path = quintic_blowup.csv
snapshot_stride = 100
)ini"},
    {"lattice-cubic", R"ini(
[problem]
family = lattice-nls
dimension = 1
horizon = 1
sigma = 3
nu = 1

[state]
re = exp(-x1^2/8)
class = S-eps
C = 4.0
eps = 2.0

[accuracy]
eps = 0.125

[pinned-constants]
C_T = 0.05
c_lattice = 1
c_time = 0.02
c_split = 0.02

[output]
path = lattice_cubic.csv
snapshot_stride = 0
)ini"}};

Family parse_family(const std::string& name) {
  if (name == "linear") return Family::Linear;
  if (name == "defocusing-nls") return Family::DefocusingNls;
  if (name == "lattice-nls") return Family::LatticeNls;
  throw ConfigError("unknown family '" + name + "'");
}

SobolevCertificate::Class parse_class(const std::string& name) {
  if (name == "H2+eps") return SobolevCertificate::Class::H2PlusEps2;
  if (name == "H3+eps") return SobolevCertificate::Class::H3PlusEps2;
  if (name == "S-eps") return SobolevCertificate::Class::SEps;
  throw ConfigError("unknown state class '" + name + "'");
}

Sampler builtin_state(const std::string& name, const BuiltProblem& bp) {
  if (name == "gaussian") {
    const cplx a0 = bp.a0, b0 = bp.b0;
    return [a0, b0](std::span<const double> x, int) -> cplx {
      cplx arg{0.0, 0.0};
      for (double c : x) arg += -cplx{0.0, 1.0} * b0 * c * c / (2.0 * a0);
      return std::exp(arg);
    };
  }
  if (name == "quintic-soliton") {
    // Blow-up family datum at t = 0 with T* = 10.
    return [](std::span<const double> x, int) -> cplx {
      const double t_star = 10.0;
      const double amp = std::sqrt(std::sqrt(3.0) / std::cosh(2.0 * x[0]));
      return amp * std::exp(cplx{0.0, -x[0] * x[0] / (4.0 * t_star)});
    };
  }
  throw ConfigError("unknown builtin state '" + name + "'");
}

}  // namespace

const std::string& preset_config(const std::string& name) {
  auto it = kPresets.find(name);
  if (it == kPresets.end()) {
    std::string known;
    for (const auto& [k, v] : kPresets) known += (known.empty() ? "" : ", ") + k;
    throw ConfigError("unknown builtin '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

BuiltProblem build_problem(const Ini& raw, bool pin_constants) {
  Ini ini = raw;
  std::string builtin;
  if (raw.has("builtin", "name")) {
    builtin = raw.get("builtin", "name");
    ini = Ini::parse(preset_config(builtin));
    ini.merge(raw);
  }

  BuiltProblem bp;
  bp.builtin = builtin;
  bp.problem.family = parse_family(ini.get_or("problem", "family", "linear"));
  bp.problem.dimension = static_cast<int>(ini.number_or("problem", "dimension", 1));
  bp.problem.horizon = ini.number_or("problem", "horizon", 1.0);
  bp.problem.mu = ini.number_or("problem", "mu", 1.0);
  bp.problem.sigma = static_cast<int>(ini.number_or("problem", "sigma", 3));
  bp.problem.nu = static_cast<int>(ini.number_or("problem", "nu", 1));
  bp.problem.validate();
  const int d = bp.problem.dimension;

  bp.a0 = cplx{ini.number_or("state", "A0_re", 1.0), ini.number_or("state", "A0_im", 0.0)};
  bp.b0 = cplx{ini.number_or("state", "B0_re", 0.0), ini.number_or("state", "B0_im", -1.0)};

  // State.
  if (ini.has("state", "builtin")) {
    bp.state.sampler = builtin_state(ini.get("state", "builtin"), bp);
  } else if (ini.has("state", "re")) {
    try {
      bp.state.sampler = expr_sampler(ini.get("state", "re"),
                                      ini.get_or("state", "im", ""), d);
    } catch (const expr::ExprError& e) {
      throw ConfigError(std::string("[state] expression: ") + e.what());
    }
  } else {
    throw ConfigError("[state] needs either builtin = ... or re = ...");
  }
  bp.state.sobolev.cls = parse_class(ini.get_or("state", "class", "H2+eps"));
  bp.state.sobolev.bound = ini.number_or("state", "C", 1.0);
  bp.state.sobolev.eps = ini.number_or("state", "eps", 0.5);
  if (ini.has("state", "omega")) {
    bp.state.clbbv = ClbbvMap(parse_table(ini.get("state", "omega"), "[state] omega"));
  } else {
    bp.state.clbbv = ClbbvMap(bp.state.sobolev.bound);
  }

  // Potential.
  if (ini.has("potential", "w_reg")) {
    SmoothPart part;
    try {
      part.sampler = expr_sampler(ini.get("potential", "w_reg"), "", d);
    } catch (const expr::ExprError& e) {
      throw ConfigError(std::string("[potential] w_reg: ") + e.what());
    }
    part.smoothness =
        ClbbvMap(parse_table(ini.get("potential", "w_reg_g"), "[potential] w_reg_g"));
    bp.potential.w_reg = std::move(part);
  }
  if (ini.has("potential", "v_con")) {
    SmoothPart part;
    try {
      part.sampler = expr_sampler(ini.get("potential", "v_con"), "", d);
    } catch (const expr::ExprError& e) {
      throw ConfigError(std::string("[potential] v_con: ") + e.what());
    }
    part.smoothness =
        ClbbvMap(parse_table(ini.get("potential", "v_con_g"), "[potential] v_con_g"));
    bp.potential.v_con = std::move(part);
    std::vector<double> ts, vs;
    for (const auto& s : split(ini.get("potential", "u_breakpoints"), ',')) {
      ts.push_back(std::stod(s));
    }
    for (const auto& s : split(ini.get("potential", "u_values"), ',')) {
      vs.push_back(std::stod(s));
    }
    bp.potential.u = ControlFunction(ts, vs, ini.number("potential", "u_w11"));
    bp.forcing_amplitude = bp.potential.u.sup();
  }
  if (ini.has("potential", "w_sing")) {
    SingularPart part;
    try {
      part.sampler = expr_sampler(ini.get("potential", "w_sing"), "", d);
    } catch (const expr::ExprError& e) {
      throw ConfigError(std::string("[potential] w_sing: ") + e.what());
    }
    part.lp_exponent = ini.number_or("potential", "w_sing_p", 2.0);
    part.min_gap = ini.number_or("potential", "w_sing_gap", 1.0);
    for (const auto& row : split(ini.get("potential", "singularities"), ';')) {
      std::vector<double> pt;
      std::istringstream is(row);
      double c;
      while (is >> c) pt.push_back(c);
      if (static_cast<int>(pt.size()) != d) {
        throw ConfigError("[potential] singularities: need " + std::to_string(d) +
                          " coordinates per point");
      }
      part.singularities.push_back(pt);
    }
    // f lookup table: rows "eps R delta K"; the map picks the row with the
    // largest tabulated eps <= requested and R >= requested.
    std::vector<std::array<double, 4>> rows;
    for (const auto& row : split(ini.get("potential", "f_table"), ';')) {
      std::istringstream is(row);
      std::array<double, 4> r{};
      if (!(is >> r[0] >> r[1] >> r[2] >> r[3])) {
        throw ConfigError("[potential] f_table rows are 'eps R delta K'");
      }
      rows.push_back(r);
    }
    part.blowup_control = [rows](double eps, double r_box) -> std::pair<double, double> {
      const std::array<double, 4>* best = nullptr;
      for (const auto& row : rows) {
        if (row[0] <= eps && row[1] >= r_box) {
          if (!best || row[0] > (*best)[0]) best = &row;
        }
      }
      if (!best) {
        throw ConfigError("[potential] f_table has no row covering the requested (eps, R)");
      }
      return {(*best)[2], (*best)[3]};
    };
    bp.potential.w_sing = std::move(part);
  }
  if (ini.has("potential", "Phi")) {
    expr::Expr phi = expr::parse(ini.get("potential", "Phi"), 1);
    bp.potential.w_eps_p_control = [phi](double r) {
      double x[1] = {r};
      return expr::evaluate(phi, x, 0.0);
    };
  }
  bp.potential.global_bound = ini.number_or("potential", "global_bound", 1.0);
  bp.potential.validate();

  bp.eps = ini.number_or("accuracy", "eps", 0.0625);
  if (bp.eps <= 0) throw ConfigError("[accuracy] eps must be positive");

  // Constants: conservative defaults; [constants] always applies;
  // [pinned-constants] only under --pin-constants.
  auto apply_constants = [&](const std::string& sec) {
    if (ini.sections().count(sec) == 0) return;
    if (ini.has(sec, "C_T")) bp.constants.c_t = ini.number(sec, "C_T");
    bp.constants.d1 = ini.number_or(sec, "D1", bp.constants.d1);
    bp.constants.c_flow_rate = ini.number_or(sec, "c_flow_rate", bp.constants.c_flow_rate);
    bp.constants.c_grid = ini.number_or(sec, "c_grid", bp.constants.c_grid);
    bp.constants.c_time = ini.number_or(sec, "c_time", bp.constants.c_time);
    bp.constants.c_split = ini.number_or(sec, "c_split", bp.constants.c_split);
    bp.constants.c_sub = ini.number_or(sec, "c_sub", bp.constants.c_sub);
    bp.constants.c_lattice = ini.number_or(sec, "c_lattice", bp.constants.c_lattice);
    bp.constants.d4 = ini.number_or(sec, "d4", bp.constants.d4);
    bp.constants.tail_eta = ini.number_or(sec, "tail_eta", bp.constants.tail_eta);
    const std::string rule = ini.get_or(sec, "radius_rule", "");
    if (rule == "tail-only") bp.constants.radius_rule = truncation::RadiusRule::TailOnly;
    else if (rule == "boundary-flux") bp.constants.radius_rule = truncation::RadiusRule::BoundaryFlux;
    else if (!rule.empty()) throw ConfigError("unknown radius_rule '" + rule + "'");
  };
  apply_constants("constants");
  if (pin_constants) apply_constants("pinned-constants");

  bp.output_path = ini.get_or("output", "path", "out.csv");
  bp.snapshot_stride = static_cast<int>(ini.number_or("output", "snapshot_stride", 0));

  return bp;
}

}  // namespace epsolve::config
