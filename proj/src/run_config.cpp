#include "hypcm/run_config.hpp"

#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "hypcm/errors.hpp"

namespace hypcm {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0' || !std::isfinite(d))
    throw ConfigError("'" + key + "': expected a number, got '" + v + "'");
  return d;
}

long long to_int(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0') throw ConfigError("'" + key + "': expected an integer, got '" + v + "'");
  return i;
}

// Tracks which keys were consumed so leftovers can be reported.
class SectionReader {
 public:
  SectionReader(const IniSections& ini, std::string name) : name_(std::move(name)) {
    if (auto it = ini.find(name_); it != ini.end()) values_ = &it->second;
  }

  bool present() const { return values_ != nullptr; }

  std::optional<std::string> get(const std::string& key) {
    if (!values_) return std::nullopt;
    auto it = values_->find(key);
    if (it == values_->end()) return std::nullopt;
    used_.insert(key);
    return it->second;
  }

  void number(const std::string& key, double& out) {
    if (auto v = get(key)) out = to_double(qualified(key), *v);
  }
  void integer(const std::string& key, int& out) {
    if (auto v = get(key)) out = static_cast<int>(to_int(qualified(key), *v));
  }

  std::string qualified(const std::string& key) const { return name_ + "." + key; }

  void finish() const {
    if (!values_) return;
    for (const auto& [key, value] : *values_)
      if (!used_.count(key)) throw ConfigError("unknown key '" + qualified(key) + "'");
  }

 private:
  std::string name_;
  const std::map<std::string, std::string>* values_ = nullptr;
  std::set<std::string> used_;
};

std::optional<FieldSpec> read_field(const IniSections& ini, const std::string& section, const std::string& base_dir) {
  SectionReader r(ini, section);
  if (!r.present()) return std::nullopt;
  FieldSpec f;
  int given = 0;
  if (auto v = r.get("constant")) {
    f.kind = FieldSpec::Kind::Constant;
    f.constant = to_double(r.qualified("constant"), *v);
    ++given;
  }
  if (auto v = r.get("expr")) {
    f.kind = FieldSpec::Kind::Expression;
    f.text = *v;
    Expression::parse(f.text);
    ++given;
  }
  if (auto v = r.get("table")) {
    f.kind = FieldSpec::Kind::Table;
    std::filesystem::path p(*v);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    f.text = p.string();
    ++given;
  }
  if (auto v = r.get("column")) f.column = *v;
  r.finish();
  if (given != 1) throw ConfigError("[" + section + "] needs exactly one of constant, expr, table");
  return f;
}

}  // namespace

RunMode parse_run_mode(const std::string& s) {
  if (s == "solve") return RunMode::Solve;
  if (s == "validate") return RunMode::Validate;
  if (s == "steiner") return RunMode::Steiner;
  if (s == "sphere-test") return RunMode::SphereTest;
  throw ConfigError("unknown mode '" + s + "' (solve, validate, steiner, sphere-test)");
}

const char* run_mode_name(RunMode m) {
  switch (m) {
    case RunMode::Solve: return "solve";
    case RunMode::Validate: return "validate";
    case RunMode::Steiner: return "steiner";
    case RunMode::SphereTest: return "sphere-test";
  }
  return "unknown";
}

IniSections parse_ini(const std::string& text) {
  IniSections out;
  std::string section;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    for (std::size_t i = 0; i < line.size(); ++i)
      if (line[i] == '#' && (i == 0 || std::isspace(static_cast<unsigned char>(line[i - 1])))) {
        line.resize(i);
        break;
      }
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError(where + "empty section name");
      if (out.count(section)) throw ConfigError(where + "duplicate section [" + section + "]");
      out[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + "empty key");
    if (!out[section].emplace(key, value).second)
      throw ConfigError(where + "duplicate key '" + key + "' in [" + section + "]");
  }
  return out;
}

ScalarField FieldSpec::sample(const SphereGrid& grid) const {
  switch (kind) {
    case Kind::Constant:
      return ScalarField(grid.size(), constant);
    case Kind::Expression: {
      const Expression e = Expression::parse(text);
      return grid.sample([&](double t, double p) { return e(t, p); });
    }
    case Kind::Table: {
      std::ifstream in(text);
      if (!in) throw IoError("cannot open table '" + text + "'");
      std::string header;
      if (!std::getline(in, header)) throw ConfigError("table '" + text + "' is empty");
      const auto cols = split(header, ',');
      int ct = -1, cp = -1, cv = -1;
      for (int i = 0; i < static_cast<int>(cols.size()); ++i) {
        if (cols[i] == "theta") ct = i;
        if (cols[i] == "phi") cp = i;
        if (cols[i] == column) cv = i;
      }
      if (ct < 0 || cp < 0 || cv < 0)
        throw ConfigError("table '" + text + "' needs columns theta, phi, " + column);
      ScalarField out;
      std::string line;
      int row = 0;
      while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const auto cells = split(line, ',');
        const int need = std::max({ct, cp, cv});
        if (static_cast<int>(cells.size()) <= need)
          throw ConfigError("table '" + text + "' row " + std::to_string(row + 1) + " is short");
        if (row >= grid.size()) throw ConfigError("table '" + text + "' has more rows than grid nodes");
        const double th = to_double("theta", cells[ct]);
        const double ph = to_double("phi", cells[cp]);
        if (std::abs(th - grid.theta(row)) > 1e-9 || std::abs(ph - grid.phi(row)) > 1e-9)
          throw ConfigError("table '" + text + "' row " + std::to_string(row + 1) + " does not match grid node");
        out.push_back(to_double(column, cells[cv]));
        ++row;
      }
      if (row != grid.size())
        throw ConfigError("table '" + text + "' has " + std::to_string(row) + " rows, grid has " +
                          std::to_string(grid.size()) + " nodes");
      return out;
    }
  }
  return {};
}

std::string FieldSpec::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::Constant: os.precision(17); os << "constant " << constant; break;
    case Kind::Expression: os << "expr " << text; break;
    case Kind::Table: os << "table " << text << " [" << column << "]"; break;
  }
  return os.str();
}

void RunConfig::validate() const {
  if (n < 2) throw ConfigError("n must be at least 2");
  if (k < 1 || k > n) throw ConfigError("k must satisfy 1 <= k <= n");
  if (grid_mode == GridMode::FullS2 && n != 2) throw ConfigError("full-s2 grids require n = 2");
  if (mode == RunMode::Solve && !f0) throw ConfigError("solve needs an [f0] section");
  if (mode == RunMode::Validate && !f0) throw ConfigError("validate needs an [f0] section");
  if (mode == RunMode::Steiner && !body) throw ConfigError("steiner needs a [body] section");
  if (mask != "all" && mask != "north" && mask != "south")
    throw ConfigError("steiner.mask must be all, north or south");
  continuation.validate(n);
}

RunConfig parse_run_config(const std::string& text, RunMode mode, const std::string& base_dir) {
  const IniSections ini = parse_ini(text);
  static const std::set<std::string> known = {"problem", "grid", "f0", "continuation", "output",
                                               "steiner", "body", "candidate", "validate"};
  for (const auto& [name, _] : ini)
    if (!known.count(name)) throw ConfigError("unknown section [" + name + "]");

  RunConfig cfg;
  cfg.mode = mode;
  {
    SectionReader r(ini, "problem");
    r.integer("n", cfg.n);
    r.integer("k", cfg.k);
    if (auto v = r.get("seed")) cfg.seed = static_cast<std::uint64_t>(to_int("problem.seed", *v));
    r.finish();
  }
  {
    SectionReader r(ini, "grid");
    if (auto v = r.get("mode")) {
      if (*v == "full-s2") cfg.grid_mode = GridMode::FullS2;
      else if (*v == "axisymmetric") cfg.grid_mode = GridMode::Axisymmetric;
      else throw ConfigError("grid.mode must be full-s2 or axisymmetric");
    }
    r.integer("n_theta", cfg.n_theta);
    r.integer("n_phi", cfg.n_phi);
    r.finish();
  }
  cfg.f0 = read_field(ini, "f0", base_dir);
  cfg.body = read_field(ini, "body", base_dir);
  cfg.candidate = read_field(ini, "candidate", base_dir);
  {
    SectionReader r(ini, "continuation");
    auto& c = cfg.continuation;
    r.number("t_step_init", c.t_step_init);
    r.number("t_step_min", c.t_step_min);
    r.number("newton_tol", c.newton_tol);
    r.integer("newton_max_iter", c.newton_max_iter);
    r.number("fd_eps", c.fd_eps);
    r.number("backtrack_factor", c.backtrack_factor);
    r.integer("max_backtracks", c.max_backtracks);
    r.integer("threads", c.threads);
    r.finish();
  }
  {
    SectionReader r(ini, "output");
    if (auto v = r.get("dir")) cfg.out_dir = *v;
    if (auto v = r.get("emit")) {
      cfg.emit_csv = cfg.emit_mesh = cfg.emit_report = false;
      for (const auto& item : split(*v, ',')) {
        if (item == "csv") cfg.emit_csv = true;
        else if (item == "mesh") cfg.emit_mesh = true;
        else if (item == "report") cfg.emit_report = true;
        else throw ConfigError("output.emit: unknown item '" + item + "'");
      }
    }
    r.finish();
  }
  {
    SectionReader r(ini, "steiner");
    if (auto v = r.get("t_samples")) {
      cfg.t_samples.clear();
      for (const auto& item : split(*v, ',')) cfg.t_samples.push_back(to_double("steiner.t_samples", item));
    }
    if (auto v = r.get("mask")) cfg.mask = *v;
    r.finish();
  }
  {
    SectionReader r(ini, "validate");
    if (auto v = r.get("perturbations"))
      for (const auto& item : split(*v, '|')) {
        FieldSpec f;
        f.kind = FieldSpec::Kind::Expression;
        f.text = item;
        Expression::parse(item);
        cfg.perturbations.push_back(f);
      }
    r.finish();
  }
  cfg.continuation.k = cfg.k;
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::string& path, RunMode mode) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  const auto parent = std::filesystem::path(path).parent_path();
  return parse_run_config(ss.str(), mode, parent.empty() ? "." : parent.string());
}

}  // namespace hypcm
