#include "finsler/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "finsler/core/geometry.hpp"

namespace finsler::cli {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double to_double(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  double v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw ConfigError(what + ": not a number '" + s + "'");
  return v;
}

long long to_int(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  long long v = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size()) throw ConfigError(what + ": not an integer '" + s + "'");
  return v;
}

bool to_bool(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError(what + ": not a boolean '" + s + "'");
}

}  // namespace

RunConfig parse_config(const std::string& text, RunConfig cfg) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  // list keys replace base lists on first occurrence, then append
  std::set<std::string> seen;
  auto list = [&](std::vector<std::string>& v, const std::string& key, const std::string& value) {
    if (!seen.count(key)) v.clear();
    seen.insert(key);
    v.push_back(value);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    std::replace(key.begin(), key.end(), '-', '_');
    const std::string where = "line " + std::to_string(lineno) + " (" + key + ")";
    if (key == "energy") cfg.energy = value;
    else if (key == "dim") cfg.dim = static_cast<int>(to_int(value, where));
    else if (key == "point") list(cfg.points, key, value);
    else if (key == "samples") cfg.samples = static_cast<int>(to_int(value, where));
    else if (key == "box") list(cfg.box, key, value);
    else if (key == "constraint") list(cfg.constraints, key, value);
    else if (key == "max_rejects") cfg.max_rejects = static_cast<int>(to_int(value, where));
    else if (key == "tol") cfg.tol = to_double(value, where);
    else if (key == "kernel_tol") cfg.kernel_tol = to_double(value, where);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_int(value, where));
    else if (key == "checks" || key == "check") list(cfg.checks, "checks", value);
    else if (key == "deep_checks") cfg.deep = to_bool(value, where);
    else if (key == "field") list(cfg.fields, key, value);
    else if (key == "format") cfg.format = value;
    else if (key == "out") cfg.out = value;
    else throw ConfigError(where + ": unknown key");
  }
  return cfg;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  try {
    return parse_config(ss.str(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::vector<std::string> normalize_checks(const std::vector<std::string>& raw) {
  std::vector<std::string> out;
  for (const auto& item : raw)
    for (auto c : split(item, ',')) {
      if (c.empty()) continue;
      if (c.rfind("nullity:", 0) == 0) {
        std::string w = c.substr(8);
        if (w != "R" && w != "P" && w != "Q" && w != "barthel")
          throw ConfigError("unknown nullity target '" + w + "' (R, P, Q or barthel)");
      } else if (c != "identities" && c != "deep-checks" && c != "bracket" && c != "classify") {
        throw ConfigError("unknown check '" + c + "'");
      }
      if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
    }
  return out;
}

std::pair<std::vector<double>, std::vector<double>> parse_point(const std::string& text, int dim) {
  auto halves = split(text, ';');
  if (halves.size() != 2) throw ConfigError("point '" + text + "': expected x1,..,xn;y1,..,yn");
  std::vector<double> x, y;
  for (const auto& s : split(halves[0], ',')) x.push_back(to_double(s, "point"));
  for (const auto& s : split(halves[1], ',')) y.push_back(to_double(s, "point"));
  if (static_cast<int>(x.size()) != dim || static_cast<int>(y.size()) != dim)
    throw ConfigError("point '" + text + "': expected " + std::to_string(dim) + " coordinates on each side");
  return {x, y};
}

NamedField parse_field(const std::string& text, int dim) {
  auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("field '" + text + "': expected name=e1,..,en");
  NamedField f;
  f.name = trim(text.substr(0, eq));
  if (f.name.empty()) throw ConfigError("field '" + text + "': empty name");
  try {
    f.spec = dsl::FieldSpec::parse(text.substr(eq + 1), dim);
  } catch (const std::exception& e) {
    throw ConfigError("field '" + f.name + "': " + e.what());
  }
  return f;
}

Resolved resolve(const RunConfig& cfg) {
  Resolved r;
  r.raw = cfg;
  if (cfg.format != "text" && cfg.format != "json" && cfg.format != "csv")
    throw ConfigError("format must be text, json or csv");
  if (!(cfg.tol > 0 && cfg.tol < 1)) throw ConfigError("tol must lie in (0, 1)");
  if (!(cfg.kernel_tol > 0 && cfg.kernel_tol < 1)) throw ConfigError("kernel_tol must lie in (0, 1)");
  if (cfg.energy.empty()) throw ConfigError("no energy given");
  if (cfg.dim < 1) throw ConfigError("dim must be a positive integer");
  if (cfg.samples < 0) throw ConfigError("samples must be non-negative");
  try {
    r.energy = dsl::parse_energy(cfg.energy, cfg.dim);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("energy: ") + e.what());
  }
  r.checks = normalize_checks(cfg.checks);
  for (const auto& f : cfg.fields) {
    auto nf = parse_field(f, cfg.dim);
    for (const auto& g : r.fields)
      if (g.name == nf.name) throw ConfigError("duplicate field name '" + nf.name + "'");
    r.fields.push_back(std::move(nf));
  }
  for (const auto& p : cfg.points) {
    auto [x, y] = parse_point(p, cfg.dim);
    r.points.push_back(require_admissible(r.energy, x, y));
  }
  int count = cfg.samples > 0 ? cfg.samples : (r.points.empty() ? 3 : 0);
  if (count > 0) {
    oracle::SamplerConfig sc;
    sc.seed = cfg.seed;
    sc.dim = cfg.dim;
    sc.max_rejects = cfg.max_rejects;
    std::vector<oracle::Interval> box;
    for (const auto& b : cfg.box) {
      auto lh = split(b, ',');
      if (lh.size() != 2) throw ConfigError("box '" + b + "': expected lo,hi");
      oracle::Interval iv{to_double(lh[0], "box"), to_double(lh[1], "box")};
      if (!(iv.lo <= iv.hi)) throw ConfigError("box '" + b + "': lo > hi");
      box.push_back(iv);
    }
    if (box.empty()) box.push_back({0.5, 1.5});
    if (box.size() == 1) box.assign(2 * cfg.dim, box[0]);
    if (static_cast<int>(box.size()) != 2 * cfg.dim)
      throw ConfigError("box: give one interval or " + std::to_string(2 * cfg.dim) + " intervals");
    sc.box = box;
    for (const auto& c : cfg.constraints) {
      try {
        sc.constraints.push_back(oracle::Constraint::parse(c, cfg.dim));
      } catch (const std::exception& e) {
        throw ConfigError("constraint '" + c + "': " + e.what());
      }
    }
    r.sampler = sc;
    oracle::Sampler s(sc, r.energy);
    for (auto& p : s.take(count)) r.points.push_back(std::move(p));
  }
  return r;
}

}  // namespace finsler::cli
