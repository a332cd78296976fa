#include "myosim/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "myosim/rng.hpp"

namespace myosim {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad numeric value for '" + key + "': " + v);
  }
}

long long parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("bad integer value for '" + key + "': " + v);
  }
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split_list(v)) out.push_back(parse_double(key, s));
  return out;
}

std::vector<long long> parse_int_list(const std::string& key,
                                      const std::string& v) {
  std::vector<long long> out;
  for (const auto& s : split_list(v)) out.push_back(parse_int(key, s));
  return out;
}

void apply(ExperimentConfig& cfg, const std::string& section,
           const std::string& key, const std::string& value) {
  const std::string where = section + "." + key;
  if (section == "experiment") {
    if (key == "name") cfg.name = value;
    else if (key == "seed") {
      cfg.seed = static_cast<std::uint64_t>(parse_int(where, value));
      cfg.seed_set = true;
    } else if (key == "out_dir") cfg.out_dir = value;
    else if (key == "format") {
      if (value != "csv" && value != "csv.gz")
        throw ConfigError("format must be csv or csv.gz");
      cfg.format = value;
    } else if (key == "threads") cfg.threads = parse_int(where, value);
    else throw ConfigError("unknown key " + where);
  } else if (section == "potential") {
    if (key == "form") {
      if (value != "default_trig" && value != "user_table")
        throw ConfigError("form must be default_trig or user_table");
      cfg.form = value;
    } else if (key == "b") cfg.b = parse_double(where, value);
    else if (key == "kappa") cfg.kappa = parse_double(where, value);
    else if (key == "kappas") cfg.kappas = parse_double_list(where, value);
    else if (key == "table") cfg.table = value;
    else if (key == "g_hat") cfg.g_hat = parse_double(where, value);
    else throw ConfigError("unknown key " + where);
  } else if (section == "walk") {
    if (key == "n") cfg.n = static_cast<std::size_t>(parse_int(where, value));
    else if (key == "p") cfg.p = parse_double(where, value);
    else if (key == "y0") cfg.y0 = parse_int_list(where, value);
    else if (key == "L") cfg.L = parse_double(where, value);
    else if (key == "window") cfg.window = parse_int(where, value);
    else if (key == "L_grid") cfg.L_grid = parse_double_list(where, value);
    else throw ConfigError("unknown key " + where);
  } else if (section == "myopic") {
    if (key == "T") cfg.T = parse_double(where, value);
    else if (key == "eps") cfg.eps = parse_double(where, value);
    else throw ConfigError("unknown key " + where);
  } else if (section == "numerics") {
    if (key == "dt") cfg.dt = parse_double(where, value);
    else if (key == "horizon") cfg.horizon = parse_double(where, value);
    else if (key == "trials")
      cfg.trials = static_cast<std::size_t>(parse_int(where, value));
    else if (key == "max_rejects")
      cfg.max_rejects = static_cast<std::size_t>(parse_int(where, value));
    else if (key == "x0") cfg.x0 = parse_double_list(where, value);
    else throw ConfigError("unknown key " + where);
  } else {
    throw ConfigError("unknown section [" + section + "]");
  }
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig cfg;
  std::stringstream ss(text);
  std::string line, section;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto semi = line.find(';');
    if (semi != std::string::npos) line = line.substr(0, semi);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    if (section.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": key before any section");
    apply(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (!cfg.seed_set) throw ConfigError("seed is mandatory ([experiment] seed = ...)");
  return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

std::string canonical_config_text(const ExperimentConfig& cfg) {
  std::string out;
  char buf[64];
  auto add = [&out](const std::string& k, const std::string& v) {
    out += k;
    out += '=';
    out += v;
    out += '\n';
  };
  auto fnum = [&buf](double x) {
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return std::string(buf);
  };
  auto fint = [&buf](long long x) {
    std::snprintf(buf, sizeof buf, "%lld", x);
    return std::string(buf);
  };
  auto flist = [&](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += fnum(v[i]);
    }
    return s;
  };
  auto ilist = [&](const std::vector<long long>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ',';
      s += fint(v[i]);
    }
    return s;
  };
  add("experiment.name", cfg.name);
  std::snprintf(buf, sizeof buf, "%llu",
                static_cast<unsigned long long>(cfg.seed));
  add("experiment.seed", buf);
  add("experiment.format", cfg.format);
  add("potential.form", cfg.form);
  add("potential.b", fnum(cfg.b));
  add("potential.kappa", fnum(cfg.kappa));
  add("potential.kappas", flist(cfg.kappas));
  add("potential.table", cfg.table);
  add("potential.g_hat", fnum(cfg.g_hat));
  add("walk.n", fint(static_cast<long long>(cfg.n)));
  add("walk.p", fnum(cfg.p));
  add("walk.y0", ilist(cfg.y0));
  add("walk.L", fnum(cfg.L));
  add("walk.window", fint(cfg.window));
  add("walk.L_grid", flist(cfg.L_grid));
  add("myopic.T", fnum(cfg.T));
  add("myopic.eps", fnum(cfg.eps));
  add("numerics.dt", fnum(cfg.dt));
  add("numerics.horizon", fnum(cfg.horizon));
  add("numerics.trials", fint(static_cast<long long>(cfg.trials)));
  add("numerics.max_rejects", fint(static_cast<long long>(cfg.max_rejects)));
  add("numerics.x0", flist(cfg.x0));
  // out_dir and threads affect where and how fast, not what; they stay out
  // of the hash
  return out;
}

std::string config_hash_hex(const ExperimentConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(canonical_config_text(cfg))));
  return buf;
}

}  // namespace myosim
