#include "lpgm/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "lpgm/errors.hpp"
#include "lpgm/experiments.hpp"
#include "lpgm/output.hpp"
#include "lpgm/ratefn.hpp"
#include "lpgm/specfun.hpp"

namespace lpgm::cli {

namespace {

using Raw = std::map<std::string, std::string>;

struct OptionDef {
  const char* key;
  const char* default_value;  // nullptr: no default (optional or resolved later)
  const char* help;
};

struct SubcommandDef {
  const char* name;
  const char* description;
  std::vector<OptionDef> options;
};

const std::vector<OptionDef>& common_options() {
  static const std::vector<OptionDef> defs = {
      {"seed", "12345", "64-bit random seed"},
      {"format", "csv", "output format: csv or json"},
  };
  return defs;
}

const std::vector<SubcommandDef>& subcommands() {
  static const std::vector<SubcommandDef> defs = {
      {"constants",
       "m_p, e^{m_p}, CLT scale and related special-function values",
       {{"p", nullptr, "single exponent (overrides --p-list)"},
        {"p-list", "1,2,4", "comma-separated exponents"}}},
      {"rate-curve",
       "rate function J_p with G_p and the optimal tilt on a uniform theta grid",
       {{"p", nullptr, "single exponent (overrides --p-list)"},
        {"p-list", "1,2,10", "comma-separated exponents"},
        {"theta-min", "0.05", "smallest theta, in (0,1)"},
        {"theta-max", "0.95", "largest theta, in (0,1)"},
        {"points", "181", "number of grid points (>= 2)"}}},
      {"clt",
       "Monte Carlo check of the central limit theorem for R_n",
       {{"p", "2", "exponent"},
        {"n", "4000", "dimension"},
        {"reps", "2000", "replications"},
        {"measure", "cone", "ball, cone or surface"},
        {"a-grid", "-2,-1.5,-1,-0.5,0,0.5,1,1.5,2", "comma-separated offsets a"},
        {"form", "ratio", "ratio, or reduced (ball only: threshold e^{m_p}(1+a/sqrt n) n^{-1/p})"}}},
      {"ldp",
       "tail probabilities of R_n against the rate function",
       {{"p", "2", "exponent"},
        {"theta", "0.7", "comma-separated thresholds in (0,1)"},
        {"n", nullptr, "single dimension (overrides --n-list)"},
        {"n-list", "200", "comma-separated dimensions"},
        {"reps", "100000", "replications"},
        {"estimator", "tilted", "naive or tilted"},
        {"side", "auto", "upper, lower, or auto (rare side of e^{m_p})"}}},
      {"surface-vs-cone",
       "event probabilities under the surface measure versus the cone measure",
       {{"p", "4", "exponent (>= 1)"},
        {"n", nullptr, "single dimension (overrides --n-list)"},
        {"n-list", "10,100,1000", "comma-separated dimensions"},
        {"reps", "20000", "replications per dimension"},
        {"event", nullptr, "ratio-ge:<theta> or coord-le:<c>; default ratio-ge:e^{m_p}"}}},
  };
  return defs;
}

std::string normalize_key(std::string key) {
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) {
    return c == '_' ? '-' : static_cast<char>(std::tolower(c));
  });
  return key;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// ---------------------------------------------------------------------------
// value parsing

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError("--" + key + ": expected a number, got '" + text + "'");
  }
  return v;
}

std::int64_t parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError("--" + key + ": expected an integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw UsageError("--" + key + ": expected a non-negative integer, got '" + text + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& text) {
  std::vector<double> out;
  for (const auto& part : split(text)) out.push_back(parse_double(key, part));
  if (out.empty()) throw UsageError("--" + key + ": empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& text) {
  std::vector<int> out;
  for (const auto& part : split(text)) {
    const std::int64_t v = parse_int(key, part);
    if (v < 1 || v > 100000000) throw UsageError("--" + key + ": dimension out of range: " + part);
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw UsageError("--" + key + ": empty list");
  return out;
}

int parse_dimension(const std::string& key, const std::string& text) {
  const std::int64_t v = parse_int(key, text);
  if (v < 1 || v > 100000000) throw UsageError("--" + key + ": must be in [1, 1e8], got " + text);
  return static_cast<int>(v);
}

std::int64_t parse_reps(const std::string& text) {
  const std::int64_t v = parse_int("reps", text);
  if (v < 1) throw UsageError("--reps: must be >= 1, got " + text);
  return v;
}

PParam parse_p(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (!(v > 0.0) || !std::isfinite(v)) throw UsageError("--" + key + ": p must be > 0, got " + text);
  return PParam(v);
}

// Resolves a (single, list) option pair; `single` wins when present.
std::string resolve_list(const Raw& raw, const std::string& single, const std::string& list) {
  const auto it = raw.find(single);
  if (it != raw.end()) return it->second;
  return raw.at(list);
}

// ---------------------------------------------------------------------------
// subcommands

struct Invocation {
  std::string subcommand;
  Raw raw;              // resolved string values (flags > config file > defaults)
  std::uint64_t seed = 0;
  std::string format;
  unsigned threads = 0;
};

output::Table make_table(const Invocation& inv, const std::vector<std::pair<std::string, std::string>>& config) {
  output::Table table;
  table.meta.emplace_back("tool", std::string(kToolName) + " " + kToolVersion);
  table.meta.emplace_back("subcommand", inv.subcommand);
  for (const auto& [k, v] : config) table.meta.emplace_back("config." + k, v);
  return table;
}

output::Table cmd_constants(const Invocation& inv) {
  const std::string p_text = resolve_list(inv.raw, "p", "p-list");
  std::vector<PParam> ps;
  for (const auto& part : split(p_text)) ps.push_back(parse_p("p-list", part));
  if (ps.empty()) throw UsageError("--p-list: empty list");

  output::Table table = make_table(inv, {{"p-list", p_text}, {"seed", std::to_string(inv.seed)}, {"format", inv.format}});
  table.columns = {"p", "m_p", "exp_m_p", "clt_sigma", "digamma_inv_p", "trigamma_inv_p",
                   "g_domain_lo", "g_domain_hi", "g_at_exp_m_p"};
  for (const PParam& p : ps) {
    const double m = ratefn::m_p(p);
    table.rows.push_back({p.value(), m, std::exp(m), ratefn::clt_sigma(p), specfun::digamma(1.0 / p.value()),
                          specfun::trigamma(1.0 / p.value()), 0.0, 1.0, ratefn::g_p(std::exp(m), p)});
  }
  return table;
}

output::Table cmd_rate_curve(const Invocation& inv) {
  const std::string p_text = resolve_list(inv.raw, "p", "p-list");
  std::vector<PParam> ps;
  for (const auto& part : split(p_text)) ps.push_back(parse_p("p-list", part));
  if (ps.empty()) throw UsageError("--p-list: empty list");
  const double lo = parse_double("theta-min", inv.raw.at("theta-min"));
  const double hi = parse_double("theta-max", inv.raw.at("theta-max"));
  const std::int64_t points = parse_int("points", inv.raw.at("points"));
  if (!(lo > 0.0 && lo < hi && hi < 1.0)) {
    throw UsageError("rate-curve: need 0 < theta-min < theta-max < 1");
  }
  if (points < 2 || points > 10000000) throw UsageError("--points: must be in [2, 1e7]");

  output::Table table = make_table(inv, {{"p-list", p_text},
                                         {"theta-min", inv.raw.at("theta-min")},
                                         {"theta-max", inv.raw.at("theta-max")},
                                         {"points", inv.raw.at("points")},
                                         {"seed", std::to_string(inv.seed)},
                                         {"format", inv.format}});
  table.columns = {"p", "theta", "j", "g", "s_star", "t_star"};
  for (const PParam& p : ps) {
    for (const RatePoint& rp : ratefn::rate_curve(p, lo, hi, static_cast<int>(points))) {
      table.rows.push_back({p.value(), rp.theta, rp.j_value, rp.g_value, rp.s_star, rp.t_star});
    }
  }
  return table;
}

output::Table cmd_clt(const Invocation& inv) {
  CltConfig config;
  config.p = parse_p("p", inv.raw.at("p")).value();
  config.n = parse_dimension("n", inv.raw.at("n"));
  config.reps = parse_reps(inv.raw.at("reps"));
  config.measure = parse_measure(inv.raw.at("measure"));
  config.a_grid = parse_double_list("a-grid", inv.raw.at("a-grid"));
  config.seed = inv.seed;
  config.threads = inv.threads;
  const std::string form = inv.raw.at("form");
  if (form != "ratio" && form != "reduced") throw UsageError("--form: expected ratio or reduced");

  const CltResult result = form == "ratio" ? clt_experiment(config) : reduced_form_experiment(config);

  output::Table table = make_table(inv, {{"p", inv.raw.at("p")},
                                         {"n", inv.raw.at("n")},
                                         {"reps", inv.raw.at("reps")},
                                         {"measure", inv.raw.at("measure")},
                                         {"a-grid", inv.raw.at("a-grid")},
                                         {"form", form},
                                         {"seed", std::to_string(inv.seed)},
                                         {"format", inv.format}});
  const PParam p(config.p);
  table.meta.emplace_back("result.m_p", output::format_double(ratefn::m_p(p)));
  table.meta.emplace_back("result.sigma", output::format_double(result.sigma));
  table.meta.emplace_back("result.ks_distance", output::format_double(result.ks_distance));
  table.meta.emplace_back("result.half_prob", output::format_double(result.half_prob));
  table.meta.emplace_back("result.normalized_mean", output::format_double(result.normalized.mean));
  table.meta.emplace_back("result.normalized_sd", output::format_double(result.normalized.sd));
  table.meta.emplace_back("result.normalized_q05", output::format_double(result.normalized.q05));
  table.meta.emplace_back("result.normalized_q50", output::format_double(result.normalized.q50));
  table.meta.emplace_back("result.normalized_q95", output::format_double(result.normalized.q95));
  table.columns = {"a", "empirical_prob", "limit_prob", "abs_diff", "stderr"};
  for (const CltRow& row : result.rows) {
    table.rows.push_back({row.a, row.empirical_prob, row.limit_prob, row.abs_diff, row.std_error});
  }
  return table;
}

output::Table cmd_ldp(const Invocation& inv) {
  const PParam p = parse_p("p", inv.raw.at("p"));
  const std::vector<double> thetas = parse_double_list("theta", inv.raw.at("theta"));
  const std::string n_text = resolve_list(inv.raw, "n", "n-list");
  const std::vector<int> ns = parse_int_list("n-list", n_text);
  const std::int64_t reps = parse_reps(inv.raw.at("reps"));
  const Estimator estimator = parse_estimator(inv.raw.at("estimator"));
  const std::string side_text = inv.raw.at("side");
  if (side_text != "auto") parse_side(side_text);
  for (double theta : thetas) {
    if (!(theta > 0.0 && theta < 1.0)) {
      throw UsageError("--theta: must lie in (0,1) where the rate is finite, got " + output::format_double(theta));
    }
  }

  output::Table table = make_table(inv, {{"p", inv.raw.at("p")},
                                         {"theta", inv.raw.at("theta")},
                                         {"n-list", n_text},
                                         {"reps", inv.raw.at("reps")},
                                         {"estimator", inv.raw.at("estimator")},
                                         {"side", side_text},
                                         {"seed", std::to_string(inv.seed)},
                                         {"format", inv.format}});
  table.columns = {"theta", "side", "n", "estimator", "minus_log_prob_per_n", "j_reference", "rel_err",
                   "stderr", "prob", "hits", "flags"};
  for (int n : ns) {
    for (double theta : thetas) {
      LdpConfig config;
      config.p = p.value();
      config.theta = theta;
      config.n = n;
      config.reps = reps;
      config.side = side_text == "auto" ? natural_side(theta, p) : parse_side(side_text);
      config.seed = inv.seed;
      config.threads = inv.threads;
      const LdpResult r = estimator == Estimator::Naive ? ldp_naive(config) : ldp_tilted(config);
      const double minus = -r.log_prob_per_n;
      const double diff = std::abs(minus - r.j_reference);
      const double rel = r.j_reference > 0.0 ? diff / r.j_reference : diff;
      std::vector<std::string> flags;
      if (r.zero_count) flags.emplace_back("zero_count");
      if (r.feasibility_warning) flags.emplace_back("infeasible");
      std::string flag_text = flags.empty() ? "" : flags[0];
      for (std::size_t i = 1; i < flags.size(); ++i) flag_text += ";" + flags[i];
      table.rows.push_back({theta, to_string(r.side), std::int64_t{n}, to_string(r.estimator), minus,
                            r.j_reference, rel, r.std_error, r.prob, r.hits, flag_text});
    }
  }
  return table;
}

output::Table cmd_surface_vs_cone(const Invocation& inv) {
  const PParam p = parse_p("p", inv.raw.at("p"));
  const std::string n_text = resolve_list(inv.raw, "n", "n-list");
  const std::vector<int> ns = parse_int_list("n-list", n_text);
  const std::int64_t reps = parse_reps(inv.raw.at("reps"));
  p.require_surface_support();
  EventSpec event{EventSpec::Kind::RatioAtLeast, std::exp(ratefn::m_p(p))};
  if (const auto it = inv.raw.find("event"); it != inv.raw.end()) event = EventSpec::parse(it->second);

  output::Table table = make_table(inv, {{"p", inv.raw.at("p")},
                                         {"n-list", n_text},
                                         {"reps", inv.raw.at("reps")},
                                         {"event", event.to_string()},
                                         {"seed", std::to_string(inv.seed)},
                                         {"format", inv.format}});
  table.columns = {"n", "cone_prob", "surface_prob", "diff", "stderr"};
  for (const SurfaceConeRow& row : surface_vs_cone(p.value(), ns, reps, event, inv.seed, inv.threads)) {
    table.rows.push_back({std::int64_t{row.n}, row.cone_prob, row.surface_prob, row.diff, row.std_error});
  }
  return table;
}

output::Table dispatch(const Invocation& inv) {
  if (inv.subcommand == "constants") return cmd_constants(inv);
  if (inv.subcommand == "rate-curve") return cmd_rate_curve(inv);
  if (inv.subcommand == "clt") return cmd_clt(inv);
  if (inv.subcommand == "ldp") return cmd_ldp(inv);
  if (inv.subcommand == "surface-vs-cone") return cmd_surface_vs_cone(inv);
  throw UsageError("unknown subcommand " + inv.subcommand);
}

}  // namespace

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::map<std::string, std::string> values;
  std::string line;
  static const std::string kEcho = "# config.";
  while (std::getline(in, line)) {
    std::string body = trim(line);
    if (body.empty()) continue;
    if (body.rfind(kEcho, 0) == 0) {
      body = body.substr(kEcho.size());
    } else if (body[0] == '#') {
      continue;
    } else if (body.find('=') == std::string::npos) {
      break;  // start of data (e.g. a CSV header row)
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw UsageError("config file '" + path + "': malformed line '" + line + "'");
    values[normalize_key(trim(body.substr(0, eq)))] = trim(body.substr(eq + 1));
  }
  return values;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Geometric vs p-generalized means on l_p spheres and balls: constants, rate function, "
               "CLT and large-deviation experiments",
               kToolName};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  std::map<std::string, Raw> flag_values;
  std::map<std::string, std::string> config_paths;
  std::map<std::string, unsigned> thread_counts;
  std::map<std::string, std::string> out_paths;
  std::map<std::string, CLI::App*> apps;

  for (const SubcommandDef& def : subcommands()) {
    CLI::App* sub = app.add_subcommand(def.name, def.description);
    apps[def.name] = sub;
    Raw& raw = flag_values[def.name];
    auto add = [&](const OptionDef& opt) {
      std::string help = opt.help;
      if (opt.default_value) help += std::string(" [default: ") + opt.default_value + "]";
      sub->add_option(std::string("--") + opt.key, raw[opt.key], help)->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    };
    for (const OptionDef& opt : def.options) add(opt);
    for (const OptionDef& opt : common_options()) add(opt);
    sub->add_option("--out", out_paths[def.name], "output file (default: stdout)");
    sub->add_option("--config", config_paths[def.name], "key=value config file; flags override it");
    thread_counts[def.name] = 0;
    sub->add_option("--threads", thread_counts[def.name], "worker threads (0 = all cores); never changes results");
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << kToolName << ": " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    const SubcommandDef* def = nullptr;
    for (const SubcommandDef& d : subcommands()) {
      if (apps[d.name]->parsed()) def = &d;
    }
    if (def == nullptr) throw UsageError("no subcommand given");
    CLI::App* sub = apps[def->name];

    Invocation inv;
    inv.subcommand = def->name;
    std::vector<OptionDef> all = def->options;
    all.insert(all.end(), common_options().begin(), common_options().end());

    Raw file_values;
    if (!config_paths[def->name].empty()) file_values = read_config_file(config_paths[def->name]);
    for (const auto& [key, value] : file_values) {
      const bool known = std::any_of(all.begin(), all.end(), [&](const OptionDef& o) { return key == o.key; });
      if (!known) throw UsageError("config file: unknown key '" + key + "' for " + def->name);
    }
    for (const OptionDef& opt : all) {
      if (sub->get_option(std::string("--") + opt.key)->count() > 0) {
        inv.raw[opt.key] = flag_values[def->name][opt.key];
      } else if (const auto it = file_values.find(opt.key); it != file_values.end()) {
        inv.raw[opt.key] = it->second;
      } else if (opt.default_value) {
        inv.raw[opt.key] = opt.default_value;
      }
    }
    inv.seed = parse_u64("seed", inv.raw.at("seed"));
    inv.format = inv.raw.at("format");
    if (inv.format != "csv" && inv.format != "json") throw UsageError("--format: expected csv or json");
    inv.threads = thread_counts[def->name];

    const output::Table table = dispatch(inv);
    std::ostringstream buffer;
    if (inv.format == "json") {
      output::write_json(buffer, table);
    } else {
      output::write_csv(buffer, table);
    }

    const std::string& path = out_paths[def->name];
    if (path.empty()) {
      out << buffer.str();
    } else {
      std::ofstream file(path, std::ios::binary | std::ios::trunc);
      if (!file) throw IoError("cannot open '" + path + "' for writing");
      file << buffer.str();
      file.flush();
      if (!file) throw IoError("failed writing '" + path + "'");
      out << "wrote " << table.rows.size() << " rows to " << path << "\n";
    }
    return kExitOk;
  } catch (const UsageError& e) {
    err << kToolName << ": usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DomainError& e) {
    err << kToolName << ": domain error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnsupportedError& e) {
    err << kToolName << ": unsupported: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IoError& e) {
    err << kToolName << ": I/O error: " << e.what() << "\n";
    return kExitIo;
  } catch (const InvariantError& e) {
    err << kToolName << ": internal invariant violated: " << e.what() << "\n";
    return kExitInternal;
  } catch (const std::exception& e) {
    err << kToolName << ": internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace lpgm::cli
