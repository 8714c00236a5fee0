#include "mtsc/io.hpp"

#include <array>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include "mtsc/logloss.hpp"
#include "mtsc/region_jd.hpp"
#include "mtsc/region_xd.hpp"
#include "mtsc/sim.hpp"

#include "json.hpp"

namespace mtsc {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("cannot read " + path);
  return ss.str();
}

ordered_json parse_json(const std::string& path) {
  try {
    return ordered_json::parse(slurp(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(path + ": " + e.what());
  }
}

std::vector<std::vector<double>> matrix_field(const ordered_json& j,
                                              const std::string& path,
                                              const std::string& field) {
  if (!j.contains(field) || !j[field].is_array())
    throw ParseError(path + ": missing \"" + field + "\" array");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j[field]) {
    if (!row.is_array()) throw ParseError(path + ": \"" + field + "\" rows must be arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number()) throw ParseError(path + ": non-numeric entry in \"" + field + "\"");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

// Round to 9 significant digits so JSON artifacts match the CSV precision.
double g9_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::strtod(buf, nullptr);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << text;
  if (!out) throw IoError("cannot write " + path);
}

double need(const RunManifest& m, const std::string& key) {
  const auto it = m.params.find(key);
  if (it == m.params.end())
    throw ValidationError(m.command + ": missing parameter --" + key);
  return it->second;
}

std::optional<double> get(const RunManifest& m, const std::string& key) {
  const auto it = m.params.find(key);
  if (it == m.params.end()) return std::nullopt;
  return it->second;
}

ordered_json metadata(const RunManifest& m) {
  ordered_json meta;
  meta["command"] = m.command;
  if (!m.scheme.empty()) meta["scheme"] = m.scheme;
  meta["version"] = kVersion;
  meta["seed"] = m.seed;
  meta["input"] = m.input_path;
  if (!m.channel_path.empty()) meta["channel"] = m.channel_path;
  meta["format"] = m.format;
  // Parameters are stored at full precision so an artifact can be rebuilt
  // from its sidecar alone.
  ordered_json params;
  for (const auto& [k, v] : m.params) params[k] = v;
  meta["params"] = std::move(params);
  return meta;
}

void write_sidecar(const RunManifest& m) {
  if (m.output_path.empty()) return;
  write_text(m.output_path + ".meta.json", metadata(m).dump(2) + "\n");
}

void emit_table(const RunManifest& m, const Table& t, ordered_json extra = {}) {
  if (m.output_path.empty()) return;
  if (m.format == "json") {
    ordered_json j = metadata(m);
    j["columns"] = t.columns;
    ordered_json rows = ordered_json::array();
    for (const auto& r : t.rows) {
      ordered_json row = ordered_json::array();
      for (double v : r) row.push_back(g9_value(v));
      rows.push_back(std::move(row));
    }
    j["rows"] = std::move(rows);
    if (!extra.is_null()) j["detail"] = std::move(extra);
    write_text(m.output_path, j.dump(2) + "\n");
    return;
  }
  write_csv(t, m.output_path);
  if (!extra.is_null()) {
    ordered_json meta = metadata(m);
    meta["detail"] = std::move(extra);
    write_text(m.output_path + ".meta.json", meta.dump(2) + "\n");
  } else {
    write_sidecar(m);
  }
}

SimConfig sim_config(const RunManifest& m) {
  SimConfig cfg;
  cfg.n = int(need(m, "n"));
  cfg.eps = get(m, "eps").value_or(0.1);
  cfg.trials = int(get(m, "trials").value_or(500));
  cfg.seed = m.seed;
  cfg.clamp = get(m, "clamp").value_or(30.0);
  return cfg;
}

XdOptions xd_options(const RunManifest& m) {
  XdOptions opts;
  opts.seed = m.seed;
  if (const auto r = get(m, "restarts")) opts.restarts = int(*r);
  return opts;
}

AuxChannel identity_channel_for(const JointPmf& p) {
  std::vector<double> w(std::size_t(p.l()) * p.l(), 0.0);
  for (int y = 0; y < p.l(); ++y) w[std::size_t(y) * p.l() + y] = 1.0;
  return AuxChannel{p.l(), p.l(), std::move(w)};
}

int run_verify(const RunManifest& m, std::ostream& out) {
  const JointPmf p = load_pmf(m.input_path);
  out << "pmf " << p.m() << "x" << p.l()
      << ": H(X)=" << format_g9(entropy(p.marginal_x()))
      << " H(Y)=" << format_g9(entropy(p.marginal_y()))
      << " H(X|Y)=" << format_g9(conditional_entropy(p, Axis::Y))
      << " H(Y|X)=" << format_g9(conditional_entropy(p, Axis::X))
      << " H(X,Y)=" << format_g9(joint_entropy(p)) << "\n";
  return 0;
}

int run_region_jd(const RunManifest& m, std::ostream& out) {
  const JointPmf p = load_pmf(m.input_path);
  if (const auto samples = get(m, "samples")) {
    const double d = need(m, "d");
    const auto pts = jd_boundary(p, d, int(*samples));
    Table t;
    t.columns = {"rx", "ry"};
    for (const auto& pt : pts) t.rows.push_back({pt.rx, pt.ry});
    emit_table(m, t);
    out << "region-jd: boundary d=" << format_g9(d) << " samples="
        << pts.size() << (m.output_path.empty() ? "" : " -> " + m.output_path)
        << "\n";
    return 0;
  }
  const JdQuery q{need(m, "rx"), need(m, "ry"), need(m, "d")};
  const auto [contains, cert] = jd_contains_lp(p, q);
  if (!m.output_path.empty()) {
    ordered_json j = metadata(m);
    j["contains"] = contains;
    if (cert) {
      j["certificate"]["delta_x"] = g9_value(cert->delta_x);
      j["certificate"]["delta_y"] = g9_value(cert->delta_y);
    }
    write_text(m.output_path, j.dump(2) + "\n");
  }
  out << "region-jd: contains=" << (contains ? "true" : "false");
  if (cert)
    out << " delta_x=" << format_g9(cert->delta_x)
        << " delta_y=" << format_g9(cert->delta_y);
  out << "\n";
  return 0;
}

int run_region_xd(const RunManifest& m, std::ostream& out) {
  const JointPmf p = load_pmf(m.input_path);
  const XdOptions opts = xd_options(m);
  if (get(m, "rx") && get(m, "dx")) {
    const XdQuery q{need(m, "rx"), need(m, "ry"), need(m, "dx")};
    const XdVerdict v = xd_contains(p, q, opts);
    if (!m.output_path.empty()) {
      ordered_json j = metadata(m);
      j["contains"] = v.contains;
      j["converged"] = v.converged;
      write_text(m.output_path, j.dump(2) + "\n");
    }
    out << "region-xd: contains=" << (v.contains ? "true" : "false")
        << " converged=" << (v.converged ? "true" : "false") << "\n";
    return v.converged ? 0 : 3;
  }
  if (const auto samples = get(m, "samples")) {
    const TradeoffCurve curve = xd_tradeoff_curve(p, int(*samples), opts);
    Table t;
    t.columns = {"ry_budget", "min_h_x_given_u"};
    ordered_json channels = ordered_json::array();
    for (const auto& pt : curve.points) {
      t.rows.push_back({pt.ry_budget, pt.min_h_x_given_u});
      ordered_json ch = ordered_json::array();
      for (double v : pt.achieving.w) ch.push_back(g9_value(v));
      channels.push_back(std::move(ch));
    }
    ordered_json extra;
    extra["note"] = "achievable upper bound on g(R_y)";
    extra["achieving_channels"] = std::move(channels);
    emit_table(m, t, std::move(extra));
    out << "region-xd: curve samples=" << curve.points.size()
        << (m.output_path.empty() ? "" : " -> " + m.output_path) << "\n";
    return 0;
  }
  const double budget = need(m, "ry-budget");
  const XdSolution sol = xd_min_hxu(p, budget, opts);
  Table t;
  t.columns = {"ry_budget", "min_h_x_given_u", "rate"};
  t.rows.push_back({budget, sol.h_x_given_u, sol.rate});
  std::optional<double> oracle;
  if (const auto step = get(m, "grid-step")) {
    oracle = xd_grid_oracle(p, budget, *step);
    t.columns.push_back("grid_oracle");
    t.rows.front().push_back(*oracle);
  }
  emit_table(m, t);
  out << "region-xd: g(" << format_g9(budget)
      << ")=" << format_g9(sol.h_x_given_u)
      << " rate=" << format_g9(sol.rate)
      << " converged=" << (sol.converged ? "true" : "false");
  if (oracle) out << " oracle=" << format_g9(*oracle);
  out << " (achievable upper bound)\n";
  return sol.converged ? 0 : 3;
}

int run_simulate(const RunManifest& m, std::ostream& out) {
  const JointPmf p = load_pmf(m.input_path);
  const SimConfig cfg = sim_config(m);
  SimResult r;
  if (m.scheme == "wz") {
    r = simulate_wz(p, cfg, need(m, "rate"));
  } else if (m.scheme == "rd") {
    r = simulate_rd_point(p.marginal_x(), cfg, need(m, "rate"));
  } else if (m.scheme == "jd") {
    r = simulate_jd_timeshare(p, cfg, need(m, "d"),
                              get(m, "mix").value_or(0.5));
  } else if (m.scheme == "smsw") {
    const double dx = need(m, "dx");
    const double dy = need(m, "dy");
    r = simulate_smsw(p, cfg, need(m, "d"), get(m, "mix").value_or(0.5),
                      DistortionSplit{dx + dy, dx, dy});
  } else if (m.scheme == "xd") {
    const AuxChannel ch = m.channel_path.empty()
                              ? identity_channel_for(p)
                              : load_channel(m.channel_path);
    r = simulate_xd(p, ch, cfg, need(m, "dx"));
  } else {
    throw UnknownCommand("simulate: unknown scheme \"" + m.scheme + "\"");
  }

  Table t;
  t.columns = {"mean_distortion", "block_error_rate", "clamped_fraction",
               "ci_halfwidth", "trials_run"};
  std::vector<double> row = {r.mean_distortion, r.block_error_rate,
                             r.clamped_fraction, r.ci_halfwidth,
                             double(r.trials_run)};
  const std::array<const char*, 2> rate_names = {"rate_x", "rate_y"};
  for (std::size_t i = 0; i < r.realized_rates.size() && i < 2; ++i) {
    t.columns.push_back(rate_names[i]);
    row.push_back(r.realized_rates[i]);
  }
  t.rows.push_back(std::move(row));
  emit_table(m, t);

  out << "simulate " << m.scheme
      << ": mean=" << format_g9(r.mean_distortion)
      << " block_err=" << format_g9(r.block_error_rate)
      << " clamped=" << format_g9(r.clamped_fraction)
      << " ci=" << format_g9(r.ci_halfwidth) << " rates=[";
  for (std::size_t i = 0; i < r.realized_rates.size(); ++i)
    out << (i ? "," : "") << format_g9(r.realized_rates[i]);
  out << "]\n";
  return 0;
}

int run_rdfun(const RunManifest& m, std::ostream& out) {
  const JointPmf p = load_pmf(m.input_path);
  const Dist px = p.marginal_x();
  Table t;
  t.columns = {"d", "rate_pp", "rate_wz", "rate_erasure"};
  auto row_for = [&](double d) {
    return std::vector<double>{d, rd_logloss(px, d), wz_logloss(p, d),
                               erasure_rd(px, std::min(d, 1.0))};
  };
  if (const auto samples = get(m, "samples")) {
    const double hx = entropy(px);
    const int n = std::max(2, int(*samples));
    for (int i = 0; i < n; ++i)
      t.rows.push_back(row_for(hx * double(i) / double(n - 1)));
  } else {
    t.rows.push_back(row_for(need(m, "d")));
  }
  emit_table(m, t);
  const auto& r = t.rows.front();
  out << "rdfun: d=" << format_g9(r[0]) << " rate_pp=" << format_g9(r[1])
      << " rate_wz=" << format_g9(r[2])
      << " rate_erasure=" << format_g9(r[3]);
  if (t.rows.size() > 1) out << " (" << t.rows.size() << " rows)";
  out << "\n";
  return 0;
}

}  // namespace

JointPmf load_pmf(const std::string& path) {
  const ordered_json j = parse_json(path);
  try {
    return validate_pmf(matrix_field(j, path, "pmf"));
  } catch (const ParseError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

AuxChannel load_channel(const std::string& path) {
  const ordered_json j = parse_json(path);
  const auto rows = matrix_field(j, path, "channel");
  if (rows.empty() || rows.front().empty())
    throw ParseError(path + ": empty channel");
  std::vector<double> flat;
  for (const auto& r : rows) {
    if (r.size() != rows.front().size())
      throw ParseError(path + ": channel is not rectangular");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  try {
    return validate_channel(int(rows.size()), int(rows.front().size()),
                            std::move(flat));
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

std::string format_g9(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void write_csv(const Table& t, const std::string& path) {
  std::ostringstream ss;
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    ss << (c ? "," : "") << t.columns[c];
  ss << "\n";
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c)
      ss << (c ? "," : "") << format_g9(row[c]);
    ss << "\n";
  }
  write_text(path, ss.str());
}

Table read_csv(const std::string& path) {
  std::istringstream in(slurp(path));
  Table t;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty csv");
  std::istringstream hs(line);
  std::string field;
  while (std::getline(hs, field, ',')) t.columns.push_back(field);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    while (std::getline(ls, field, ',')) {
      char* end = nullptr;
      row.push_back(std::strtod(field.c_str(), &end));
      if (end == field.c_str())
        throw ParseError(path + ": non-numeric csv field \"" + field + "\"");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

int run(const RunManifest& m, std::ostream& out) {
  if (m.command == "verify") return run_verify(m, out);
  if (m.command == "region-jd") return run_region_jd(m, out);
  if (m.command == "region-xd") return run_region_xd(m, out);
  if (m.command == "simulate") return run_simulate(m, out);
  if (m.command == "rdfun") return run_rdfun(m, out);
  throw UnknownCommand("unknown command \"" + m.command + "\"");
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e)) return 4;
  if (dynamic_cast<const ValidationError*>(&e)) return 2;
  return 3;
}

std::string error_record(const std::exception& e) {
  ordered_json j;
  const char* kind = "RuntimeError";
  if (dynamic_cast<const IoError*>(&e)) kind = "IoError";
  else if (dynamic_cast<const ParseError*>(&e)) kind = "ParseError";
  else if (dynamic_cast<const UnknownCommand*>(&e)) kind = "UnknownCommand";
  else if (dynamic_cast<const NegativeMass*>(&e)) kind = "NegativeMass";
  else if (dynamic_cast<const NotNormalized*>(&e)) kind = "NotNormalized";
  else if (dynamic_cast<const EmptyAlphabet*>(&e)) kind = "EmptyAlphabet";
  else if (dynamic_cast<const EnumerationTooLarge*>(&e)) kind = "EnumerationTooLarge";
  else if (dynamic_cast<const GridTooLarge*>(&e)) kind = "GridTooLarge";
  else if (dynamic_cast<const BudgetOutOfRange*>(&e)) kind = "BudgetOutOfRange";
  else if (dynamic_cast<const ValidationError*>(&e)) kind = "ValidationError";
  j["error"] = kind;
  j["message"] = e.what();
  return j.dump();
}

}  // namespace mtsc
