#include <iostream>
#include <map>
#include <string>

#include "mtsc/io.hpp"

#include "CLI11.hpp"

namespace {

// Registers the shared numeric flags on a subcommand and wires them into the
// manifest's parameter map when present on the command line.
struct FlagSet {
  std::map<std::string, double> values;
  std::vector<std::pair<std::string, CLI::Option*>> opts;

  void add(CLI::App* cmd, const std::string& name, const std::string& desc) {
    values[name] = 0.0;
    opts.emplace_back(name, cmd->add_option("--" + name, values[name], desc));
  }

  void collect(mtsc::RunManifest& m) const {
    for (const auto& [name, opt] : opts)
      if (opt->count() > 0) m.params[name] = values.at(name);
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Rate-distortion regions and finite-blocklength achievability "
      "simulations for two-encoder networks under the log-loss distortion "
      "measure"};
  app.require_subcommand(1);

  mtsc::RunManifest manifest;
  std::map<CLI::App*, FlagSet> flags;

  auto add_common = [&](CLI::App* cmd, bool needs_pmf = true) -> FlagSet& {
    if (needs_pmf)
      cmd->add_option("--pmf", manifest.input_path, "joint pmf JSON file")
          ->required();
    cmd->add_option("--seed", manifest.seed, "master seed (default 0)");
    cmd->add_option("--out", manifest.output_path, "output artifact path");
    cmd->add_option("--format", manifest.format, "csv | json")
        ->check(CLI::IsMember({"csv", "json"}));
    return flags[cmd];
  };

  CLI::App* verify = app.add_subcommand("verify",
                                        "validate a pmf file and print its "
                                        "entropy summary");
  add_common(verify);

  CLI::App* jd = app.add_subcommand("region-jd",
                                    "joint-distortion region: membership "
                                    "tests and boundary sampling");
  {
    FlagSet& f = add_common(jd);
    f.add(jd, "rx", "X-encoder rate (bits/symbol)");
    f.add(jd, "ry", "Y-encoder rate (bits/symbol)");
    f.add(jd, "d", "joint distortion budget (bits)");
    f.add(jd, "samples", "sample the boundary at this many points");
  }

  CLI::App* xd = app.add_subcommand("region-xd",
                                    "X-distortion region: membership, "
                                    "boundary solves, trade-off curves");
  {
    FlagSet& f = add_common(xd);
    f.add(xd, "rx", "X-encoder rate (bits/symbol)");
    f.add(xd, "ry", "Y-encoder rate (bits/symbol)");
    f.add(xd, "dx", "X distortion budget (bits)");
    f.add(xd, "ry-budget", "solve for g(ry_budget)");
    f.add(xd, "samples", "trade-off curve sample count");
    f.add(xd, "restarts", "solver restarts (default 32)");
    f.add(xd, "grid-step", "also run the lattice oracle at this step");
  }

  CLI::App* sim = app.add_subcommand("simulate",
                                     "finite-blocklength Monte Carlo of the "
                                     "achievability schemes");
  {
    sim->add_option("scheme", manifest.scheme, "wz | rd | jd | smsw | xd")
        ->required()
        ->check(CLI::IsMember({"wz", "rd", "jd", "smsw", "xd"}));
    FlagSet& f = add_common(sim);
    sim->add_option("--channel", manifest.channel_path,
                    "aux channel JSON for scheme xd (default: identity U=Y)");
    f.add(sim, "n", "blocklength (symbols)");
    f.add(sim, "rate", "encoder rate for wz/rd (bits/symbol)");
    f.add(sim, "eps", "slack (bits, default 0.1)");
    f.add(sim, "trials", "Monte Carlo trials (default 500)");
    f.add(sim, "clamp", "per-symbol distortion cap (default 30)");
    f.add(sim, "d", "joint distortion target for jd/smsw");
    f.add(sim, "mix", "time-share fraction for jd/smsw (default 0.5)");
    f.add(sim, "dx", "X distortion budget (smsw marginal / xd)");
    f.add(sim, "dy", "smsw conditional distortion budget");
  }

  CLI::App* rdfun = app.add_subcommand("rdfun",
                                       "closed-form point-to-point, "
                                       "side-information and erasure RD "
                                       "functions");
  {
    FlagSet& f = add_common(rdfun);
    f.add(rdfun, "d", "distortion budget (bits)");
    f.add(rdfun, "samples", "sweep [0, H(X)] at this many points");
  }

  CLI11_PARSE(app, argc, argv);

  CLI::App* chosen = app.get_subcommands().front();
  manifest.command = chosen->get_name();
  const auto it = flags.find(chosen);
  if (it != flags.end()) it->second.collect(manifest);

  try {
    return mtsc::run(manifest, std::cout);
  } catch (const std::exception& e) {
    std::cerr << mtsc::error_record(e) << "\n";
    return mtsc::exit_code_for(e);
  }
}
