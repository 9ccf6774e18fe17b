// Command-line front end for the experiment harness.

#include "yamabe/errors.hpp"
#include "yamabe/lab.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

struct Common {
  std::string config;
  std::string out;
  std::vector<double> eps;
  int seeds = -1;
  int jobs = 0;
  bool quiet = false;
};

void add_common(CLI::App* sub, Common& c, bool config_required) {
  auto* opt = sub->add_option("--config", c.config, "YAML experiment config");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (overrides output.dir)");
  sub->add_option("--eps", c.eps, "Override the eps list");
  sub->add_option("--seeds", c.seeds, "Override seeds.count")->check(CLI::NonNegativeNumber);
  sub->add_option("--jobs", c.jobs, "Concurrent seed runs")->check(CLI::PositiveNumber);
  sub->add_flag("--quiet", c.quiet, "Suppress progress output");
}

void print_summary(const yamabe::SolutionArchive& a) {
  std::cout << yamabe::summary_csv(yamabe::summarize(a));
  if (a.kind == "multiplicity")
    std::cout << "# cluster counts are orbits modulo lattice translations and u -> -u\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nodal-solution experiments for -eps^2 Lap u + c u = |u|^{p-2} u on flat tori"};
  app.require_subcommand(1);

  Common c;
  const std::vector<std::pair<std::string, std::string>> kinds = {
      {"ground", "Shoot the radial ground state and record m(E)"},
      {"sweep-m", "Positive solutions per eps: m_hat"},
      {"sweep-d", "Nodal solutions per eps from seed pairs: d_hat"},
      {"multiplicity", "Many seeds, clustered modulo symmetry"},
      {"diagnose", "Recompute diagnostics of a stored archive"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : kinds) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, c, name != "diagnose");
    subs.push_back(sub);
  }
  CLI11_PARSE(app, argc, argv);

  try {
    std::string chosen;
    for (CLI::App* s : subs)
      if (s->parsed()) chosen = s->get_name();
    const yamabe::ExperimentKind kind = yamabe::experiment_kind_from_string(chosen);

    yamabe::RunOptions opts;
    if (!c.quiet) opts.log = [](const std::string& msg) { std::cerr << msg << '\n'; };

    if (kind == yamabe::ExperimentKind::diagnose) {
      std::string dir = c.out;
      if (dir.empty() && !c.config.empty()) dir = yamabe::load_config(c.config).output_dir;
      if (dir.empty()) throw yamabe::ConfigError("diagnose needs --out or --config");
      print_summary(yamabe::diagnose(dir, opts));
      return 0;
    }

    yamabe::ExperimentConfig cfg = yamabe::load_config(c.config);
    if (!c.out.empty()) cfg.output_dir = c.out;
    if (!c.eps.empty()) cfg.eps = c.eps;
    if (c.seeds >= 0) cfg.seeds.count = c.seeds;
    if (c.jobs > 0) cfg.jobs = c.jobs;
    cfg.validate();
    print_summary(yamabe::run_experiment(cfg, kind, opts));
    return 0;
  } catch (const yamabe::Error& e) {
    std::cerr << "error [" << e.tag() << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
