#include <iostream>

#include "CLI11.hpp"
#include "teichlab/errors.hpp"
#include "teichlab/run.hpp"

namespace teichlab {

namespace {

struct OptionSpec {
  const char* key;
  const char* help;
};

const std::map<std::string, std::vector<OptionSpec>>& option_help() {
  static const std::map<std::string, std::vector<OptionSpec>> h{
      {"lyapunov",
       {{"stratum", "torus, h2 or h11 (default h2)"},
        {"steps", "Zorich steps per seed (default 1e5)"},
        {"seeds", "independent seeds (default 3)"},
        {"qr-period", "steps between re-orthonormalizations (default 10)"}}},
      {"deviation",
       {{"surface", "stratum: h2, h11 or torus (default h2)"},
        {"n", "largest orbit length (default 1e6)"},
        {"observable", "generic, projected or stable (default generic)"},
        {"starts", "orbit starting points (default 8)"},
        {"burn", "renormalization burn-in steps (default 2000)"},
        {"kz-steps", "steps for the reference exponent (default 2e5)"},
        {"lambda-ref", "reference exponent; skips the estimate"},
        {"ensemble", "fit this many independent suspensions instead of one"}}},
      {"solve-torus",
       {{"f", "JSON file with Fourier coefficients; default is a coboundary"},
        {"theta", "direction: golden, liouville, pi/2 or a number (default golden)"}}},
      {"loss",
       {{"theta", "direction: golden, liouville, pi/2 or a number (default golden)"},
        {"eps", "loss exponent offset (default 0.1)"},
        {"s", "Sobolev order of the data (default 2)"},
        {"nmax", "frequency cap (ladder 32..nmax) or a comma list"}}},
      {"gh-bound",
       {{"surface", "torus or a stratum (default h2)"},
        {"observable", "stable or generic (default stable)"},
        {"tmax", "final time (default 1e3 on the torus, 1e6 otherwise)"},
        {"points", "starting points (default 8)"},
        {"burn", "renormalization burn-in steps (default 2000)"},
        {"theta", "torus direction (default pi/2)"}}},
      {"surface",
       {{"a", "L-shape width (default 2)"},
        {"b", "L-shape height (default 3)"},
        {"saddle-bound", "also search saddle connections up to this length"}}},
      {"weyl",
       {{"lambda", "eigenvalue bound"},
        {"range", "lo:hi, evaluated on the 1-2-5 grid"},
        {"points", "use this many log-spaced points instead of the 1-2-5 grid"}}},
      {"split",
       {{"surface", "stratum (default h2)"},
        {"samples", "random (point, T) pairs (default 100)"},
        {"tmax", "largest T (default 1e4)"},
        {"calibration", "samples for the K_P calibration (default 200)"}}},
  };
  return h;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"teichlab: interval exchanges, translation flows and torus cohomological equations"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kArtifactVersion));

  RunConfig cfg;
  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::vector<std::string>> positional;

  for (const auto& [name, opts] : option_help()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--seed", cfg.seed, "base seed (TEICHLAB_SEED overrides)");
    sub->add_option("--out", cfg.out, "output file (default stdout)");
    sub->add_option("--format", cfg.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--csv", values[name]["csv"], "also write the primary series to this CSV file");
    for (const auto& o : opts) sub->add_option(std::string("--") + o.key, values[name][o.key], o.help);
    if (name == "surface")
      sub->add_option("args", positional[name], "validate <file> | catalog <name>")->expected(2);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  for (CLI::App* sub : app.get_subcommands()) {
    cfg.command = sub->get_name();
    for (const auto& [key, v] : values[cfg.command])
      if (sub->count("--" + key) > 0) cfg.params[key] = v;
    cfg.positional = positional[cfg.command];
  }

  try {
    const ResultEnvelope env = run(cfg);
    write_outputs(cfg, env);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    const nlohmann::ordered_json j{{"error", e.name()}, {"detail", e.what()}};
    std::cerr << j.dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    const nlohmann::ordered_json j{{"error", "IOError"}, {"detail", e.what()}};
    std::cerr << j.dump() << "\n";
    return 2;
  }
}

}  // namespace teichlab
