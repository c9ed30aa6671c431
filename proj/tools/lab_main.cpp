// Batch front end for the limit-theorem laboratory: configures, runs and
// reports every experiment reproducibly.
//
// Exit codes: 0 all checks passed, 2 a statistical check failed,
// 1 usage or configuration error.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "stablelab/limit_lab.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string output_dir;
    int workers = 0;
    bool verbose = false;
    bool emit_plot_script = false;
};

stablelab::ExperimentConfig load_config(const CommonFlags& flags,
                                        const std::string& experiment) {
    stablelab::ExperimentConfig cfg;
    if (!flags.config_path.empty()) {
        std::ifstream is(flags.config_path);
        if (!is) throw std::runtime_error("cannot open config file '" +
                                          flags.config_path + "'");
        nlohmann::json j;
        is >> j;
        cfg = stablelab::ExperimentConfig::from_json(j);
    }
    cfg.experiment = experiment;
    if (flags.seed) {
        cfg.seed = *flags.seed;
    } else if (flags.config_path.empty()) {
        if (const char* env = std::getenv("LAB_SEED"))
            cfg.seed = std::strtoull(env, nullptr, 10);
    }
    if (!flags.output_dir.empty()) cfg.output_dir = flags.output_dir;
    if (flags.workers > 0) cfg.workers = flags.workers;
    return cfg;
}

void emit_plot_script(const stablelab::ExperimentConfig& cfg) {
    if (cfg.output_dir.empty()) return;
    std::string stem =
        cfg.experiment + "-" + std::to_string(cfg.seed);
    std::ofstream os(cfg.output_dir + "/" + stem + "_plot.py");
    os << "# plots the " << cfg.experiment << " tables written next to this "
       << "script\n"
          "import csv, sys\n"
          "try:\n"
          "    import matplotlib.pyplot as plt\n"
          "except ImportError:\n"
          "    sys.exit('matplotlib required')\n"
          "rows = list(csv.DictReader(open('"
       << stem
       << ".csv')))\n"
          "if not rows:\n"
          "    sys.exit('no rows')\n"
          "keys = list(rows[0])\n"
          "xs = [float(r[keys[0]]) for r in rows]\n"
          "ys = [float(r[keys[-1]]) for r in rows]\n"
          "plt.plot(xs, ys, '.')\n"
          "plt.xlabel(keys[0]); plt.ylabel(keys[-1])\n"
          "plt.savefig('"
       << stem << ".png', dpi=120)\n";
}

int run(const CommonFlags& flags, const std::string& experiment) {
    auto cfg = load_config(flags, experiment);
    auto start = std::chrono::steady_clock::now();
    stablelab::ExperimentReport rep = stablelab::run_experiment(cfg);
    auto elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();

    std::cout << "experiment: " << rep.experiment << "  seed: " << rep.seed
              << "\n";
    if (flags.verbose)
        std::cout << "resolved config:\n" << cfg.to_json().dump(2) << "\n";
    for (const auto& c : rep.checks) {
        std::cout << (c.pass ? "  PASS " : "  FAIL ") << c.name << "  value="
                  << c.value << " tolerance=" << c.tolerance;
        if (!c.note.empty()) std::cout << "  (" << c.note << ")";
        std::cout << "\n";
    }
    if (rep.censored > 0)
        std::cout << "  censored excursions: " << rep.censored << "\n";
    std::cout << "  wall clock: " << elapsed << " s\n";
    if (!cfg.output_dir.empty()) {
        std::cout << "  report: " << cfg.output_dir << "/" << rep.experiment
                  << "-" << rep.seed << ".json\n";
        if (flags.emit_plot_script) emit_plot_script(cfg);
    }
    return rep.pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "stablelab: Monte Carlo laboratory for heavy-tailed ergodic sums,\n"
        "stable functional limits, arcsine occupation laws and intermittent\n"
        "excursions"};
    app.require_subcommand(1);

    CommonFlags flags;
    const std::vector<std::string> experiments{
        "marginal", "fdd",        "tightness",   "maxineq",
        "arcsine",  "excursions", "independence", "j1probe",
        "selftest", "weighted",   "directional", "arcsine-variants"};

    for (const auto& name : experiments) {
        CLI::App* sub = app.add_subcommand(
            name, "run the " + name + " experiment");
        sub->add_option("--config", flags.config_path,
                        "experiment config (JSON)")
            ->check(CLI::ExistingFile);
        sub->add_option("--seed", flags.seed,
                        "master seed (overrides config and LAB_SEED)");
        sub->add_option("--out", flags.output_dir,
                        "directory for report JSON/CSV files");
        sub->add_option("--workers", flags.workers,
                        "worker threads (wall clock only, never results)");
        sub->add_flag("-v,--verbose", flags.verbose, "echo resolved config");
        sub->add_flag("--emit-plot-script", flags.emit_plot_script,
                      "write a small matplotlib script next to the CSV");
    }

    CLI11_PARSE(app, argc, argv);

    std::string chosen = app.get_subcommands().front()->get_name();
    if (chosen == "weighted") chosen = "weighted_tail";
    if (chosen == "directional") chosen = "directional";
    if (chosen == "arcsine-variants") chosen = "arcsine_variants";

    try {
        return run(flags, chosen);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
