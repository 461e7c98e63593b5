// neurorhythm command line: run / sweep / analyze / demo.

#include "neurorhythm/csv.hpp"
#include "neurorhythm/error.hpp"
#include "neurorhythm/experiment.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>

namespace {

struct Globals {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> dt;
};

nr::ExperimentConfig apply(nr::ExperimentConfig cfg, const Globals& g) {
    if (g.seed) cfg = nr::with_seed(cfg, *g.seed);
    if (g.dt) cfg = nr::with_dt(cfg, *g.dt);
    if (g.out) cfg.outputs.directory = *g.out;
    return cfg;
}

int exit_code(nr::ErrorKind k) {
    switch (k) {
    case nr::ErrorKind::Config: return 2;
    case nr::ErrorKind::Simulation: return 3;
    case nr::ErrorKind::Analysis: return 4;
    case nr::ErrorKind::Io: return 5;
    }
    return 1;
}

void print_summary(const nr::ExperimentConfig& cfg, const nr::ExperimentResult& r) {
    std::cout << "wrote " << cfg.outputs.directory << " (" << r.run.spikes.events.size() << " spikes)\n";
    if (const auto& m = r.analysis.metrics)
        std::cout << "freq " << m->freq << " Hz, jitter_std " << m->jitter_std << " ms, cycles " << m->n_cycles
                  << ", offsets " << m->offsets[0] << " / " << m->offsets[1] << " ms\n";
    if (const auto& d = r.analysis.cardiac)
        std::cout << "LA-RA " << d->la_ra << " ms, V-RA " << d->v_ra << " ms, long gap " << d->long_gap << " ms\n";
    if (const auto& p = r.analysis.portrait)
        std::cout << "portrait similarity " << p->similarity << " (diameter " << p->diameter << ")\n";
}

int cmd_run(const nr::ExperimentConfig& cfg) {
    const auto r = nr::run_experiment(cfg);
    nr::write_run_outputs(cfg.outputs.directory, cfg, r);
    print_summary(cfg, r);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Neuromorphic rhythm-generator emulator"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    std::uint64_t seed = 0;
    std::string out;
    double dt = 0;
    auto* seed_opt = app.add_option("--seed", seed, "network and trial seed")->check(CLI::NonNegativeNumber);
    auto* out_opt = app.add_option("--out", out, "output directory");
    auto* dt_opt = app.add_option("--dt", dt, "integration step (ms)");
    seed_opt->configurable(false);

    std::string config_path, spikes_path, param, demo;
    std::vector<double> values;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "simulate and analyze an experiment config");
    run->add_option("config", config_path, "experiment config (JSON)")->required();

    auto* sweep = app.add_subcommand("sweep", "vary one numeric config field");
    sweep->add_option("config", config_path, "experiment config (JSON)")->required();
    sweep->add_option("--param", param, "dotted key, e.g. network.params.drive")->required();
    sweep->add_option("--values", values, "comma-separated values")->required()->delimiter(',');
    sweep->add_option("--threads", threads, "worker threads (0: all cores)");

    auto* analyze = app.add_subcommand("analyze", "re-run the analysis on a stored spike CSV");
    analyze->add_option("spikes", spikes_path, "spikes.csv")->required();
    analyze->add_option("--config", config_path, "experiment config used for the run")->required();

    auto* demo_cmd = app.add_subcommand("demo", "run a built-in demo");
    demo_cmd->add_option("name", demo, "demo name")->required();

    app.add_subcommand("list", "list presets and demos");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "UsageError: " << e.what() << "\n";
        return 1;
    }
    if (*seed_opt) g.seed = seed;
    if (*out_opt) g.out = out;
    if (*dt_opt) g.dt = dt;

    try {
        if (app.got_subcommand("list")) {
            std::cout << "presets:";
            for (const auto& n : nr::preset_names()) std::cout << " " << n;
            std::cout << "\ndemos:";
            for (const auto& n : nr::demo_names()) std::cout << " " << n;
            std::cout << "\n";
            return 0;
        }
        if (*run) return cmd_run(apply(nr::load_experiment(config_path), g));
        if (*demo_cmd) {
            if (!g.out) g.out = (std::filesystem::path("out") / demo).string();
            const auto cfg = apply(nr::parse_experiment(nr::demo_config(demo)), g);
            const int rc = cmd_run(cfg);
            nr::write_text_file((std::filesystem::path(cfg.outputs.directory) / "config.json").string(),
                                cfg.to_json().dump(2) + "\n");
            return rc;
        }
        if (*sweep) {
            const auto cfg = apply(nr::load_experiment(config_path), g);
            const auto rows = nr::run_sweep(cfg, param, values, threads);
            std::filesystem::create_directories(cfg.outputs.directory);
            const auto csv = nr::sweep_to_csv(param, rows);
            nr::write_text_file((std::filesystem::path(cfg.outputs.directory) / "sweep.csv").string(), csv);
            std::cout << csv;
            return 0;
        }
        if (*analyze) {
            const auto cfg = apply(nr::load_experiment(config_path), g);
            std::vector<nr::KnownPopulation> known;
            for (const auto& p : cfg.spec.populations) known.push_back({p.label, p.n});
            const auto record = nr::spikes_from_csv(nr::read_text_file(spikes_path), known,
                                                    cfg.simulation.duration, cfg.simulation.dt);
            const auto a = nr::analyze(cfg, record);
            nr::write_analysis_outputs(cfg.outputs.directory, cfg, a);
            if (a.metrics)
                std::cout << "freq " << a.metrics->freq << " Hz, jitter_std " << a.metrics->jitter_std << " ms\n";
            return 0;
        }
    } catch (const nr::Error& e) {
        std::cerr << nr::to_string(e.kind()) << ": " << e.what() << "\n";
        return exit_code(e.kind());
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "IoError: " << e.what() << "\n";
        return 5;
    } catch (const std::exception& e) {
        std::cerr << "InternalError: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
