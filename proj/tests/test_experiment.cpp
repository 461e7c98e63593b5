#include "neurorhythm/csv.hpp"
#include "neurorhythm/error.hpp"
#include "neurorhythm/experiment.hpp"

#include <gtest/gtest.h>

#include <filesystem>

#include <unistd.h>

using namespace nr;
namespace fs = std::filesystem;

namespace {

Json half_center_doc() { return demo_config("half-center-cpg"); }

fs::path temp_dir(const std::string& name) {
    auto p = fs::temp_directory_path() / ("nr_exp_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    return p;
}

} // namespace

TEST(Experiment, DemosParse) {
    for (const auto& n : demo_names()) EXPECT_NO_THROW(parse_experiment(demo_config(n))) << n;
    EXPECT_THROW(demo_config("fig7"), Error);
}

TEST(Experiment, NormalizedDocumentReparses) {
    for (const auto& n : demo_names()) {
        const auto c = parse_experiment(demo_config(n));
        const auto d = parse_experiment(c.to_json());
        EXPECT_EQ(d.to_json(), c.to_json()) << n;
        EXPECT_EQ(d.spec, c.spec) << n;
    }
}

TEST(Experiment, UnknownKeysRejected) {
    auto doc = half_center_doc();
    doc["analysis"]["colour"] = 1;
    EXPECT_THROW(parse_experiment(doc), Error);
    doc = half_center_doc();
    doc["network"]["params"]["colour"] = 1;
    EXPECT_THROW(parse_experiment(doc), Error);
    doc = half_center_doc();
    doc["extra"] = 1;
    EXPECT_THROW(parse_experiment(doc), Error);
    doc = half_center_doc();
    doc["network"]["preset"] = "fig9";
    EXPECT_THROW(parse_experiment(doc), Error);
}

TEST(Experiment, WithValue) {
    const auto c = parse_experiment(half_center_doc());
    const auto d = with_value(c, "network.params.drive", 600);
    EXPECT_EQ(d.spec.populations[0].I_const, 600);
    EXPECT_EQ(with_value(c, "simulation.duration", 500).simulation.duration, 500);
    EXPECT_THROW(with_value(c, "network.params.mode", 1), Error);
    EXPECT_THROW(with_value(c, "network.params.nope", 1), Error);
    EXPECT_THROW(with_value(c, "", 1), Error);
    EXPECT_THROW(with_value(c, "simulation.dt", -1), Error);
}

TEST(Experiment, WithSeedAndDt) {
    const auto c = parse_experiment(half_center_doc());
    const auto s = with_seed(c, 17);
    EXPECT_EQ(s.spec.seed, 17u);
    EXPECT_EQ(s.simulation.trial_seed, 17u);
    EXPECT_EQ(with_dt(c, 0.05).simulation.dt, 0.05);
}

TEST(Experiment, AnalyzeOfRunOutputEqualsRunMetrics) {
    for (const auto& n : {"three-phase-cpg", "cardiac-pacing"}) {
        const auto cfg = parse_experiment(demo_config(n));
        const auto r = run_experiment(cfg);
        std::vector<KnownPopulation> known;
        for (const auto& p : cfg.spec.populations) known.push_back({p.label, p.n});
        const auto rec = spikes_from_csv(spikes_to_csv(r.run.spikes), known, cfg.simulation.duration, cfg.simulation.dt);
        EXPECT_EQ(rec, r.run.spikes);
        const auto a = analyze(cfg, rec);
        ASSERT_TRUE(a.metrics);
        EXPECT_EQ(*a.metrics, *r.analysis.metrics) << n;
        EXPECT_EQ(a.schedule, r.analysis.schedule);
        EXPECT_EQ(a.bursts, r.analysis.bursts);
    }
}

TEST(Experiment, SweepMarksSilentRow) {
    const auto cfg = parse_experiment(half_center_doc());
    const auto rows = run_sweep(cfg, "network.params.drive", {600, 0, 550}, 2);
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].value, 0);
    EXPECT_EQ(rows[0].status, "no oscillation");
    EXPECT_EQ(rows[1].status, "ok");
    EXPECT_LT(rows[1].freq, rows[2].freq);
    const auto csv = sweep_to_csv("network.params.drive", rows);
    EXPECT_TRUE(csv.starts_with("network.params.drive,freq_hz,jitter_std_ms,n_cycles,status\n0,0,0,0,no oscillation\n"));
}

TEST(Experiment, SweepSerialEqualsParallel) {
    const auto cfg = parse_experiment(half_center_doc());
    const std::vector<double> v{520, 560, 600, 640};
    const auto a = run_sweep(cfg, "network.params.drive", v, 1);
    const auto b = run_sweep(cfg, "network.params.drive", v, 4);
    EXPECT_EQ(sweep_to_csv("k", a), sweep_to_csv("k", b));
}

TEST(Experiment, SweepBadRowDoesNotAbort) {
    const auto cfg = parse_experiment(half_center_doc());
    const auto rows = run_sweep(cfg, "network.params.n", {4, 0}, 2);
    EXPECT_TRUE(rows[0].status.starts_with("ConfigError")) << rows[0].status;
    EXPECT_EQ(rows[1].status, "ok");
    EXPECT_THROW(run_sweep(cfg, "network.params.zzz", {1}), Error);
}

TEST(Experiment, OutputsAndManifest) {
    auto cfg = parse_experiment(demo_config("three-phase-oscillator"));
    cfg = with_value(cfg, "simulation.duration", 8000);
    const auto dir = temp_dir("outputs");
    const auto r = run_experiment(cfg);
    write_run_outputs(dir.string(), cfg, r);
    for (const char* f : {"spikes.csv", "metrics.json", "bursts.json", "rates.csv", "portrait.csv", "portrait.json",
                          "manifest.json"})
        EXPECT_TRUE(fs::exists(dir / f)) << f;
    const auto manifest = read_json_file((dir / "manifest.json").string());
    EXPECT_EQ(manifest["tool"], kToolName);
    EXPECT_EQ(manifest["config_hash"], config_hash(cfg));
    // the embedded config reproduces the run
    const auto again = parse_experiment(manifest["config"]);
    EXPECT_EQ(config_hash(again), config_hash(cfg));
    EXPECT_EQ(run_experiment(again).run.spikes, r.run.spikes);
    fs::remove_all(dir);
}

TEST(Experiment, CardiacOutputs) {
    const auto cfg = parse_experiment(demo_config("cardiac-pacing"));
    const auto dir = temp_dir("cardiac");
    write_run_outputs(dir.string(), cfg, run_experiment(cfg));
    EXPECT_TRUE(fs::exists(dir / "schedule.csv"));
    EXPECT_TRUE(fs::exists(dir / "cardiac.json"));
    EXPECT_TRUE(read_text_file((dir / "schedule.csv").string()).starts_with("t_ms,channel\n"));
    fs::remove_all(dir);
}

TEST(Experiment, InsufficientCyclesOnEmptyRecord) {
    const auto cfg = parse_experiment(demo_config("three-phase-cpg"));
    std::vector<KnownPopulation> known;
    for (const auto& p : cfg.spec.populations) known.push_back({p.label, p.n});
    const auto rec = spikes_from_csv("t_ms,population,neuron\n", known, 1000, 0.1);
    try {
        analyze(cfg, rec);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Analysis);
        EXPECT_NE(std::string(e.what()).find("insufficient cycles"), std::string::npos) << e.what();
    }
}
