#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "llab/core/csv.hpp"
#include "llab/pipeline/config.hpp"
#include "llab/pipeline/pipeline.hpp"
#include "llab/synth/synth.hpp"

using namespace llab;
using namespace llab::pipeline;

namespace {

namespace fs = std::filesystem;

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

std::string config_text(const fs::path& base, const std::string& extra = "") {
    std::ostringstream os;
    os << "seed = 42\n"
       << "out_dir = " << (base / "out").string() << "\n"
       << "window_days = 30\n"
       << "p_max = 1\n"
       << "q_max = 0\n"
       << "portfolios = 1,2,5\n"
       << "cov_mode = intraday\n"
       << extra << "\n"
       << "[asset SYN01]\n"
       << "ticks = " << (base / "SYN01_ticks.csv").string() << "\n";
    return os.str();
}

void make_ticks(const fs::path& base, int days = 40) {
    synth::TickScenario sc;
    sc.kind = synth::ScenarioKind::kLiquidityRegimes;
    sc.assets = {"SYN01"};
    sc.n_days = days;
    sc.seed = 7;
    synth::generate_tick_files(sc, base.string());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config parsing happy path") {
    TempDir tmp("llab_cfg1");
    make_ticks(tmp.path, 2);
    RunConfig cfg = parse_config_text(config_text(tmp.path), "test");
    CHECK(cfg.seed == 42);
    CHECK(cfg.seed_set);
    CHECK(cfg.window_days == 30);
    CHECK(cfg.portfolios == std::vector<int>{1, 2, 5});
    REQUIRE(cfg.assets.size() == 1);
    CHECK(cfg.assets[0].name == "SYN01");
    cfg.validate();
}

TEST_CASE("config rejects unknown keys and missing seed") {
    CHECK_THROWS_AS(parse_config_text("bogus_key = 1\n", "t"), std::invalid_argument);
    RunConfig cfg = parse_config_text("out_dir = x\n", "t");
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config validation fails fast on a missing tick path") {
    RunConfig cfg = parse_config_text(
        "seed = 1\nout_dir = /tmp/llab_nope\n[asset Z]\nticks = /does/not/exist.csv\n", "t");
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("config hash tracks semantic fields only") {
    TempDir tmp("llab_cfg2");
    make_ticks(tmp.path, 2);
    RunConfig a = parse_config_text(config_text(tmp.path), "t");
    RunConfig b = a;
    b.jobs = 8;  // not semantic
    CHECK(fnv1a_hex(a.canonical_string()) == fnv1a_hex(b.canonical_string()));

    RunConfig c = a;
    c.wash.q3_factor = 0.6;
    CHECK(fnv1a_hex(a.canonical_string()) != fnv1a_hex(c.canonical_string()));
    CHECK(a.hash_market_data() != c.hash_market_data());

    RunConfig d = a;
    d.seed = 43;
    CHECK(a.hash_market_data() == d.hash_market_data());  // ingest has no randomness
    CHECK(a.hash_liquidity() != d.hash_liquidity());

    RunConfig e = a;
    e.window_days = 60;
    CHECK(a.hash_liquidity() == e.hash_liquidity());
    CHECK(a.hash_backtest() != e.hash_backtest());
}

TEST_CASE("pipeline runs end to end, then skips unchanged stages") {
    TempDir tmp("llab_pipe1");
    make_ticks(tmp.path, 40);
    RunConfig cfg = parse_config_text(config_text(tmp.path), "t");

    auto r1 = run_pipeline(cfg);
    REQUIRE(r1.stages.size() == 3);
    for (const auto& s : r1.stages) CHECK(!s.skipped);
    CHECK(fs::exists(tmp.path / "out/minutes/SYN01.csv"));
    CHECK(fs::exists(tmp.path / "out/daily/SYN01.csv"));
    CHECK(fs::exists(tmp.path / "out/reports/summary.csv"));
    CHECK(fs::exists(tmp.path / "out/manifest.json"));

    std::string manifest1 = slurp(tmp.path / "out/manifest.json");
    std::string daily1 = slurp(tmp.path / "out/daily/SYN01.csv");

    auto r2 = run_pipeline(cfg);
    for (const auto& s : r2.stages) CHECK(s.skipped);
    CHECK(slurp(tmp.path / "out/manifest.json") == manifest1);

    // byte-for-byte reproducibility from scratch
    fs::remove_all(tmp.path / "out");
    run_pipeline(cfg);
    CHECK(slurp(tmp.path / "out/daily/SYN01.csv") == daily1);
    CHECK(slurp(tmp.path / "out/manifest.json") == manifest1);
}

TEST_CASE("changing the seed reruns liquidity but not ingestion") {
    TempDir tmp("llab_pipe2");
    make_ticks(tmp.path, 35);
    RunConfig cfg = parse_config_text(config_text(tmp.path), "t");
    run_pipeline(cfg);
    cfg.seed = 77;
    auto r = run_pipeline(cfg);
    CHECK(r.stages[0].skipped);   // market_data
    CHECK(!r.stages[1].skipped);  // liquidity
    CHECK(!r.stages[2].skipped);  // backtest
}

TEST_CASE("failed stage leaves a marker") {
    TempDir tmp("llab_pipe3");
    make_ticks(tmp.path, 2);  // far too short for the backtest window
    RunConfig cfg = parse_config_text(config_text(tmp.path), "t");
    CHECK_THROWS(run_pipeline(cfg));
    CHECK(fs::exists(tmp.path / "out/FAILED"));
    std::string marker = slurp(tmp.path / "out/FAILED");
    CHECK(marker.find("backtest") != std::string::npos);
}

TEST_CASE("single-stage commands produce the canonical file formats") {
    TempDir tmp("llab_cmds");
    make_ticks(tmp.path, 70);

    IngestArgs ia;
    ia.ticks_path = (tmp.path / "SYN01_ticks.csv").string();
    ia.asset = "SYN01";
    ia.out_dir = (tmp.path / "ingested").string();
    cmd_ingest(ia);
    CHECK(fs::exists(tmp.path / "ingested/SYN01_minutes.csv"));
    CHECK(fs::exists(tmp.path / "ingested/SYN01_panels.csv"));

    // move minute files into a directory layout compute-liquidity expects
    fs::create_directories(tmp.path / "minutes");
    fs::copy(tmp.path / "ingested/SYN01_minutes.csv", tmp.path / "minutes/SYN01.csv");
    ComputeLiquidityArgs la;
    la.minutes_dir = (tmp.path / "minutes").string();
    la.seed = 5;
    la.out_dir = (tmp.path / "daily").string();
    cmd_compute_liquidity(la);
    CHECK(fs::exists(tmp.path / "daily/SYN01.csv"));

    FitArgs fa;
    fa.daily_dir = (tmp.path / "daily").string();
    fa.window_days = 60;
    fa.p_max = 1;
    fa.q_max = 0;
    fa.refit_every = 5;
    fa.out_dir = (tmp.path / "forecasts").string();
    cmd_fit(fa);
    auto forecasts = read_csv((tmp.path / "forecasts/forecasts.csv").string());
    CHECK(forecasts.column("mu_hat") >= 0);
    CHECK(forecasts.column("la_mode") >= 0);
    CHECK(forecasts.rows.size() > 0);
}
