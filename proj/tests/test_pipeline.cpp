#include <doctest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "pipeline.hpp"
#include "sha256.hpp"
#include "stream.hpp"

using namespace ofdr;
namespace fs = std::filesystem;

namespace {

// Small, fast scenario: four repeaters, fixed noise, 16 sweeps.
Scenario tiny_scenario() {
    auto s = Scenario::from_json_text(R"({
        "sweep": {"sample_rate_hz": 1e6, "if_center_hz": 3e5,
                  "sweep_bandwidth_hz": 2e5, "sweep_period_s": 2e-3,
                  "guard_band_hz": 5e4},
        "cable": {"uniform": {"count": 4, "length_km": 25.0}},
        "laser": {"linewidth_hz": 50.0},
        "noise": {"mode": "fixed", "ase_density": 1e-13},
        "run": {"sweeps": 16, "seed": 9, "threads": 2}
    })");
    return s;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    REQUIRE(f);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& p) const { return (path / p).string(); }
};

}  // namespace

TEST_CASE("file pipeline: simulate, process, analyze") {
    TempDir tmp("ofdr_pipe_test");
    auto scenario = tiny_scenario();

    Pipeline(scenario).simulate_to_file(tmp / "captures.ofdr");
    CHECK(fs::file_size(tmp / "captures.ofdr") > 16 * 8000);

    Pipeline(scenario).process_file(tmp / "captures.ofdr", tmp / "obs.jsonl");
    const auto obs = read_observations_file(tmp / "obs.jsonl");
    CHECK(obs.size() == 8 * 4);  // 8 pairs x 4 repeaters
    for (const auto& o : obs) {
        CHECK(!(o.flags & kObsMissing));
        CHECK(o.snr_db > 20.0);
    }

    Pipeline(scenario).analyze_file(tmp / "obs.jsonl", tmp / "analysis");
    CHECK(fs::exists(tmp / "analysis/phase.csv"));
    CHECK(fs::exists(tmp / "analysis/diff_phase.csv"));
    CHECK(fs::exists(tmp / "analysis/snr.csv"));
    CHECK(fs::exists(tmp / "analysis/delay_drift.csv"));
    CHECK(fs::exists(tmp / "analysis/manifest.json"));
}

TEST_CASE("e2e equals the chained file pipeline byte for byte") {
    TempDir tmp("ofdr_e2e_test");
    auto scenario = tiny_scenario();

    Pipeline(scenario).e2e(tmp / "e2e");

    Pipeline(scenario).simulate_to_file(tmp / "captures.ofdr");
    Pipeline(scenario).process_file(tmp / "captures.ofdr", tmp / "obs.jsonl");
    Pipeline(scenario).analyze_file(tmp / "obs.jsonl", tmp / "chained");

    CHECK(slurp(tmp / "e2e/observations.jsonl") == slurp(tmp / "obs.jsonl"));
    CHECK(slurp(tmp / "e2e/analysis/phase.csv") == slurp(tmp / "chained/phase.csv"));
    CHECK(slurp(tmp / "e2e/analysis/diff_phase.csv") == slurp(tmp / "chained/diff_phase.csv"));
}

TEST_CASE("two e2e runs are byte-identical, different seeds are not") {
    TempDir tmp("ofdr_det_test");
    auto scenario = tiny_scenario();
    Pipeline(scenario).e2e(tmp / "a");
    Pipeline(scenario).e2e(tmp / "b");
    CHECK(slurp(tmp / "a/observations.jsonl") == slurp(tmp / "b/observations.jsonl"));
    CHECK(slurp(tmp / "a/manifest.json") == slurp(tmp / "b/manifest.json"));

    auto other = tiny_scenario();
    other.set_override("run.seed", "10");
    Pipeline(other).e2e(tmp / "c");
    CHECK(slurp(tmp / "a/observations.jsonl") != slurp(tmp / "c/observations.jsonl"));
}

TEST_CASE("thread count does not change the bytes") {
    TempDir tmp("ofdr_thread_test");
    auto s1 = tiny_scenario();
    s1.set_override("run.threads", "1");
    auto s4 = tiny_scenario();
    s4.set_override("run.threads", "4");
    Pipeline(s1).e2e(tmp / "t1");
    Pipeline(s4).e2e(tmp / "t4");
    CHECK(slurp(tmp / "t1/observations.jsonl") == slurp(tmp / "t4/observations.jsonl"));
}

TEST_CASE("empty capture input: empty output, no failure") {
    TempDir tmp("ofdr_empty_test");
    {
        std::ofstream f(tmp / "empty.ofdr", std::ios::binary);
    }
    Pipeline(tiny_scenario()).process_file(tmp / "empty.ofdr", tmp / "obs.jsonl");
    CHECK(fs::exists(tmp / "obs.jsonl"));
    CHECK(fs::file_size(tmp / "obs.jsonl") == 0);
}

TEST_CASE("binary observation format round trip through analyze") {
    TempDir tmp("ofdr_bin_test");
    auto scenario = tiny_scenario();
    scenario.set_override("run.observation_format", "\"binary\"");
    Pipeline(scenario).e2e(tmp / "out");
    CHECK(fs::exists(tmp / "out/observations.bin"));
    CHECK(fs::file_size(tmp / "out/observations.bin") % kObservationRecordBytes == 0);
    const auto obs = read_observations_file(tmp / "out/observations.bin");
    CHECK(obs.size() == 8 * 4);
    Pipeline(scenario).analyze_file(tmp / "out/observations.bin", tmp / "out/analysis2");
    CHECK(fs::exists(tmp / "out/analysis2/phase.csv"));
}

TEST_CASE("manifest lists outputs with checksums that match the files") {
    TempDir tmp("ofdr_manifest_test");
    auto scenario = tiny_scenario();
    Pipeline(scenario).e2e(tmp / "out");
    const auto manifest = nlohmann::json::parse(slurp(tmp / "out/manifest.json"));
    CHECK(manifest.at("seed") == 9);
    CHECK(manifest.at("sim_time_stop_s").get<double>() == doctest::Approx(16 * 2e-3));
    bool found = false;
    for (const auto& o : manifest.at("outputs")) {
        if (o.at("path") == "observations.jsonl") {
            found = true;
            CHECK(o.at("sha256") == sha256_file_hex(tmp / "out/observations.jsonl"));
        }
    }
    CHECK(found);
}

TEST_CASE("cli: validation failure exits 2 naming the field; output section defaults") {
    TempDir tmp("ofdr_cli_test");
    {
        std::ofstream f(tmp / "bad.json");
        f << R"({"sweep": {"sweep_period_s": 1.00000033e-3}})";
    }
    {
        const std::string cmd = std::string(OFDR_CLI_PATH) + " simulate --config " +
                                (tmp / "bad.json") + " --out " + (tmp / "x.ofdr") + " 2> " +
                                (tmp / "err.json") + " > /dev/null";
        const int rc = std::system(cmd.c_str());
        CHECK(WEXITSTATUS(rc) == 2);
        const std::string err = slurp(tmp / "err.json");
        CHECK(err.find("sweep_period_s") != std::string::npos);
        CHECK(err.find("\"status\":\"config\"") != std::string::npos);
    }
    {
        // Paths can come from the config's output section.
        auto scenario = tiny_scenario();
        scenario.set_override("run.sweeps", "4");
        scenario.set_override("output.dir", "\"" + (tmp / "outdir") + "\"");
        scenario.save(tmp / "ok.json");
        const std::string cmd = std::string(OFDR_CLI_PATH) + " e2e --config " +
                                (tmp / "ok.json") + " > /dev/null 2>&1";
        CHECK(WEXITSTATUS(std::system(cmd.c_str())) == 0);
        CHECK(fs::exists(tmp / "outdir/manifest.json"));
    }
}

TEST_CASE("streaming pair moves captures intact") {
    TempDir tmp("ofdr_streampair_test");
    auto scenario = tiny_scenario();
    scenario.set_override("run.sweeps", "8");

    // Pick a free port by binding a throwaway server first.
    uint16_t port = 0;
    {
        StreamServer probe(Endpoint::parse("127.0.0.1:0"));
        port = probe.port();
    }
    const std::string ep = "127.0.0.1:" + std::to_string(port);

    std::thread tx([&] { Pipeline(scenario).stream_tx(ep); });
    // Give the server a moment to listen.
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    Pipeline(scenario).stream_rx(ep, tmp / "rx.ofdr");
    tx.join();

    // The received file holds the same frames the simulator writes.
    Pipeline(scenario).simulate_to_file(tmp / "tx.ofdr");
    CHECK(slurp(tmp / "rx.ofdr") == slurp(tmp / "tx.ofdr"));
    CHECK(fs::exists(tmp / "rx.ofdr.gaps.json"));
}
