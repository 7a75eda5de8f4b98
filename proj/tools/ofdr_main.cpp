// ofdr command line: scenario simulation, receiver processing, analysis
// products and the live streaming pair, driven by one config file with
// dotted-path overrides. Thin shell over the C API.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ofdr/ofdr.h"

namespace {

struct ConfigDeleter {
    void operator()(ofdr_config* c) const { ofdr_config_free(c); }
};
using ConfigPtr = std::unique_ptr<ofdr_config, ConfigDeleter>;

int fail(ofdr_status st) {
    // Machine-readable error on stderr.
    std::string msg = ofdr_last_error();
    std::string escaped;
    for (char c : msg) {
        if (c == '"' || c == '\\') escaped += '\\';
        if (c == '\n') {
            escaped += "\\n";
            continue;
        }
        escaped += c;
    }
    std::fprintf(stderr, "{\"error\":{\"status\":\"%s\",\"message\":\"%s\"}}\n",
                 ofdr_status_name(st), escaped.c_str());
    return st == OFDR_ERR_CONFIG || st == OFDR_ERR_INVALID_ARGUMENT ? 2 : 1;
}

struct CommonOpts {
    std::string config_path;
    std::string preset;
    std::vector<std::string> overrides;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "Scenario config file (JSON)");
    cmd->add_option("--preset", o.preset,
                    "Preset name: default, transatlantic-mini, transatlantic-full");
    cmd->add_option("--set", o.overrides, "Dotted-path override, e.g. run.sweeps=128")
        ->take_all();
    cmd->add_option("--seed", o.seed, "Shortcut for --set run.seed=N");
}

ofdr_status build_config(const CommonOpts& o, ConfigPtr& out) {
    ofdr_config* cfg = nullptr;
    ofdr_status st;
    if (!o.config_path.empty())
        st = ofdr_config_load(o.config_path.c_str(), &cfg);
    else if (!o.preset.empty())
        st = ofdr_config_preset(o.preset.c_str(), &cfg);
    else
        st = ofdr_config_create(&cfg);
    if (st != OFDR_OK) return st;
    out.reset(cfg);
    if (!o.preset.empty() && !o.config_path.empty()) {
        // --preset with --config: preset fields are already merged via load.
    }
    for (const auto& kv : o.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "{\"error\":{\"status\":\"config\",\"message\":\"--set wants key=value, got %s\"}}\n",
                         kv.c_str());
            return OFDR_ERR_CONFIG;
        }
        st = ofdr_config_set(out.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
        if (st != OFDR_OK) return st;
    }
    if (o.seed >= 0) {
        st = ofdr_config_set(out.get(), "run.seed", std::to_string(o.seed).c_str());
        if (st != OFDR_OK) return st;
    }
    return ofdr_config_validate(out.get());
}

// Fall back to the config's output section when a path flag is omitted.
ofdr_status resolve_path(const ConfigPtr& cfg, std::string& path, const char* key,
                         const char* flag) {
    if (!path.empty()) return OFDR_OK;
    char buf[4096];
    if (ofdr_config_get(cfg.get(), key, buf, sizeof(buf)) == OFDR_OK && buf[0] != '\0')
        path = buf;
    if (path.empty()) {
        std::fprintf(stderr,
                     "{\"error\":{\"status\":\"config\",\"message\":\"%s required (or set %s in the config)\"}}\n",
                     flag, key);
        return OFDR_ERR_CONFIG;
    }
    return OFDR_OK;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent sweep reflectometry for repeatered-cable monitoring"};
    app.require_subcommand(1);

    CommonOpts sim_o, proc_o, ana_o, e2e_o, tx_o, rx_o, show_o;
    std::string out_path, in_path, out_dir, endpoint;

    auto* sim = app.add_subcommand("simulate", "Generate raw sweep captures to a file");
    add_common(sim, sim_o);
    sim->add_option("--out", out_path, "Capture output file (default: output.captures)");

    auto* proc = app.add_subcommand("process", "Captures -> observation records");
    add_common(proc, proc_o);
    proc->add_option("--in", in_path, "Capture input file")->required();
    proc->add_option("--out", out_path,
                     "Observation output file (.jsonl or .bin; default: output.observations)");

    auto* ana = app.add_subcommand("analyze", "Observations -> CSV/JSON products");
    add_common(ana, ana_o);
    ana->add_option("--in", in_path, "Observation input file")->required();
    ana->add_option("--out-dir", out_dir, "Product output directory (default: output.dir)");

    auto* e2e = app.add_subcommand("e2e", "simulate -> process -> analyze in one pipeline");
    add_common(e2e, e2e_o);
    e2e->add_option("--out-dir", out_dir, "Output directory (default: output.dir)");

    auto* tx = app.add_subcommand("stream-tx", "Serve captures over TCP");
    add_common(tx, tx_o);
    tx->add_option("--endpoint", endpoint, "host:port to listen on")->required();

    auto* rx = app.add_subcommand("stream-rx", "Consume captures from TCP to a file");
    add_common(rx, rx_o);
    rx->add_option("--endpoint", endpoint, "host:port to connect to")->required();
    rx->add_option("--out", out_path, "Capture output file")->required();

    auto* show = app.add_subcommand("config", "Print the resolved configuration");
    add_common(show, show_o);

    CLI11_PARSE(app, argc, argv);

    ConfigPtr cfg;
    ofdr_status st = OFDR_OK;

    if (sim->parsed()) {
        if ((st = build_config(sim_o, cfg)) != OFDR_OK) return fail(st);
        if ((st = resolve_path(cfg, out_path, "output.captures", "--out")) != OFDR_OK)
            return 2;
        st = ofdr_run_simulate(cfg.get(), out_path.c_str());
    } else if (proc->parsed()) {
        if ((st = build_config(proc_o, cfg)) != OFDR_OK) return fail(st);
        if ((st = resolve_path(cfg, out_path, "output.observations", "--out")) != OFDR_OK)
            return 2;
        st = ofdr_run_process(cfg.get(), in_path.c_str(), out_path.c_str());
    } else if (ana->parsed()) {
        if ((st = build_config(ana_o, cfg)) != OFDR_OK) return fail(st);
        if ((st = resolve_path(cfg, out_dir, "output.dir", "--out-dir")) != OFDR_OK) return 2;
        st = ofdr_run_analyze(cfg.get(), in_path.c_str(), out_dir.c_str());
    } else if (e2e->parsed()) {
        if ((st = build_config(e2e_o, cfg)) != OFDR_OK) return fail(st);
        if ((st = resolve_path(cfg, out_dir, "output.dir", "--out-dir")) != OFDR_OK) return 2;
        st = ofdr_run_e2e(cfg.get(), out_dir.c_str());
    } else if (tx->parsed()) {
        if ((st = build_config(tx_o, cfg)) != OFDR_OK) return fail(st);
        st = ofdr_stream_tx(cfg.get(), endpoint.c_str());
    } else if (rx->parsed()) {
        if ((st = build_config(rx_o, cfg)) != OFDR_OK) return fail(st);
        st = ofdr_stream_rx(cfg.get(), endpoint.c_str(), out_path.c_str());
    } else if (show->parsed()) {
        if ((st = build_config(show_o, cfg)) != OFDR_OK) return fail(st);
        std::vector<char> buf(1 << 20);
        st = ofdr_config_get(cfg.get(), "", buf.data(), buf.size());
        if (st == OFDR_OK) std::printf("%s\n", buf.data());
    }

    if (st != OFDR_OK) return fail(st);
    return 0;
}
