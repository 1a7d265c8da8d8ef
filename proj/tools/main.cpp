// affine-cli: run declarative scenarios, batch sweeps, and export audits.
//
// Exit codes: 0 success, 2 validation failure, 3 numerical failure, 4 IO failure.

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"

#include "affine/parallel.hpp"
#include "affine/scenario.hpp"

namespace {

using affine::ExportFormat;
using affine::ResultTable;
using affine::ScenarioConfig;

struct Overrides {
    std::string out;
    std::string format = "csv";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
};

std::string default_out_dir() {
    const char* dir = std::getenv("AFFINE_OUT_DIR");
    return (dir && *dir) ? dir : ".";
}

std::string output_path(const ScenarioConfig& cfg, const Overrides& ov, const std::string& stem,
                        bool json) {
    if (!ov.out.empty()) return ov.out;
    if (!cfg.out.empty()) return cfg.out;
    return default_out_dir() + "/" + stem + (json ? ".json" : ".csv");
}

// Returns 0, or 3 when the table carries structured failure rows (a nonzero
// trailing "status" column).
int export_and_report(const ResultTable& table, const ScenarioConfig& cfg, const Overrides& ov,
                      const std::string& stem) {
    const bool json = (ov.format == "json");
    const std::string path = output_path(cfg, ov, stem, json);
    affine::export_table(table, path, json ? ExportFormat::JSON : ExportFormat::CSV);
    std::printf("wrote %s (%zu rows, config %016llx)\n", path.c_str(), table.rows.size(),
                static_cast<unsigned long long>(table.cfg_hash));
    if (!table.columns.empty() && table.columns.back() == "status") {
        for (const auto& row : table.rows) {
            if (row.back() != 0.0) {
                std::fprintf(stderr, "warning: table contains failure rows\n");
                return 3;
            }
        }
    }
    return 0;
}

int cmd_run(const std::string& config_path, const Overrides& ov) {
    ScenarioConfig cfg = affine::load_config_file(config_path);
    if (ov.seed_set) cfg.seed = ov.seed;
    const ResultTable table = affine::run_scenario(cfg);
    return export_and_report(table, cfg, ov, "scenario");
}

int cmd_sweep(const std::string& config_path, const Overrides& ov) {
    std::string text;
    {
        std::FILE* f = std::fopen(config_path.c_str(), "rb");
        if (!f) throw affine::IOFailure("cannot read config file: " + config_path);
        char buf[4096];
        size_t got;
        while ((got = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, got);
        std::fclose(f);
    }
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const nlohmann::json::parse_error& e) {
        throw affine::ParseError(std::string("sweep parse error: ") + e.what());
    }
    if (!doc.is_array()) throw affine::ParseError("sweep config must be a JSON array of scenarios");

    std::vector<ScenarioConfig> configs;
    for (const auto& item : doc) {
        configs.push_back(affine::load_config(item.dump()));
        if (ov.seed_set) configs.back().seed = ov.seed;
    }

    std::vector<ResultTable> tables(configs.size());
    std::vector<std::string> errors(configs.size());
    std::atomic<int> failures{0};
    affine::parallel_for(
        configs.size(),
        [&](std::size_t i) {
            try {
                tables[i] = affine::run_scenario(configs[i]);
            } catch (const affine::Error& e) {
                errors[i] = e.what();
                failures.fetch_add(1);
            }
        },
        ov.threads);

    int rc = 0;
    for (std::size_t i = 0; i < configs.size(); ++i) {
        if (!errors[i].empty()) {
            std::fprintf(stderr, "scenario %zu failed: %s\n", i, errors[i].c_str());
            rc = 3;
            continue;
        }
        Overrides item_ov = ov;
        item_ov.out.clear();  // per-item stems; config "out" still wins
        const int item_rc =
            export_and_report(tables[i], configs[i], item_ov, "sweep_" + std::to_string(i));
        if (item_rc != 0) rc = item_rc;
    }
    return rc;
}

int cmd_audit(const std::string& table_path) {
    std::string message;
    const bool ok = affine::audit_table(table_path, message);
    std::printf("%s: %s\n", table_path.c_str(), message.c_str());
    return ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Affine-body scenarios: classical runs, quantum sweeps, export audits"};
    app.require_subcommand(1);

    Overrides ov;
    std::string config_path, table_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--seed", ov.seed, "Override the config seed")
            ->each([&](const std::string&) { ov.seed_set = true; });
        sub->add_option("--out", ov.out, "Output path (default: config 'out' or $AFFINE_OUT_DIR)");
        sub->add_option("--format", ov.format, "Export format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--threads", ov.threads, "Worker thread count (0 = all)");
    };

    CLI::App* run = app.add_subcommand("run", "Run one scenario config");
    run->add_option("config", config_path, "Scenario config file")->required();
    add_common(run);

    CLI::App* sweep = app.add_subcommand("sweep", "Run a batch of scenarios concurrently");
    sweep->add_option("config", config_path, "JSON array of scenario configs")->required();
    add_common(sweep);

    CLI::App* audit = app.add_subcommand("audit", "Re-verify the embedded hash of an export");
    audit->add_option("table", table_path, "Previously exported table")->required();

    CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
    if (ov.threads > 0) omp_set_num_threads(ov.threads);
#endif

    try {
        if (run->parsed()) return cmd_run(config_path, ov);
        if (sweep->parsed()) return cmd_sweep(config_path, ov);
        if (audit->parsed()) return cmd_audit(table_path);
    } catch (const affine::IOFailure& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 4;
    } catch (const affine::ParseError& e) {
        std::fprintf(stderr, "parse error: %s\n", e.what());
        return 2;
    } catch (const affine::ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const affine::InvalidModel& e) {
        std::fprintf(stderr, "invalid model: %s\n", e.what());
        return 2;
    } catch (const affine::InvalidLabel& e) {
        std::fprintf(stderr, "invalid label: %s\n", e.what());
        return 2;
    } catch (const affine::ShapeError& e) {
        std::fprintf(stderr, "shape error: %s\n", e.what());
        return 2;
    } catch (const affine::Error& e) {
        std::fprintf(stderr, "numerical error: %s\n", e.what());
        return 3;
    }
    return 0;
}
