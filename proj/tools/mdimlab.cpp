#include <CLI11.hpp>

#include <mdimlab/experiment.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace {

int exit_code_for(mdimlab::errc code) {
    return code == mdimlab::errc::budget_exceeded ? 3 : 2;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) mdimlab::fail(mdimlab::errc::invalid_config, "cannot open output file: " + path);
    out << text;
}

int run_config(mdimlab::ExperimentConfig cfg) {
    mdimlab::RunArtifacts art = mdimlab::run(cfg);

    std::string csv = std::string(mdimlab::kCsvHeader) + "\n";
    for (const auto& row : art.csv_rows) csv += row + "\n";
    if (art.budget_exceeded) csv += "# budget_exceeded\n";
    write_text(cfg.csv_path, csv);

    // summary always lands on stdout so a pipe sees the verdict even when
    // the count rows stream there too
    const std::string summary = art.summary.dump(2) + "\n";
    if (!cfg.summary_path.empty()) write_text(cfg.summary_path, summary);
    std::cout << summary;

    return art.budget_exceeded ? 3 : 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-scale entropy, mean-dimension, and box-dimension estimates "
                 "for interval maps, circle maps, word shifts, and map sequences"};
    app.require_subcommand(1);

    std::string config_path, csv_path, summary_path;
    auto* run_cmd = app.add_subcommand("run", "execute an experiment described by a JSON config");
    run_cmd->add_option("--config", config_path, "path to the experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    run_cmd->add_option("--csv", csv_path, "write count rows here (overrides config)");
    run_cmd->add_option("--summary", summary_path, "write the summary JSON here (overrides config)");

    std::string sweep_base = "identity_interval";
    std::string sweep_splice = "horseshoe_cascade";
    std::vector<double> sweep_deltas;
    double sweep_sched_base = 3.0;
    int sweep_k_min = 2, sweep_k_max = 8;
    std::string sweep_csv, sweep_summary;
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "splice a scaled cascade near a fixed point of the base map at several "
                 "perturbation sizes and estimate the resulting mean dimension");
    sweep_cmd->add_option("--base", sweep_base, "base construction id (default identity_interval)");
    sweep_cmd->add_option("--splice", sweep_splice,
                          "construction spliced in, or 'none' (default horseshoe_cascade)");
    sweep_cmd->add_option("--delta", sweep_deltas, "perturbation sizes (default 0.2 0.1 0.05)");
    sweep_cmd->add_option("--schedule-base", sweep_sched_base, "epsilon schedule base (default 3)");
    sweep_cmd->add_option("--k-min", sweep_k_min, "smallest schedule exponent (default 2)");
    sweep_cmd->add_option("--k-max", sweep_k_max, "largest schedule exponent (default 8)");
    sweep_cmd->add_option("--csv", sweep_csv, "write count rows here");
    sweep_cmd->add_option("--summary", sweep_summary, "write the summary JSON here");

    auto* list_cmd = app.add_subcommand("list", "print every construction id with its parameters");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2; // usage problems share the invalid-config code
    }

    try {
        if (list_cmd->parsed()) {
            std::printf("%-26s %-38s %s\n", "id", "parameters", "description");
            for (const auto& row : mdimlab::construction_registry())
                std::printf("%-26s %-38s %s\n", row.id.c_str(), row.params.c_str(),
                            row.note.c_str());
            return 0;
        }
        if (run_cmd->parsed()) {
            std::ifstream in(config_path);
            mdimlab::json j;
            try {
                in >> j;
            } catch (const mdimlab::json::exception& e) {
                mdimlab::fail(mdimlab::errc::invalid_config,
                              std::string("config: unparsable JSON: ") + e.what());
            }
            mdimlab::ExperimentConfig cfg = mdimlab::config_from_json(j);
            if (!csv_path.empty()) cfg.csv_path = csv_path;
            if (!summary_path.empty()) cfg.summary_path = summary_path;
            return run_config(std::move(cfg));
        }
        // sweep shorthand: build the equivalent config
        mdimlab::json j = {{"quantity", "sweep"},
                           {"schedule",
                            {{"base", sweep_sched_base},
                             {"k_min", sweep_k_min},
                             {"k_max", sweep_k_max}}},
                           {"sweep", {{"base", sweep_base}, {"splice", sweep_splice}}}};
        if (!sweep_deltas.empty()) j["sweep"]["deltas"] = sweep_deltas;
        mdimlab::ExperimentConfig cfg = mdimlab::config_from_json(j);
        cfg.csv_path = sweep_csv;
        cfg.summary_path = sweep_summary;
        return run_config(std::move(cfg));
    } catch (const mdimlab::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
