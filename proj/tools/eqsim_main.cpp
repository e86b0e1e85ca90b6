#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "eqsim/oracle.hpp"
#include "eqsim/runner.hpp"
#include "eqsim/structures.hpp"
#include "eqsim/trials.hpp"

namespace {

using namespace eqsim;

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::string oracle_csv(const std::vector<Condition>& conditions) {
    std::string out = "condition,base,refl,symm,trans\n";
    char buf[128];
    for (const auto& c : conditions) {
        const auto r = oracle::expected_rates(c);
        std::snprintf(buf, sizeof(buf), "%s,%.4f,%.4f,%.4f,%.4f\n", c.name().c_str(), r.base,
                      r.reflexivity, r.symmetry, r.transitivity);
        out += buf;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Matching-to-sample stimulus-equivalence simulation engine"};
    app.require_subcommand(1);

    // conditions list
    auto* conditions_cmd = app.add_subcommand("conditions", "Condition registry");
    conditions_cmd->require_subcommand(1);
    conditions_cmd->add_subcommand("list", "List the 18 condition names");

    // trials gen
    auto* trials_cmd = app.add_subcommand("trials", "Trial generation");
    trials_cmd->require_subcommand(1);
    auto* gen_cmd = trials_cmd->add_subcommand("gen", "Generate a trial set as JSONL");
    std::string gen_condition, gen_out, gen_scheme = "rotations", gen_phase = "train";
    std::uint64_t gen_seed = 1;
    gen_cmd->add_option("--condition", gen_condition, "Condition name")->required();
    gen_cmd->add_option("--seed", gen_seed, "Seed");
    gen_cmd->add_option("--out", gen_out, "Output path (default stdout)");
    gen_cmd->add_option("--scheme", gen_scheme, "rotations | permutations | random:<k>");
    gen_cmd->add_option("--phase", gen_phase, "train | eval");

    // run
    auto* run_cmd = app.add_subcommand("run", "Run one (condition, agent, seed) cell");
    std::string run_condition, run_agent, run_profile = "desk", run_format = "csv";
    std::uint64_t run_seed = 1;
    run_cmd->add_option("--condition", run_condition, "Condition name")->required();
    run_cmd->add_option("--agent", run_agent, "probabilistic | ffn | gpt | bert")->required();
    run_cmd->add_option("--seed", run_seed, "Seed");
    run_cmd->add_option("--profile", run_profile, "desk | paper");
    run_cmd->add_option("--format", run_format, "csv | json");

    // run-all
    auto* runall_cmd = app.add_subcommand("run-all", "Run the experiment matrix from a config");
    std::string runall_config;
    runall_cmd->add_option("--config", runall_config, "TOML or JSON config file")->required();

    // oracle
    auto* oracle_cmd = app.add_subcommand("oracle", "Expected probabilistic rates per condition");
    std::string oracle_condition;
    oracle_cmd->add_option("--condition", oracle_condition, "Single condition (default: all)");

    // matrix
    auto* matrix_cmd = app.add_subcommand("matrix", "Export the trained-relation matrix");
    std::string matrix_condition, matrix_out, matrix_svg;
    std::uint64_t matrix_seed = 1;
    matrix_cmd->add_option("--condition", matrix_condition, "Condition name")->required();
    matrix_cmd->add_option("--out", matrix_out, "CSV output path")->required();
    matrix_cmd->add_option("--svg", matrix_svg, "Optional SVG heatmap path");
    matrix_cmd->add_option("--seed", matrix_seed, "Seed for dummy assignment");

    // report
    auto* report_cmd = app.add_subcommand("report", "Re-render stored results");
    std::string report_in, report_format = "csv", report_out;
    bool report_comma = false;
    report_cmd->add_option("--in", report_in, "results.json path")->required();
    report_cmd->add_option("--format", report_format, "csv | json");
    report_cmd->add_option("--out", report_out, "Output path (default stdout)");
    report_cmd->add_flag("--decimal-comma", report_comma, "Render rates with decimal commas");

    CLI11_PARSE(app, argc, argv);

    try {
        if (conditions_cmd->parsed()) {
            for (const auto& c : all_conditions()) std::cout << c.name() << '\n';
            return 0;
        }
        if (gen_cmd->parsed()) {
            const auto condition = parse_condition(gen_condition);
            trials::TrialSet set;
            if (gen_phase == "train")
                set = trials::generate_training_trials(condition, trials::parse_scheme(gen_scheme),
                                                       gen_seed);
            else if (gen_phase == "eval")
                set = trials::generate_eval_trials(condition.ts);
            else
                throw std::invalid_argument("phase must be train or eval");
            const auto text = trials::to_jsonl(set);
            if (gen_out.empty()) std::cout << text;
            else write_file(gen_out, text);
            return 0;
        }
        if (run_cmd->parsed()) {
            runner::ExperimentConfig cfg;
            cfg.profile = run_profile;
            const auto result = runner::run_cell(parse_condition(run_condition),
                                                 agents::parse_agent(run_agent), cfg, run_seed);
            if (run_format == "json") std::cout << runner::results_json({result});
            else std::cout << runner::results_csv({result});
            return result.error.empty() ? 0 : 1;
        }
        if (runall_cmd->parsed()) {
            const auto cfg = runner::load_config(runall_config);
            const auto results = runner::run_full_matrix(cfg);
            const std::string base = cfg.out_dir + "/results";
            runner::write_results(results, "csv", base + ".csv", cfg.decimal_comma);
            runner::write_results(results, "json", base + ".json");
            int errors = 0;
            for (const auto& r : results)
                if (!r.error.empty()) {
                    ++errors;
                    std::cerr << "cell error (sim " << r.simulation_id << ", seed " << r.seed
                              << "): " << r.error << '\n';
                }
            std::cout << results.size() << " cells -> " << base << ".csv / .json\n";
            return errors == 0 ? 0 : 1;  // mastery failures are data, not errors
        }
        if (oracle_cmd->parsed()) {
            std::vector<Condition> conditions;
            if (oracle_condition.empty()) conditions = all_conditions();
            else conditions.push_back(parse_condition(oracle_condition));
            std::cout << oracle_csv(conditions);
            return 0;
        }
        if (matrix_cmd->parsed()) {
            runner::export_relation_csv(parse_condition(matrix_condition), matrix_out,
                                        matrix_seed, matrix_svg);
            return 0;
        }
        if (report_cmd->parsed()) {
            std::ifstream in(report_in, std::ios::binary);
            if (!in) throw std::runtime_error("cannot open: " + report_in);
            std::string text((std::istreambuf_iterator<char>(in)),
                             std::istreambuf_iterator<char>());
            const auto results = runner::parse_results_json(text);
            const std::string rendered = report_format == "json"
                                             ? runner::results_json(results)
                                             : runner::results_csv(results, report_comma);
            if (report_out.empty()) std::cout << rendered;
            else write_file(report_out, rendered);
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
