#include "eqsim/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "eqsim/structures.hpp"

namespace eqsim::runner {

using agents::AgentKind;
using nlohmann::json;

void ExperimentConfig::validate() const {
    if (!(near_mastery_threshold > 0.0 && near_mastery_threshold <= mastery_threshold &&
          mastery_threshold <= 1.0))
        throw std::invalid_argument("thresholds must satisfy 0 < near <= mastery <= 1");
    if (max_mastery_retries < 0) throw std::invalid_argument("max_mastery_retries < 0");
    if (profile != "desk" && profile != "paper")
        throw std::invalid_argument("profile must be desk or paper");
    if (seeds.empty()) throw std::invalid_argument("at least one seed required");
    if (threads < 1) throw std::invalid_argument("threads < 1");
}

int simulation_id(const Condition& condition, AgentKind agent) {
    const int ts = condition.ts == TrainingStructure::LS ? 0
                   : condition.ts == TrainingStructure::MTO ? 1 : 2;
    const int rel = condition.relation_type == RelationType::select_reject ? 0
                    : condition.relation_type == RelationType::select_only ? 1 : 2;
    const int ncs = condition.ncs == NegativePolicy::standard ? 0 : 1;
    const int ag = agent == AgentKind::bert ? 0
                   : agent == AgentKind::ffn ? 1
                   : agent == AgentKind::gpt ? 2 : 3;
    return ts * 24 + rel * 8 + ncs * 4 + ag + 1;
}

namespace {

const char* ts_label(TrainingStructure ts) { return to_string(ts); }

const char* rel_label(RelationType rt) {
    switch (rt) {
        case RelationType::select_reject: return "Sel-Rej";
        case RelationType::select_only: return "Sel";
        case RelationType::reject_only: return "Rej";
    }
    return "?";
}

const char* negc_label(NegativePolicy p) {
    return p == NegativePolicy::standard ? "Std" : "B(S-)";
}

const char* agent_label(AgentKind a) {
    switch (a) {
        case AgentKind::bert: return "BERT";
        case AgentKind::ffn: return "FFN";
        case AgentKind::gpt: return "GPT";
        case AgentKind::probabilistic: return "Prob";
    }
    return "?";
}

std::uint64_t derived_seed(std::uint64_t seed, const std::string& tag) {
    return numerics::Prng(seed).substream(tag).next_u64();
}

// A trained agent reduced to its selection behaviour.
using SelectFn = std::function<int(const trials::Trial&)>;

struct TrainedAgent {
    SelectFn select;
    agents::TrainReport report;
};

double baseline_accuracy(const SelectFn& select, const trials::TrialSet& evals) {
    int correct = 0, total = 0;
    for (const auto& t : evals.trials) {
        if (t.test_kind != trials::TestKind::baseline) continue;
        ++total;
        if (select(t) == t.correct_index) ++correct;
    }
    return total ? static_cast<double>(correct) / total : 0.0;
}

TrainedAgent train_agent(const Condition& condition, AgentKind kind,
                         const ExperimentConfig& config, const trials::TrialSet& training,
                         std::uint64_t agent_seed) {
    TrainedAgent out;
    switch (kind) {
        case AgentKind::probabilistic: {
            auto agent = std::make_shared<agents::ProbabilisticAgent>(agent_seed);
            agent->train(training);
            out.report.stop_reason = "trained";
            out.report.steps = static_cast<int>(training.trials.size());
            out.select = [agent](const trials::Trial& t) { return agent->select(t); };
            break;
        }
        case AgentKind::ffn: {
            const auto cfg = config.profile == "paper" ? agents::FfnConfig::paper()
                                                       : agents::FfnConfig::desk();
            auto [model, report] = agents::ffn_train(cfg, training, agent_seed);
            auto shared = std::make_shared<agents::FfnModel>(std::move(model));
            out.report = report;
            out.select = [shared](const trials::Trial& t) { return agents::ffn_select(*shared, t); };
            break;
        }
        case AgentKind::gpt:
        case AgentKind::bert: {
            const bool causal = kind == AgentKind::gpt;
            const auto cfg = config.profile == "paper"
                                 ? transformer::TransformerConfig::paper(causal)
                                 : transformer::TransformerConfig::desk(causal);
            auto [net, report] = agents::transformer_train(cfg, training, agent_seed);
            auto shared = std::make_shared<transformer::TransformerNet>(std::move(net));
            out.report = report;
            out.select = [shared](const trials::Trial& t) {
                return agents::transformer_select(*shared, t).comparison_index;
            };
            break;
        }
    }
    return out;
}

TestRates evaluate(const SelectFn& select, const trials::TrialSet& evals) {
    double sum[4] = {0, 0, 0, 0};
    int count[4] = {0, 0, 0, 0};
    for (const auto& t : evals.trials) {
        const int k = static_cast<int>(t.test_kind);
        sum[k] += select(t) == t.correct_index ? 1.0 : 0.0;
        count[k] += 1;
    }
    TestRates r;
    r.base = count[0] ? sum[0] / count[0] : 0.0;
    r.reflexivity = count[1] ? sum[1] / count[1] : 0.0;
    r.symmetry = count[2] ? sum[2] / count[2] : 0.0;
    r.transitivity = count[3] ? sum[3] / count[3] : 0.0;
    return r;
}

}  // namespace

RunResult run_cell(const Condition& condition, AgentKind agent, const ExperimentConfig& config,
                   std::uint64_t seed) {
    config.validate();
    const auto start = std::chrono::steady_clock::now();

    RunResult result;
    result.simulation_id = simulation_id(condition, agent);
    result.condition = condition;
    result.agent = agent;
    result.seed = seed;

    try {
        const auto training = trials::generate_training_trials(condition, config.scheme, seed);
        const auto evals = trials::generate_eval_trials(condition.ts);

        TrainedAgent trained;
        double base_acc = 0.0;
        for (int retry = 0; retry <= config.max_mastery_retries; ++retry) {
            const std::uint64_t agent_seed =
                retry == 0 ? seed : derived_seed(seed, "mastery-retry/" + std::to_string(retry));
            trained = train_agent(condition, agent, config, training, agent_seed);
            base_acc = baseline_accuracy(trained.select, evals);
            result.retries_used = retry;
            if (base_acc >= config.mastery_threshold) break;
        }
        result.mastery_failed = base_acc < config.mastery_threshold;
        result.stop_reason = trained.report.stop_reason;
        result.rates = evaluate(trained.select, evals);

        const double vals[4] = {result.rates.base, result.rates.reflexivity,
                                result.rates.symmetry, result.rates.transitivity};
        for (int i = 0; i < 4; ++i) {
            result.mastery[i] = vals[i] >= config.mastery_threshold;
            result.near_mastery[i] = vals[i] >= config.near_mastery_threshold;
        }
    } catch (const std::exception& e) {
        throw std::runtime_error("cell " + condition.name() + "/" +
                                 agents::to_string(agent) + "/seed " + std::to_string(seed) +
                                 ": " + e.what());
    }

    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

std::vector<RunResult> run_full_matrix(const ExperimentConfig& config) {
    config.validate();
    auto conditions = config.conditions.empty() ? all_conditions() : config.conditions;
    std::vector<AgentKind> kinds = config.agents;
    if (kinds.empty())
        kinds = {AgentKind::bert, AgentKind::ffn, AgentKind::gpt, AgentKind::probabilistic};

    struct Cell {
        Condition condition;
        AgentKind agent;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto seed : config.seeds)
        for (const auto& c : conditions)
            for (const auto a : kinds) cells.push_back({c, a, seed});

    std::vector<RunResult> results(cells.size());
    const auto work = [&](std::size_t stride, std::size_t offset) {
        for (std::size_t i = offset; i < cells.size(); i += stride) {
            try {
                results[i] = run_cell(cells[i].condition, cells[i].agent, config, cells[i].seed);
            } catch (const std::exception& e) {
                RunResult failed;
                failed.simulation_id = simulation_id(cells[i].condition, cells[i].agent);
                failed.condition = cells[i].condition;
                failed.agent = cells[i].agent;
                failed.seed = cells[i].seed;
                failed.error = e.what();
                results[i] = failed;
            }
        }
    };
    if (config.threads <= 1) {
        work(1, 0);
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < config.threads; ++t)
            pool.emplace_back(work, static_cast<std::size_t>(config.threads),
                              static_cast<std::size_t>(t));
        for (auto& t : pool) t.join();
    }

    // Deterministic order regardless of scheduling: by cell key, never by
    // completion order.
    std::stable_sort(results.begin(), results.end(), [](const RunResult& a, const RunResult& b) {
        if (a.simulation_id != b.simulation_id) return a.simulation_id < b.simulation_id;
        return a.seed < b.seed;
    });
    return results;
}

std::vector<ProbeResult> sequential_probe(const Condition& condition, AgentKind agent,
                                          const ExperimentConfig& config, std::uint64_t seed) {
    config.validate();
    const auto training = trials::generate_training_trials(condition, config.scheme, seed);
    const auto evals = trials::generate_eval_trials(condition.ts);

    std::vector<stimuli::StimulusId> samples;
    for (const auto& t : training.trials)
        if (std::find(samples.begin(), samples.end(), t.sample) == samples.end())
            samples.push_back(t.sample);
    std::sort(samples.begin(), samples.end());

    std::vector<ProbeResult> out;
    for (const auto sample : samples) {
        trials::TrialSet subset;
        subset.condition = condition;
        subset.seed = seed;
        for (const auto& t : training.trials)
            if (t.sample == sample) subset.trials.push_back(t);

        const std::uint64_t probe_seed = derived_seed(seed, "probe/" + stimuli::label(sample));
        const auto trained = train_agent(condition, agent, config, subset, probe_seed);

        ProbeResult pr;
        pr.trained_sample = sample;
        for (const auto& t : evals.trials) {
            const bool correct = trained.select(t) == t.correct_index;
            if (t.sample == sample) {
                pr.trained_sample_rate += correct;
                pr.trained_sample_trials += 1;
            } else {
                pr.other_sample_rate += correct;
                pr.other_sample_trials += 1;
            }
        }
        if (pr.trained_sample_trials) pr.trained_sample_rate /= pr.trained_sample_trials;
        if (pr.other_sample_trials) pr.other_sample_rate /= pr.other_sample_trials;
        out.push_back(pr);
    }
    return out;
}

namespace {

std::string format_rate(double v, bool decimal_comma) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    std::string s(buf);
    if (decimal_comma) {
        const auto pos = s.find('.');
        if (pos != std::string::npos) s[pos] = ',';
    }
    return s;
}

std::string mastery_flags(const RunResult& r) {
    std::string s;
    for (int i = 0; i < 4; ++i) s += r.mastery[i] ? 'M' : (r.near_mastery[i] ? 'n' : '-');
    return s;
}

}  // namespace

std::string results_csv(const std::vector<RunResult>& results, bool decimal_comma) {
    std::ostringstream out;
    out << "sim,ts,rel,negc,agent,seed,base,refl,symm,trans,mastery_flags\n";
    const char sep = decimal_comma ? ';' : ',';
    for (const auto& r : results) {
        out << r.simulation_id << sep << ts_label(r.condition.ts) << sep
            << rel_label(r.condition.relation_type) << sep << negc_label(r.condition.ncs) << sep
            << agent_label(r.agent) << sep << r.seed << sep
            << format_rate(r.rates.base, decimal_comma) << sep
            << format_rate(r.rates.reflexivity, decimal_comma) << sep
            << format_rate(r.rates.symmetry, decimal_comma) << sep
            << format_rate(r.rates.transitivity, decimal_comma) << sep << mastery_flags(r)
            << '\n';
    }
    return out.str();
}

std::string results_json(const std::vector<RunResult>& results) {
    json arr = json::array();
    for (const auto& r : results) {
        json j;
        j["sim"] = r.simulation_id;
        j["condition"] = r.condition.name();
        j["agent"] = agents::to_string(r.agent);
        j["seed"] = r.seed;
        j["rates"] = {{"base", r.rates.base},
                      {"refl", r.rates.reflexivity},
                      {"symm", r.rates.symmetry},
                      {"trans", r.rates.transitivity}};
        j["mastery"] = std::vector<bool>(r.mastery, r.mastery + 4);
        j["near_mastery"] = std::vector<bool>(r.near_mastery, r.near_mastery + 4);
        j["mastery_failed"] = r.mastery_failed;
        j["retries_used"] = r.retries_used;
        j["stop_reason"] = r.stop_reason;
        j["error"] = r.error;
        j["wall_time_s"] = r.wall_time_s;
        arr.push_back(std::move(j));
    }
    return arr.dump(2) + "\n";
}

std::vector<RunResult> parse_results_json(const std::string& json_text) {
    const json arr = json::parse(json_text);
    std::vector<RunResult> out;
    for (const auto& j : arr) {
        RunResult r;
        r.simulation_id = j.at("sim").get<int>();
        r.condition = parse_condition(j.at("condition").get<std::string>());
        r.agent = agents::parse_agent(j.at("agent").get<std::string>());
        r.seed = j.at("seed").get<std::uint64_t>();
        r.rates.base = j.at("rates").at("base").get<double>();
        r.rates.reflexivity = j.at("rates").at("refl").get<double>();
        r.rates.symmetry = j.at("rates").at("symm").get<double>();
        r.rates.transitivity = j.at("rates").at("trans").get<double>();
        for (int i = 0; i < 4; ++i) {
            r.mastery[i] = j.at("mastery").at(i).get<bool>();
            r.near_mastery[i] = j.at("near_mastery").at(i).get<bool>();
        }
        r.mastery_failed = j.at("mastery_failed").get<bool>();
        r.retries_used = j.at("retries_used").get<int>();
        r.stop_reason = j.at("stop_reason").get<std::string>();
        r.error = j.at("error").get<std::string>();
        r.wall_time_s = j.at("wall_time_s").get<double>();
        out.push_back(std::move(r));
    }
    return out;
}

void write_results(const std::vector<RunResult>& results, const std::string& format,
                   const std::string& path, bool decimal_comma) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    if (format == "csv") out << results_csv(results, decimal_comma);
    else if (format == "json") out << results_json(results);
    else throw std::invalid_argument("unknown result format: " + format);
    if (!out) throw std::runtime_error("write failed: " + path);
}

void export_relation_csv(const Condition& condition, const std::string& path,
                         std::uint64_t seed, const std::string& svg_path) {
    const auto training =
        trials::generate_training_trials(condition, trials::PositionScheme::rotations(), seed);
    const auto matrix = structures::relation_matrix(condition, training);
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + path);
        out << structures::relation_matrix_csv(matrix);
        if (!out) throw std::runtime_error("write failed: " + path);
    }
    if (!svg_path.empty()) {
        std::ofstream out(svg_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot open output file: " + svg_path);
        out << structures::relation_matrix_svg(matrix, condition.name());
        if (!out) throw std::runtime_error("write failed: " + svg_path);
    }
}

namespace {

// Minimal flat TOML subset: `key = value` lines, strings, numbers, booleans
// and one-line arrays. Enough for ExperimentConfig files.
json parse_flat_toml(std::istream& in) {
    json out = json::object();
    std::string line;
    const auto parse_scalar = [](std::string s) -> json {
        if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
            return s.substr(1, s.size() - 2);
        if (s == "true") return true;
        if (s == "false") return false;
        if (s.find_first_of(".eE") != std::string::npos) return std::stod(s);
        return std::stoll(s);
    };
    const auto trim = [](std::string s) {
        const auto a = s.find_first_not_of(" \t\r");
        const auto b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
    };
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!value.empty() && value.front() == '[') {
            if (value.back() != ']')
                throw std::runtime_error("config line " + std::to_string(lineno) +
                                         ": arrays must be one line");
            json arr = json::array();
            std::string body = value.substr(1, value.size() - 2);
            std::stringstream ss(body);
            std::string item;
            while (std::getline(ss, item, ',')) {
                item = trim(item);
                if (!item.empty()) arr.push_back(parse_scalar(item));
            }
            out[key] = std::move(arr);
        } else {
            out[key] = parse_scalar(value);
        }
    }
    return out;
}

}  // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    json j;
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") {
        j = json::parse(in);
    } else {
        j = parse_flat_toml(in);
    }

    ExperimentConfig cfg;
    if (j.contains("conditions"))
        for (const auto& name : j["conditions"])
            cfg.conditions.push_back(parse_condition(name.get<std::string>()));
    if (j.contains("agents"))
        for (const auto& name : j["agents"])
            cfg.agents.push_back(agents::parse_agent(name.get<std::string>()));
    if (j.contains("seeds")) {
        cfg.seeds.clear();
        for (const auto& s : j["seeds"]) cfg.seeds.push_back(s.get<std::uint64_t>());
    }
    if (j.contains("mastery_threshold")) cfg.mastery_threshold = j["mastery_threshold"];
    if (j.contains("near_mastery_threshold"))
        cfg.near_mastery_threshold = j["near_mastery_threshold"];
    if (j.contains("max_mastery_retries")) cfg.max_mastery_retries = j["max_mastery_retries"];
    if (j.contains("profile")) cfg.profile = j["profile"];
    if (j.contains("scheme")) cfg.scheme = trials::parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("out_dir")) cfg.out_dir = j["out_dir"];
    if (j.contains("decimal_comma")) cfg.decimal_comma = j["decimal_comma"];
    if (j.contains("threads")) cfg.threads = j["threads"];
    cfg.validate();
    return cfg;
}

}  // namespace eqsim::runner
