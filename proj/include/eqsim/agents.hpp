#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eqsim/numerics.hpp"
#include "eqsim/stimuli.hpp"
#include "eqsim/transformer.hpp"
#include "eqsim/trials.hpp"

namespace eqsim::agents {

enum class AgentKind { probabilistic, ffn, gpt, bert };

inline const char* to_string(AgentKind k) {
    switch (k) {
        case AgentKind::probabilistic: return "probabilistic";
        case AgentKind::ffn: return "ffn";
        case AgentKind::gpt: return "gpt";
        case AgentKind::bert: return "bert";
    }
    return "?";
}

AgentKind parse_agent(const std::string& name);

struct TrainReport {
    int steps = 0;  // epochs (ffn) or iterations (transformer)
    double final_loss = 0.0;
    double baseline_accuracy = 0.0;  // on the training trials, after training
    std::string stop_reason;         // "threshold" or "max_iters"
};

// ---------------------------------------------------------------------------
// Probabilistic benchmark: a 48x48 matrix of reward probabilities
// P(reward | sample, comparison), initialized to 0.5 + Normal(0, 0.01) and
// clamped to exactly 0/1 by training feedback.
// ---------------------------------------------------------------------------
class ProbabilisticAgent {
public:
    // Noise drawn row-major from substream "prob-init" of the given seed;
    // the oracle replays the identical stream.
    explicit ProbabilisticAgent(std::uint64_t seed);

    void train_trial(const trials::Trial& trial);
    void train(const trials::TrialSet& set);
    int select(const trials::Trial& trial) const;  // exact ties -> lowest position

    const numerics::Matrix2D& reward_matrix() const { return p_; }
    std::string reward_matrix_csv() const;

private:
    numerics::Matrix2D p_;
};

inline const char* kProbInitSubstream = "prob-init";

// ---------------------------------------------------------------------------
// Single-hidden-layer FFN: one-hot trial encoding in, 3 linear output units,
// ReLU hidden, MSE loss, Adam, RMSE-based early stopping.
// ---------------------------------------------------------------------------
struct FfnConfig {
    int hidden_units = 256;
    double lr = 0.001;
    int max_epochs = 2000;
    double rmse_threshold = 0.001;
    int batch_size = 64;

    static FfnConfig desk() { return {}; }
    static FfnConfig paper() { return {50000, 0.001, 50000, 0.001, 64}; }
};

class FfnModel {
public:
    FfnModel(const FfnConfig& cfg, int input_dim);

    void init_params(numerics::Prng& rng);  // uniform +-1/sqrt(fan_in)

    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }

    // outputs for one encoded trial (length 3)
    std::array<double, 3> forward(std::span<const double> input) const;

    // Mean squared error over a batch of encoded trials with one-hot targets;
    // accumulates gradients. Batch rows are input_dim wide.
    double loss_and_grad(std::span<const double> inputs, std::span<const int> targets,
                         int n, std::span<double> grads) const;

    const FfnConfig& config() const { return cfg_; }
    int input_dim() const { return input_dim_; }

private:
    FfnConfig cfg_;
    int input_dim_;
    std::vector<double> params_;
    // layout: W1 (input_dim x hidden), b1 (hidden), W2 (hidden x 3), b2 (3)
    std::size_t w1_, b1_, w2_, b2_;
};

std::pair<FfnModel, TrainReport> ffn_train(const FfnConfig& cfg, const trials::TrialSet& set,
                                           std::uint64_t seed);

int ffn_select(const FfnModel& model, const trials::Trial& trial);

// ---------------------------------------------------------------------------
// GPT / BERT wrappers around the transformer net: trials as 5-token
// sequences, cross-entropy over all shifted positions, greedy selection.
// ---------------------------------------------------------------------------
std::pair<transformer::TransformerNet, TrainReport> transformer_train(
    const transformer::TransformerConfig& cfg, const trials::TrialSet& set,
    std::uint64_t seed);

struct SelectOutcome {
    int comparison_index = -1;  // -1 when a non-response token was emitted
    int emitted_token = -1;

    bool responded() const { return comparison_index >= 0; }
};

// Greedy argmax over the full vocabulary at the last prompt position; with
// restrict_to_responses only O_1..O_3 compete.
SelectOutcome transformer_select(const transformer::TransformerNet& net,
                                 const trials::Trial& trial,
                                 bool restrict_to_responses = false);

}  // namespace eqsim::agents
