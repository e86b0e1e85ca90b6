#include "eqsim/agents.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace eqsim::agents {

using numerics::Prng;
using stimuli::kTotalStimuli;

AgentKind parse_agent(const std::string& name) {
    if (name == "probabilistic" || name == "prob") return AgentKind::probabilistic;
    if (name == "ffn") return AgentKind::ffn;
    if (name == "gpt") return AgentKind::gpt;
    if (name == "bert") return AgentKind::bert;
    throw std::invalid_argument("unknown agent kind: \"" + name + "\"");
}

// ---------------------------------------------------------------------------
// Probabilistic agent
// ---------------------------------------------------------------------------

ProbabilisticAgent::ProbabilisticAgent(std::uint64_t seed)
    : p_(kTotalStimuli, kTotalStimuli) {
    auto noise = Prng(seed).substream(kProbInitSubstream);
    for (int r = 0; r < kTotalStimuli; ++r)
        for (int c = 0; c < kTotalStimuli; ++c) p_.at(r, c) = 0.5 + noise.normal(0.0, 0.01);
}

void ProbabilisticAgent::train_trial(const trials::Trial& trial) {
    if (trial.phase != trials::Phase::train)
        throw std::invalid_argument("probabilistic agent trained on a non-training trial");
    for (int i = 0; i < 3; ++i)
        p_.at(trial.sample.index, trial.comparisons[i].index) =
            i == trial.correct_index ? 1.0 : 0.0;
}

void ProbabilisticAgent::train(const trials::TrialSet& set) {
    for (const auto& t : set.trials) train_trial(t);
}

int ProbabilisticAgent::select(const trials::Trial& trial) const {
    int best = 0;
    double best_p = p_.at(trial.sample.index, trial.comparisons[0].index);
    for (int i = 1; i < 3; ++i) {
        const double v = p_.at(trial.sample.index, trial.comparisons[i].index);
        if (v > best_p) {
            best_p = v;
            best = i;
        }
    }
    return best;
}

std::string ProbabilisticAgent::reward_matrix_csv() const {
    std::ostringstream out;
    out << "sample";
    for (int c = 0; c < kTotalStimuli; ++c) out << ',' << stimuli::label({c});
    out << '\n';
    for (int r = 0; r < kTotalStimuli; ++r) {
        out << stimuli::label({r});
        for (int c = 0; c < kTotalStimuli; ++c) out << ',' << p_.at(r, c);
        out << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// FFN
// ---------------------------------------------------------------------------

FfnModel::FfnModel(const FfnConfig& cfg, int input_dim) : cfg_(cfg), input_dim_(input_dim) {
    const std::size_t h = cfg.hidden_units;
    w1_ = 0;
    b1_ = w1_ + static_cast<std::size_t>(input_dim) * h;
    w2_ = b1_ + h;
    b2_ = w2_ + h * 3;
    params_.assign(b2_ + 3, 0.0);
}

void FfnModel::init_params(Prng& rng) {
    auto stream = rng.substream("ffn-init");
    const double s1 = 1.0 / std::sqrt(static_cast<double>(input_dim_));
    const double s2 = 1.0 / std::sqrt(static_cast<double>(cfg_.hidden_units));
    for (std::size_t i = w1_; i < b1_; ++i) params_[i] = (2.0 * stream.uniform() - 1.0) * s1;
    for (std::size_t i = w2_; i < b2_; ++i) params_[i] = (2.0 * stream.uniform() - 1.0) * s2;
}

std::array<double, 3> FfnModel::forward(std::span<const double> input) const {
    const int h = cfg_.hidden_units;
    std::vector<double> hidden(h, 0.0);
    numerics::matmul_acc(input.data(), params_.data() + w1_, hidden.data(), 1, input_dim_, h);
    for (int j = 0; j < h; ++j) hidden[j] = numerics::relu(hidden[j] + params_[b1_ + j]);
    std::array<double, 3> out{params_[b2_], params_[b2_ + 1], params_[b2_ + 2]};
    for (int j = 0; j < h; ++j) {
        const double a = hidden[j];
        if (a == 0.0) continue;
        for (int k = 0; k < 3; ++k) out[k] += a * params_[w2_ + static_cast<std::size_t>(j) * 3 + k];
    }
    return out;
}

double FfnModel::loss_and_grad(std::span<const double> inputs, std::span<const int> targets,
                               int n, std::span<double> grads) const {
    if (grads.size() != params_.size())
        throw std::invalid_argument("ffn loss_and_grad: gradient size mismatch");
    const int h = cfg_.hidden_units;
    std::vector<double> pre(h), act(h);
    double loss = 0.0;
    const double norm = 1.0 / (3.0 * n);
    for (int s = 0; s < n; ++s) {
        const double* x = inputs.data() + static_cast<std::size_t>(s) * input_dim_;
        std::fill(pre.begin(), pre.end(), 0.0);
        numerics::matmul_acc(x, params_.data() + w1_, pre.data(), 1, input_dim_, h);
        for (int j = 0; j < h; ++j) {
            pre[j] += params_[b1_ + j];
            act[j] = numerics::relu(pre[j]);
        }
        double out[3] = {params_[b2_], params_[b2_ + 1], params_[b2_ + 2]};
        for (int j = 0; j < h; ++j) {
            const double a = act[j];
            if (a == 0.0) continue;
            for (int k = 0; k < 3; ++k) out[k] += a * params_[w2_ + static_cast<std::size_t>(j) * 3 + k];
        }
        double dout[3];
        for (int k = 0; k < 3; ++k) {
            const double target = k == targets[s] ? 1.0 : 0.0;
            const double diff = out[k] - target;
            loss += diff * diff * norm;
            dout[k] = 2.0 * diff * norm;
        }
        for (int k = 0; k < 3; ++k) grads[b2_ + k] += dout[k];
        for (int j = 0; j < h; ++j) {
            const double a = act[j];
            double dact = 0.0;
            for (int k = 0; k < 3; ++k) {
                const double w = params_[w2_ + static_cast<std::size_t>(j) * 3 + k];
                if (a != 0.0) grads[w2_ + static_cast<std::size_t>(j) * 3 + k] += a * dout[k];
                dact += w * dout[k];
            }
            if (pre[j] <= 0.0) continue;
            grads[b1_ + j] += dact;
            // one-hot inputs: only nonzero coordinates contribute
            for (int i = 0; i < input_dim_; ++i)
                if (x[i] != 0.0) grads[w1_ + static_cast<std::size_t>(i) * h + j] += x[i] * dact;
        }
    }
    if (!std::isfinite(loss)) throw std::runtime_error("ffn loss is non-finite");
    return loss;
}

std::pair<FfnModel, TrainReport> ffn_train(const FfnConfig& cfg, const trials::TrialSet& set,
                                           std::uint64_t seed) {
    if (set.trials.empty()) throw std::invalid_argument("ffn_train: empty trial set");
    for (const auto& t : set.trials)
        if (t.phase != trials::Phase::train)
            throw std::invalid_argument("ffn_train: evaluation trial in training set");

    const auto stimulus_set = stimuli::build_stimulus_set();
    const int input_dim = 4 * stimulus_set.total();
    FfnModel model(cfg, input_dim);
    Prng root(seed);
    model.init_params(root);
    auto order_rng = root.substream("ffn-epoch-order");

    const int n = static_cast<int>(set.trials.size());
    std::vector<double> encoded(static_cast<std::size_t>(n) * input_dim);
    std::vector<int> targets(n);
    for (int i = 0; i < n; ++i) {
        const auto v = trials::encode_onehot(set.trials[i], stimulus_set);
        std::copy(v.begin(), v.end(), encoded.begin() + static_cast<std::size_t>(i) * input_dim);
        targets[i] = set.trials[i].correct_index;
    }

    numerics::AdamState adam(model.params().size(), cfg.lr);
    std::vector<double> grads(model.params().size());
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::vector<double> batch_in(static_cast<std::size_t>(cfg.batch_size) * input_dim);
    std::vector<int> batch_tg(cfg.batch_size);

    TrainReport report;
    report.stop_reason = "max_iters";
    double full_rmse = 0.0;
    for (int epoch = 0; epoch < cfg.max_epochs; ++epoch) {
        order_rng.shuffle(order);
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int bs = std::min(cfg.batch_size, n - start);
            for (int i = 0; i < bs; ++i) {
                std::copy_n(encoded.begin() + static_cast<std::size_t>(order[start + i]) * input_dim,
                            input_dim, batch_in.begin() + static_cast<std::size_t>(i) * input_dim);
                batch_tg[i] = targets[order[start + i]];
            }
            std::fill(grads.begin(), grads.end(), 0.0);
            report.final_loss = model.loss_and_grad(
                std::span(batch_in).subspan(0, static_cast<std::size_t>(bs) * input_dim),
                std::span(batch_tg).subspan(0, bs), bs, grads);
            numerics::adam_step(model.params(), grads, adam);
        }
        report.steps = epoch + 1;
        // full-set RMSE for the early-stop check
        double sq = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto out = model.forward(std::span(encoded).subspan(
                static_cast<std::size_t>(i) * input_dim, input_dim));
            for (int k = 0; k < 3; ++k) {
                const double d = out[k] - (k == targets[i] ? 1.0 : 0.0);
                sq += d * d;
            }
        }
        full_rmse = std::sqrt(sq / (3.0 * n));
        if (full_rmse < cfg.rmse_threshold) {
            report.stop_reason = "threshold";
            break;
        }
    }
    report.final_loss = full_rmse;

    int correct = 0;
    for (int i = 0; i < n; ++i)
        if (ffn_select(model, set.trials[i]) == set.trials[i].correct_index) ++correct;
    report.baseline_accuracy = static_cast<double>(correct) / n;
    return {std::move(model), report};
}

int ffn_select(const FfnModel& model, const trials::Trial& trial) {
    const auto set = stimuli::build_stimulus_set();
    const auto input = trials::encode_onehot(trial, set);
    const auto out = model.forward(input);
    int best = 0;
    for (int k = 1; k < 3; ++k)
        if (out[k] > out[best]) best = k;
    return best;
}

// ---------------------------------------------------------------------------
// GPT / BERT
// ---------------------------------------------------------------------------

std::pair<transformer::TransformerNet, TrainReport> transformer_train(
    const transformer::TransformerConfig& cfg, const trials::TrialSet& set,
    std::uint64_t seed) {
    if (set.trials.empty()) throw std::invalid_argument("transformer_train: empty trial set");

    transformer::TransformerNet net(cfg);
    Prng root(seed);
    net.init_params(root);
    auto batch_rng = root.substream("transformer-batches");
    auto dropout_rng = root.substream("transformer-dropout");

    const int n = static_cast<int>(set.trials.size());
    const int seq_len = cfg.block_size + 1;
    std::vector<int> sequences(static_cast<std::size_t>(n) * seq_len);
    for (int i = 0; i < n; ++i) {
        const auto toks = trials::encode_tokens(set.trials[i]);
        std::copy(toks.begin(), toks.end(),
                  sequences.begin() + static_cast<std::size_t>(i) * seq_len);
    }

    numerics::AdamState adam(net.param_count(), cfg.lr);
    std::vector<double> grads(net.param_count());
    std::vector<int> batch(static_cast<std::size_t>(cfg.batch_size) * seq_len);

    TrainReport report;
    report.stop_reason = "max_iters";
    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        for (int b = 0; b < cfg.batch_size; ++b) {
            const int pick = static_cast<int>(batch_rng.below(n));
            std::copy_n(sequences.begin() + static_cast<std::size_t>(pick) * seq_len, seq_len,
                        batch.begin() + static_cast<std::size_t>(b) * seq_len);
        }
        std::fill(grads.begin(), grads.end(), 0.0);
        report.final_loss = net.loss_and_grad(batch, cfg.batch_size, grads,
                                              cfg.dropout > 0.0 ? &dropout_rng : nullptr);
        numerics::adam_step(net.params(), grads, adam);
        report.steps = iter + 1;
    }

    int correct = 0;
    for (int i = 0; i < n; ++i) {
        const auto outcome = transformer_select(net, set.trials[i]);
        if (outcome.comparison_index == set.trials[i].correct_index) ++correct;
    }
    report.baseline_accuracy = static_cast<double>(correct) / n;
    return {std::move(net), report};
}

SelectOutcome transformer_select(const transformer::TransformerNet& net,
                                 const trials::Trial& trial, bool restrict_to_responses) {
    const auto toks = trials::encode_tokens(trial);
    const std::array<int, 4> prompt = {toks[0], toks[1], toks[2], toks[3]};
    const auto logits = net.logits(prompt);
    const double* row = logits.row(logits.rows - 1);

    SelectOutcome outcome;
    if (restrict_to_responses) {
        int best = 0;
        for (int k = 1; k < 3; ++k)
            if (row[trials::kResponseTokenBase + k] > row[trials::kResponseTokenBase + best])
                best = k;
        outcome.emitted_token = trials::kResponseTokenBase + best;
        outcome.comparison_index = best;
        return outcome;
    }
    int best = 0;
    for (int v = 1; v < trials::kVocabSize; ++v)
        if (row[v] > row[best]) best = v;
    outcome.emitted_token = best;
    if (best >= trials::kResponseTokenBase)
        outcome.comparison_index = best - trials::kResponseTokenBase;
    return outcome;
}

}  // namespace eqsim::agents
