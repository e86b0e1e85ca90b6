#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "eqsim/numerics.hpp"

namespace eqsim::transformer {

struct TransformerConfig {
    int vocab_size = 51;
    int batch_size = 64;
    int block_size = 4;
    int max_iters = 2000;
    int eval_interval = 500;
    int eval_iters = 200;
    double lr = 3e-4;
    int n_embd = 64;
    int n_head = 2;
    int n_layer = 2;
    double dropout = 0.0;
    bool causal = true;  // true = GPT, false = BERT

    static TransformerConfig desk(bool causal_flag) {
        TransformerConfig c;
        c.causal = causal_flag;
        return c;
    }
    static TransformerConfig paper(bool causal_flag) {
        TransformerConfig c;
        c.n_embd = 384;
        c.n_head = 6;
        c.n_layer = 6;
        c.max_iters = 10000;
        c.dropout = 0.2;
        c.causal = causal_flag;
        return c;
    }
};

// Parameter views for one pre-norm block; pointers into the flat vector.
struct BlockWeights {
    const double* ln1_g;
    const double* ln1_b;
    const double* w_qkv;  // E x 3E
    const double* b_qkv;
    const double* w_o;    // E x E
    const double* b_o;
    const double* ln2_g;
    const double* ln2_b;
    const double* w_fc;   // E x 4E
    const double* b_fc;
    const double* w_proj; // 4E x E
    const double* b_proj;
    int n_embd;
    int n_head;
};

// One pre-norm transformer block: x + attn(LN1(x)), then x + mlp(LN2(x)).
// x is T x E, modified in place. If probs_out is non-null it receives the
// per-head attention matrices (n_head entries of T x T).
void attention_block_forward(numerics::Matrix2D& x, const BlockWeights& w, bool causal,
                             std::vector<numerics::Matrix2D>* probs_out = nullptr);

// Minimal decoder/encoder stack with learned positional embeddings, a final
// layer norm and a vocabulary head. All parameters live in one flat vector;
// loss_and_grad fills a matching flat gradient.
class TransformerNet {
public:
    explicit TransformerNet(const TransformerConfig& cfg);

    void init_params(numerics::Prng& rng);  // normal(0, 0.02), biases 0, LN gains 1

    const TransformerConfig& config() const { return cfg_; }
    std::span<double> params() { return params_; }
    std::span<const double> params() const { return params_; }
    std::size_t param_count() const { return params_.size(); }

    // Cross-entropy over all shifted positions: inputs tokens[0..T-1],
    // targets tokens[1..T]. Sequences are rows of `tokens`, each
    // block_size+1 long. Returns mean loss; accumulates into grads.
    // When cfg.dropout > 0 a dropout stream must be supplied.
    double loss_and_grad(std::span<const int> tokens, int n_seqs, std::span<double> grads,
                         numerics::Prng* dropout_rng = nullptr) const;

    // Forward without dropout; returns logits for every prompt position
    // (n_tokens x vocab).
    numerics::Matrix2D logits(std::span<const int> prompt) const;

    BlockWeights block_weights(int layer) const;

private:
    struct Offsets {
        std::size_t tok_emb, pos_emb;
        struct Block {
            std::size_t ln1_g, ln1_b, w_qkv, b_qkv, w_o, b_o;
            std::size_t ln2_g, ln2_b, w_fc, b_fc, w_proj, b_proj;
        };
        std::vector<Block> blocks;
        std::size_t lnf_g, lnf_b, w_head, b_head;
        std::size_t total;
    };

    TransformerConfig cfg_;
    Offsets off_;
    std::vector<double> params_;
};

}  // namespace eqsim::transformer
