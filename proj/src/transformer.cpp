#include "eqsim/transformer.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace eqsim::transformer {

using numerics::Matrix2D;

namespace {

void layernorm_fwd(int rows, int n, const double* x, const double* g, const double* b,
                   double* out, double* mean, double* rstd) {
    for (int r = 0; r < rows; ++r) {
        const double* xr = x + static_cast<std::size_t>(r) * n;
        double* yr = out + static_cast<std::size_t>(r) * n;
        double mu = 0.0;
        for (int i = 0; i < n; ++i) mu += xr[i];
        mu /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) var += (xr[i] - mu) * (xr[i] - mu);
        var /= n;
        const double rs = 1.0 / std::sqrt(var + 1e-5);
        mean[r] = mu;
        rstd[r] = rs;
        for (int i = 0; i < n; ++i) yr[i] = g[i] * (xr[i] - mu) * rs + b[i];
    }
}

// Accumulates dx into dx_acc; dg/db accumulate parameter grads.
void layernorm_bwd(int rows, int n, const double* x, const double* mean, const double* rstd,
                   const double* g, const double* dout, double* dx_acc, double* dg,
                   double* db) {
    for (int r = 0; r < rows; ++r) {
        const double* xr = x + static_cast<std::size_t>(r) * n;
        const double* dyr = dout + static_cast<std::size_t>(r) * n;
        double* dxr = dx_acc + static_cast<std::size_t>(r) * n;
        const double mu = mean[r], rs = rstd[r];
        double sum_dxhat = 0.0, sum_dxhat_xhat = 0.0;
        for (int i = 0; i < n; ++i) {
            const double xhat = (xr[i] - mu) * rs;
            const double dxhat = dyr[i] * g[i];
            sum_dxhat += dxhat;
            sum_dxhat_xhat += dxhat * xhat;
            dg[i] += dyr[i] * xhat;
            db[i] += dyr[i];
        }
        const double inv_n = 1.0 / n;
        for (int i = 0; i < n; ++i) {
            const double xhat = (xr[i] - mu) * rs;
            const double dxhat = dyr[i] * g[i];
            dxr[i] += rs * (dxhat - inv_n * sum_dxhat - xhat * inv_n * sum_dxhat_xhat);
        }
    }
}

void add_bias_rows(double* x, const double* b, int rows, int n) {
    for (int r = 0; r < rows; ++r) {
        double* xr = x + static_cast<std::size_t>(r) * n;
        for (int i = 0; i < n; ++i) xr[i] += b[i];
    }
}

void colsum_acc(const double* x, double* out, int rows, int n) {
    for (int r = 0; r < rows; ++r) {
        const double* xr = x + static_cast<std::size_t>(r) * n;
        for (int i = 0; i < n; ++i) out[i] += xr[i];
    }
}

}  // namespace

void attention_block_forward(Matrix2D& x, const BlockWeights& w, bool causal,
                             std::vector<Matrix2D>* probs_out) {
    const int T = x.rows, E = x.cols, H = w.n_head;
    if (E != w.n_embd) throw std::invalid_argument("attention block: embedding size mismatch");
    if (E % H != 0) throw std::invalid_argument("attention block: n_embd not divisible by heads");
    const int hd = E / H, F = 4 * E;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));

    std::vector<double> mean(T), rstd(T), ln(static_cast<std::size_t>(T) * E);
    layernorm_fwd(T, E, x.data.data(), w.ln1_g, w.ln1_b, ln.data(), mean.data(), rstd.data());

    std::vector<double> qkv(static_cast<std::size_t>(T) * 3 * E, 0.0);
    numerics::matmul_acc(ln.data(), w.w_qkv, qkv.data(), T, E, 3 * E);
    add_bias_rows(qkv.data(), w.b_qkv, T, 3 * E);

    if (probs_out) probs_out->assign(H, Matrix2D(T, T));
    std::vector<double> att(static_cast<std::size_t>(T) * E, 0.0);
    std::vector<double> score(T);
    for (int h = 0; h < H; ++h) {
        for (int t = 0; t < T; ++t) {
            const double* q = qkv.data() + static_cast<std::size_t>(t) * 3 * E + h * hd;
            for (int u = 0; u < T; ++u) {
                if (causal && u > t) {
                    score[u] = -1e30;
                    continue;
                }
                const double* k = qkv.data() + static_cast<std::size_t>(u) * 3 * E + E + h * hd;
                double s = 0.0;
                for (int d = 0; d < hd; ++d) s += q[d] * k[d];
                score[u] = s * scale;
            }
            numerics::softmax_row(score.data(), T);
            if (causal)
                for (int u = t + 1; u < T; ++u) score[u] = 0.0;
            if (probs_out)
                for (int u = 0; u < T; ++u) (*probs_out)[h].at(t, u) = score[u];
            double* o = att.data() + static_cast<std::size_t>(t) * E + h * hd;
            for (int u = 0; u < T; ++u) {
                const double p = score[u];
                if (p == 0.0) continue;
                const double* v = qkv.data() + static_cast<std::size_t>(u) * 3 * E + 2 * E + h * hd;
                for (int d = 0; d < hd; ++d) o[d] += p * v[d];
            }
        }
    }

    std::vector<double> proj(static_cast<std::size_t>(T) * E, 0.0);
    numerics::matmul_acc(att.data(), w.w_o, proj.data(), T, E, E);
    add_bias_rows(proj.data(), w.b_o, T, E);
    for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += proj[i];

    layernorm_fwd(T, E, x.data.data(), w.ln2_g, w.ln2_b, ln.data(), mean.data(), rstd.data());
    std::vector<double> fc(static_cast<std::size_t>(T) * F, 0.0);
    numerics::matmul_acc(ln.data(), w.w_fc, fc.data(), T, E, F);
    add_bias_rows(fc.data(), w.b_fc, T, F);
    for (auto& v : fc) v = numerics::gelu(v);
    std::vector<double> mlp(static_cast<std::size_t>(T) * E, 0.0);
    numerics::matmul_acc(fc.data(), w.w_proj, mlp.data(), T, F, E);
    add_bias_rows(mlp.data(), w.b_proj, T, E);
    for (std::size_t i = 0; i < x.data.size(); ++i) x.data[i] += mlp[i];
}

TransformerNet::TransformerNet(const TransformerConfig& cfg) : cfg_(cfg) {
    if (cfg.n_embd % cfg.n_head != 0)
        throw std::invalid_argument("n_embd must be divisible by n_head");
    const std::size_t V = cfg.vocab_size, T = cfg.block_size, E = cfg.n_embd;
    const std::size_t F = 4 * E;
    std::size_t p = 0;
    off_.tok_emb = p; p += V * E;
    off_.pos_emb = p; p += T * E;
    off_.blocks.resize(cfg.n_layer);
    for (auto& b : off_.blocks) {
        b.ln1_g = p; p += E;
        b.ln1_b = p; p += E;
        b.w_qkv = p; p += E * 3 * E;
        b.b_qkv = p; p += 3 * E;
        b.w_o = p; p += E * E;
        b.b_o = p; p += E;
        b.ln2_g = p; p += E;
        b.ln2_b = p; p += E;
        b.w_fc = p; p += E * F;
        b.b_fc = p; p += F;
        b.w_proj = p; p += F * E;
        b.b_proj = p; p += E;
    }
    off_.lnf_g = p; p += E;
    off_.lnf_b = p; p += E;
    off_.w_head = p; p += E * V;
    off_.b_head = p; p += V;
    off_.total = p;
    params_.assign(p, 0.0);
}

void TransformerNet::init_params(numerics::Prng& rng) {
    auto stream = rng.substream("transformer-init");
    const std::size_t E = cfg_.n_embd;
    auto fill_normal = [&](std::size_t begin, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) params_[begin + i] = stream.normal(0.0, 0.02);
    };
    auto fill_ones = [&](std::size_t begin, std::size_t count) {
        for (std::size_t i = 0; i < count; ++i) params_[begin + i] = 1.0;
    };
    fill_normal(off_.tok_emb, static_cast<std::size_t>(cfg_.vocab_size) * E);
    fill_normal(off_.pos_emb, static_cast<std::size_t>(cfg_.block_size) * E);
    for (const auto& b : off_.blocks) {
        fill_ones(b.ln1_g, E);
        fill_normal(b.w_qkv, E * 3 * E);
        fill_normal(b.w_o, E * E);
        fill_ones(b.ln2_g, E);
        fill_normal(b.w_fc, E * 4 * E);
        fill_normal(b.w_proj, 4 * E * E);
    }
    fill_ones(off_.lnf_g, E);
    fill_normal(off_.w_head, E * static_cast<std::size_t>(cfg_.vocab_size));
}

BlockWeights TransformerNet::block_weights(int layer) const {
    const auto& b = off_.blocks.at(layer);
    const double* p = params_.data();
    return BlockWeights{p + b.ln1_g, p + b.ln1_b, p + b.w_qkv, p + b.b_qkv,
                        p + b.w_o,   p + b.b_o,   p + b.ln2_g, p + b.ln2_b,
                        p + b.w_fc,  p + b.b_fc,  p + b.w_proj, p + b.b_proj,
                        cfg_.n_embd, cfg_.n_head};
}

numerics::Matrix2D TransformerNet::logits(std::span<const int> prompt) const {
    const int T = static_cast<int>(prompt.size());
    if (T < 1 || T > cfg_.block_size) throw std::invalid_argument("prompt length out of range");
    const int E = cfg_.n_embd, V = cfg_.vocab_size;
    Matrix2D x(T, E);
    for (int t = 0; t < T; ++t) {
        const int tok = prompt[t];
        if (tok < 0 || tok >= V) throw std::invalid_argument("token id out of range");
        for (int i = 0; i < E; ++i)
            x.at(t, i) = params_[off_.tok_emb + static_cast<std::size_t>(tok) * E + i] +
                         params_[off_.pos_emb + static_cast<std::size_t>(t) * E + i];
    }
    for (int l = 0; l < cfg_.n_layer; ++l)
        attention_block_forward(x, block_weights(l), cfg_.causal);

    std::vector<double> mean(T), rstd(T), ln(static_cast<std::size_t>(T) * E);
    layernorm_fwd(T, E, x.data.data(), params_.data() + off_.lnf_g, params_.data() + off_.lnf_b,
                  ln.data(), mean.data(), rstd.data());
    Matrix2D out(T, V);
    numerics::matmul_acc(ln.data(), params_.data() + off_.w_head, out.data.data(), T, E, V);
    add_bias_rows(out.data.data(), params_.data() + off_.b_head, T, V);
    return out;
}

double TransformerNet::loss_and_grad(std::span<const int> tokens, int n_seqs,
                                     std::span<double> grads,
                                     numerics::Prng* dropout_rng) const {
    const int T = cfg_.block_size, E = cfg_.n_embd, H = cfg_.n_head;
    const int hd = E / H, F = 4 * E, V = cfg_.vocab_size;
    const int rows = n_seqs * T;
    const double scale = 1.0 / std::sqrt(static_cast<double>(hd));
    const double drop = cfg_.dropout;
    if (grads.size() != params_.size())
        throw std::invalid_argument("loss_and_grad: gradient size mismatch");
    if (tokens.size() != static_cast<std::size_t>(n_seqs) * (T + 1))
        throw std::invalid_argument("loss_and_grad: token buffer must be n_seqs x (block+1)");
    if (drop > 0.0 && dropout_rng == nullptr)
        throw std::invalid_argument("loss_and_grad: dropout requires a PRNG");

    const auto nrows = static_cast<std::size_t>(rows);
    auto make_mask = [&](std::vector<double>& mask, std::size_t n) {
        mask.resize(n);
        const double keep = 1.0 / (1.0 - drop);
        for (auto& m : mask) m = dropout_rng->uniform() < drop ? 0.0 : keep;
    };

    struct LayerCache {
        std::vector<double> x_in, ln1_out, ln1_mean, ln1_rstd, qkv, probs, att_out;
        std::vector<double> x_mid, ln2_out, ln2_mean, ln2_rstd, fc, gelu_out;
        std::vector<double> drop_probs, drop_attn, drop_mlp;
    };
    std::vector<LayerCache> cache(cfg_.n_layer);

    // ---- forward ----
    std::vector<double> x(nrows * E);
    std::vector<double> drop_emb;
    for (int s = 0; s < n_seqs; ++s) {
        for (int t = 0; t < T; ++t) {
            const int tok = tokens[static_cast<std::size_t>(s) * (T + 1) + t];
            if (tok < 0 || tok >= V) throw std::invalid_argument("token id out of range");
            double* xr = x.data() + (static_cast<std::size_t>(s) * T + t) * E;
            const double* te = params_.data() + off_.tok_emb + static_cast<std::size_t>(tok) * E;
            const double* pe = params_.data() + off_.pos_emb + static_cast<std::size_t>(t) * E;
            for (int i = 0; i < E; ++i) xr[i] = te[i] + pe[i];
        }
    }
    if (drop > 0.0) {
        make_mask(drop_emb, nrows * E);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] *= drop_emb[i];
    }

    for (int l = 0; l < cfg_.n_layer; ++l) {
        auto& c = cache[l];
        const auto& b = off_.blocks[l];
        const double* p = params_.data();
        c.x_in = x;
        c.ln1_out.resize(nrows * E);
        c.ln1_mean.resize(nrows);
        c.ln1_rstd.resize(nrows);
        layernorm_fwd(rows, E, c.x_in.data(), p + b.ln1_g, p + b.ln1_b, c.ln1_out.data(),
                      c.ln1_mean.data(), c.ln1_rstd.data());
        c.qkv.assign(nrows * 3 * E, 0.0);
        numerics::matmul_acc(c.ln1_out.data(), p + b.w_qkv, c.qkv.data(), rows, E, 3 * E);
        add_bias_rows(c.qkv.data(), p + b.b_qkv, rows, 3 * E);

        c.probs.assign(static_cast<std::size_t>(n_seqs) * H * T * T, 0.0);
        if (drop > 0.0) make_mask(c.drop_probs, c.probs.size());
        c.att_out.assign(nrows * E, 0.0);
        std::vector<double> score(T);
        for (int s = 0; s < n_seqs; ++s) {
            const std::size_t base = static_cast<std::size_t>(s) * T;
            for (int h = 0; h < H; ++h) {
                double* pr = c.probs.data() + ((static_cast<std::size_t>(s) * H + h) * T) * T;
                const double* dm =
                    drop > 0.0 ? c.drop_probs.data() + ((static_cast<std::size_t>(s) * H + h) * T) * T
                               : nullptr;
                for (int t = 0; t < T; ++t) {
                    const double* q = c.qkv.data() + (base + t) * 3 * E + h * hd;
                    for (int u = 0; u < T; ++u) {
                        if (cfg_.causal && u > t) {
                            score[u] = -1e30;
                            continue;
                        }
                        const double* k = c.qkv.data() + (base + u) * 3 * E + E + h * hd;
                        double sum = 0.0;
                        for (int d = 0; d < hd; ++d) sum += q[d] * k[d];
                        score[u] = sum * scale;
                    }
                    numerics::softmax_row(score.data(), T);
                    if (cfg_.causal)
                        for (int u = t + 1; u < T; ++u) score[u] = 0.0;
                    for (int u = 0; u < T; ++u) pr[t * T + u] = score[u];
                    double* o = c.att_out.data() + (base + t) * E + h * hd;
                    for (int u = 0; u < T; ++u) {
                        double pw = score[u];
                        if (dm) pw *= dm[t * T + u];
                        if (pw == 0.0) continue;
                        const double* v = c.qkv.data() + (base + u) * 3 * E + 2 * E + h * hd;
                        for (int d = 0; d < hd; ++d) o[d] += pw * v[d];
                    }
                }
            }
        }

        std::vector<double> proj(nrows * E, 0.0);
        numerics::matmul_acc(c.att_out.data(), p + b.w_o, proj.data(), rows, E, E);
        add_bias_rows(proj.data(), p + b.b_o, rows, E);
        if (drop > 0.0) {
            make_mask(c.drop_attn, proj.size());
            for (std::size_t i = 0; i < proj.size(); ++i) proj[i] *= c.drop_attn[i];
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = c.x_in[i] + proj[i];
        c.x_mid = x;

        c.ln2_out.resize(nrows * E);
        c.ln2_mean.resize(nrows);
        c.ln2_rstd.resize(nrows);
        layernorm_fwd(rows, E, c.x_mid.data(), p + b.ln2_g, p + b.ln2_b, c.ln2_out.data(),
                      c.ln2_mean.data(), c.ln2_rstd.data());
        c.fc.assign(nrows * F, 0.0);
        numerics::matmul_acc(c.ln2_out.data(), p + b.w_fc, c.fc.data(), rows, E, F);
        add_bias_rows(c.fc.data(), p + b.b_fc, rows, F);
        c.gelu_out.resize(nrows * F);
        for (std::size_t i = 0; i < c.fc.size(); ++i) c.gelu_out[i] = numerics::gelu(c.fc[i]);
        std::vector<double> mlp(nrows * E, 0.0);
        numerics::matmul_acc(c.gelu_out.data(), p + b.w_proj, mlp.data(), rows, F, E);
        add_bias_rows(mlp.data(), p + b.b_proj, rows, E);
        if (drop > 0.0) {
            make_mask(c.drop_mlp, mlp.size());
            for (std::size_t i = 0; i < mlp.size(); ++i) mlp[i] *= c.drop_mlp[i];
        }
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = c.x_mid[i] + mlp[i];
    }

    std::vector<double> lnf_out(nrows * E), lnf_mean(nrows), lnf_rstd(nrows);
    layernorm_fwd(rows, E, x.data(), params_.data() + off_.lnf_g, params_.data() + off_.lnf_b,
                  lnf_out.data(), lnf_mean.data(), lnf_rstd.data());
    std::vector<double> logit_probs(nrows * static_cast<std::size_t>(V), 0.0);
    numerics::matmul_acc(lnf_out.data(), params_.data() + off_.w_head, logit_probs.data(), rows,
                         E, V);
    add_bias_rows(logit_probs.data(), params_.data() + off_.b_head, rows, V);

    double loss = 0.0;
    for (int s = 0; s < n_seqs; ++s) {
        for (int t = 0; t < T; ++t) {
            double* row = logit_probs.data() + (static_cast<std::size_t>(s) * T + t) * V;
            numerics::softmax_row(row, V);
            const int target = tokens[static_cast<std::size_t>(s) * (T + 1) + t + 1];
            if (target < 0 || target >= V) throw std::invalid_argument("target out of range");
            loss -= std::log(std::max(row[target], 1e-300));
        }
    }
    loss /= rows;
    if (!std::isfinite(loss)) throw std::runtime_error("transformer loss is non-finite");

    // ---- backward ----
    double* g = grads.data();
    std::vector<double>& dlogits = logit_probs;  // reuse: probs -> dlogits
    const double inv_rows = 1.0 / rows;
    for (int s = 0; s < n_seqs; ++s)
        for (int t = 0; t < T; ++t) {
            double* row = dlogits.data() + (static_cast<std::size_t>(s) * T + t) * V;
            const int target = tokens[static_cast<std::size_t>(s) * (T + 1) + t + 1];
            for (int v = 0; v < V; ++v) row[v] *= inv_rows;
            row[target] -= inv_rows;
        }

    numerics::matmul_at_acc(lnf_out.data(), dlogits.data(), g + off_.w_head, E, rows, V);
    colsum_acc(dlogits.data(), g + off_.b_head, rows, V);
    std::vector<double> dln(nrows * E, 0.0);
    numerics::matmul_bt_acc(dlogits.data(), params_.data() + off_.w_head, dln.data(), rows, V, E);
    std::vector<double> dx(nrows * E, 0.0);
    layernorm_bwd(rows, E, x.data(), lnf_mean.data(), lnf_rstd.data(),
                  params_.data() + off_.lnf_g, dln.data(), dx.data(), g + off_.lnf_g,
                  g + off_.lnf_b);

    std::vector<double> dmid(nrows * E), dqkv(nrows * 3 * E), datt(nrows * E);
    for (int l = cfg_.n_layer - 1; l >= 0; --l) {
        const auto& c = cache[l];
        const auto& b = off_.blocks[l];
        const double* p = params_.data();

        // MLP branch: dx is dL/d(x_out); residual passes it to x_mid as well.
        std::vector<double> dmlp = dx;
        if (drop > 0.0)
            for (std::size_t i = 0; i < dmlp.size(); ++i) dmlp[i] *= c.drop_mlp[i];
        numerics::matmul_at_acc(c.gelu_out.data(), dmlp.data(), g + b.w_proj, F, rows, E);
        colsum_acc(dmlp.data(), g + b.b_proj, rows, E);
        std::vector<double> dfc(nrows * F, 0.0);
        numerics::matmul_bt_acc(dmlp.data(), p + b.w_proj, dfc.data(), rows, E, F);
        for (std::size_t i = 0; i < dfc.size(); ++i) dfc[i] *= numerics::gelu_grad(c.fc[i]);
        numerics::matmul_at_acc(c.ln2_out.data(), dfc.data(), g + b.w_fc, E, rows, F);
        colsum_acc(dfc.data(), g + b.b_fc, rows, F);
        dln.assign(nrows * E, 0.0);
        numerics::matmul_bt_acc(dfc.data(), p + b.w_fc, dln.data(), rows, F, E);
        layernorm_bwd(rows, E, c.x_mid.data(), c.ln2_mean.data(), c.ln2_rstd.data(),
                      p + b.ln2_g, dln.data(), dx.data(), g + b.ln2_g, g + b.ln2_b);
        dmid = dx;  // dL/d(x_mid)

        // Attention branch.
        std::vector<double> dproj = dmid;
        if (drop > 0.0)
            for (std::size_t i = 0; i < dproj.size(); ++i) dproj[i] *= c.drop_attn[i];
        numerics::matmul_at_acc(c.att_out.data(), dproj.data(), g + b.w_o, E, rows, E);
        colsum_acc(dproj.data(), g + b.b_o, rows, E);
        datt.assign(nrows * E, 0.0);
        numerics::matmul_bt_acc(dproj.data(), p + b.w_o, datt.data(), rows, E, E);

        dqkv.assign(nrows * 3 * E, 0.0);
        std::vector<double> dp(T), ds(T);
        for (int s = 0; s < n_seqs; ++s) {
            const std::size_t base = static_cast<std::size_t>(s) * T;
            for (int h = 0; h < H; ++h) {
                const double* pr = c.probs.data() + ((static_cast<std::size_t>(s) * H + h) * T) * T;
                const double* dm =
                    drop > 0.0 ? c.drop_probs.data() + ((static_cast<std::size_t>(s) * H + h) * T) * T
                               : nullptr;
                for (int t = 0; t < T; ++t) {
                    const double* dat = datt.data() + (base + t) * E + h * hd;
                    // dV and dP
                    for (int u = 0; u < T; ++u) {
                        const double* v = c.qkv.data() + (base + u) * 3 * E + 2 * E + h * hd;
                        double s_dp = 0.0;
                        for (int d = 0; d < hd; ++d) s_dp += dat[d] * v[d];
                        const double mask = dm ? dm[t * T + u] : 1.0;
                        dp[u] = s_dp * mask;
                        double* dv = dqkv.data() + (base + u) * 3 * E + 2 * E + h * hd;
                        const double pw = pr[t * T + u] * mask;
                        if (pw != 0.0)
                            for (int d = 0; d < hd; ++d) dv[d] += pw * dat[d];
                    }
                    // softmax backward
                    double dot = 0.0;
                    for (int u = 0; u < T; ++u) dot += dp[u] * pr[t * T + u];
                    for (int u = 0; u < T; ++u) ds[u] = pr[t * T + u] * (dp[u] - dot);
                    // dQ and dK
                    double* dq = dqkv.data() + (base + t) * 3 * E + h * hd;
                    const double* q = c.qkv.data() + (base + t) * 3 * E + h * hd;
                    for (int u = 0; u < T; ++u) {
                        if (ds[u] == 0.0) continue;
                        const double w = ds[u] * scale;
                        const double* k = c.qkv.data() + (base + u) * 3 * E + E + h * hd;
                        double* dk = dqkv.data() + (base + u) * 3 * E + E + h * hd;
                        for (int d = 0; d < hd; ++d) {
                            dq[d] += w * k[d];
                            dk[d] += w * q[d];
                        }
                    }
                }
            }
        }
        numerics::matmul_at_acc(c.ln1_out.data(), dqkv.data(), g + b.w_qkv, E, rows, 3 * E);
        colsum_acc(dqkv.data(), g + b.b_qkv, rows, 3 * E);
        dln.assign(nrows * E, 0.0);
        numerics::matmul_bt_acc(dqkv.data(), p + b.w_qkv, dln.data(), rows, 3 * E, E);
        dx = dmid;
        layernorm_bwd(rows, E, c.x_in.data(), c.ln1_mean.data(), c.ln1_rstd.data(), p + b.ln1_g,
                      dln.data(), dx.data(), g + b.ln1_g, g + b.ln1_b);
    }

    if (drop > 0.0)
        for (std::size_t i = 0; i < dx.size(); ++i) dx[i] *= drop_emb[i];
    for (int s = 0; s < n_seqs; ++s)
        for (int t = 0; t < T; ++t) {
            const int tok = tokens[static_cast<std::size_t>(s) * (T + 1) + t];
            const double* dxr = dx.data() + (static_cast<std::size_t>(s) * T + t) * E;
            double* gt = g + off_.tok_emb + static_cast<std::size_t>(tok) * E;
            double* gp = g + off_.pos_emb + static_cast<std::size_t>(t) * E;
            for (int i = 0; i < E; ++i) {
                gt[i] += dxr[i];
                gp[i] += dxr[i];
            }
        }
    return loss;
}

}  // namespace eqsim::transformer
