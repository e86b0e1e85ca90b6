#include "eqsim/numerics.hpp"

#include <algorithm>

namespace eqsim::numerics {

std::vector<int> Prng::choice_without_replacement(int n, int k) {
    if (k > n) throw std::invalid_argument("choice_without_replacement: k > n");
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    std::vector<int> out;
    out.reserve(k);
    for (int i = 0; i < k; ++i) {
        const int j = static_cast<int>(below(static_cast<std::uint64_t>(n - i)));
        out.push_back(pool[j]);
        std::swap(pool[j], pool[n - i - 1]);
    }
    return out;
}

void matmul_acc(const double* a, const double* b, double* c, int m, int k, int n) {
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const double av = ai[p];
            if (av == 0.0) continue;
            const double* bp = b + static_cast<std::size_t>(p) * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_at_acc(const double* a, const double* b, double* c, int m, int k, int n) {
    // a is k x m
    for (int p = 0; p < k; ++p) {
        const double* ap = a + static_cast<std::size_t>(p) * m;
        const double* bp = b + static_cast<std::size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const double av = ap[i];
            if (av == 0.0) continue;
            double* ci = c + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) ci[j] += av * bp[j];
        }
    }
}

void matmul_bt_acc(const double* a, const double* b, double* c, int m, int k, int n) {
    // b is n x k
    for (int i = 0; i < m; ++i) {
        const double* ai = a + static_cast<std::size_t>(i) * k;
        double* ci = c + static_cast<std::size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* bj = b + static_cast<std::size_t>(j) * k;
            double s = 0.0;
            for (int p = 0; p < k; ++p) s += ai[p] * bj[p];
            ci[j] += s;
        }
    }
}

void softmax_row(double* x, int n) {
    double mx = x[0];
    for (int i = 1; i < n; ++i) mx = std::max(mx, x[i]);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        x[i] = std::exp(x[i] - mx);
        sum += x[i];
    }
    const double inv = 1.0 / sum;
    for (int i = 0; i < n; ++i) x[i] *= inv;
}

double mse(std::span<const double> pred, std::span<const double> target) {
    if (pred.size() != target.size()) throw std::invalid_argument("mse: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const double d = pred[i] - target[i];
        s += d * d;
    }
    return s / static_cast<double>(pred.size());
}

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size() || params.size() != state.m.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    state.t += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
        const double mhat = state.m[i] / bc1;
        const double vhat = state.v[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

double grad_check(const LossGradFn& loss_and_grad, std::span<double> params, int n_coords,
                  Prng& rng, double h) {
    std::vector<double> analytic(params.size(), 0.0);
    const double loss0 = loss_and_grad(params, analytic);
    if (!std::isfinite(loss0)) throw std::runtime_error("grad_check: non-finite loss");

    std::vector<double> scratch(params.size(), 0.0);
    double max_rel = 0.0;
    const int n = std::min<int>(n_coords, static_cast<int>(params.size()));
    const auto coords =
        rng.choice_without_replacement(static_cast<int>(params.size()), n);
    for (int idx : coords) {
        const double saved = params[idx];
        params[idx] = saved + h;
        const double lp = loss_and_grad(params, scratch);
        params[idx] = saved - h;
        const double lm = loss_and_grad(params, scratch);
        params[idx] = saved;
        if (!std::isfinite(lp) || !std::isfinite(lm))
            throw std::runtime_error("grad_check: non-finite loss");
        const double numeric = (lp - lm) / (2.0 * h);
        const double denom = std::max(std::abs(numeric), std::abs(analytic[idx]));
        const double err = denom < 1e-8 ? std::abs(numeric - analytic[idx])
                                        : std::abs(numeric - analytic[idx]) / denom;
        max_rel = std::max(max_rel, err);
    }
    return max_rel;
}

}  // namespace eqsim::numerics
