#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eqsim::numerics {

// ---------------------------------------------------------------------------
// Counter-based splittable PRNG. A stream is (key, counter); substreams derive
// a fresh key from the parent key and a name, so draws from one substream
// never perturb another.
// ---------------------------------------------------------------------------
class Prng {
public:
    explicit Prng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    Prng substream(std::string_view name) const {
        std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (unsigned char c : name) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        Prng child(0);
        child.key_ = mix(key_ ^ mix(h));
        child.counter_ = 0;
        return child;
    }

    std::uint64_t next_u64() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

    // uniform in [0, 1)
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform integer in [0, n)
    std::uint64_t below(std::uint64_t n) {
        if (n == 0) throw std::invalid_argument("Prng::below(0)");
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do { x = next_u64(); } while (x >= limit);
        return x % n;
    }

    double normal(double mean, double sd) {
        // Box-Muller; consumes two uniforms per draw, no caching.
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(6.283185307179586 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    // k distinct indices from [0, n), order of draw preserved.
    std::vector<int> choice_without_replacement(int n, int k);

private:
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// ---------------------------------------------------------------------------
// Dense row-major matrix of doubles.
// ---------------------------------------------------------------------------
struct Matrix2D {
    int rows = 0;
    int cols = 0;
    std::vector<double> data;

    Matrix2D() = default;
    Matrix2D(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
    double* row(int r) { return data.data() + static_cast<std::size_t>(r) * cols; }
    const double* row(int r) const { return data.data() + static_cast<std::size_t>(r) * cols; }
};

// C[m x n] += A[m x k] * B[k x n]
void matmul_acc(const double* a, const double* b, double* c, int m, int k, int n);
// C[m x n] += A^T[m x k] * B[k x n], A stored k x m
void matmul_at_acc(const double* a, const double* b, double* c, int m, int k, int n);
// C[m x n] += A[m x k] * B^T[k x n], B stored n x k
void matmul_bt_acc(const double* a, const double* b, double* c, int m, int k, int n);

// ---------------------------------------------------------------------------
// Activations and losses.
// ---------------------------------------------------------------------------
inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * 0.7071067811865476)); }
inline double gelu_grad(double x) {
    const double cdf = 0.5 * (1.0 + std::erf(x * 0.7071067811865476));
    const double pdf = std::exp(-0.5 * x * x) * 0.3989422804014327;
    return cdf + x * pdf;
}

// In-place softmax over a contiguous row.
void softmax_row(double* x, int n);

double mse(std::span<const double> pred, std::span<const double> target);

// ---------------------------------------------------------------------------
// Adam with bias correction.
// ---------------------------------------------------------------------------
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t t = 0;
    double lr = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    explicit AdamState(std::size_t n, double learning_rate)
        : m(n, 0.0), v(n, 0.0), lr(learning_rate) {}
};

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

// ---------------------------------------------------------------------------
// Finite-difference gradient checker. loss_and_grad fills the full analytic
// gradient and returns the loss; n_coords random coordinates are compared
// against central differences. Returns the max relative error.
// ---------------------------------------------------------------------------
using LossGradFn = std::function<double(std::span<const double>, std::span<double>)>;

double grad_check(const LossGradFn& loss_and_grad, std::span<double> params, int n_coords,
                  Prng& rng, double h = 1e-5);

}  // namespace eqsim::numerics
