// Elman recurrent count predictor (benchmark stand-in for an LSTM).
//
// Weight layout for hidden size H:
//   [ W_x (H) | W_h (H*H, row-major) | b_h (H) | w_o (H) | b_o (1) ]

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mudt/predictors.hpp"
#include "optim.hpp"

namespace mudt {

namespace {

struct Layout {
    std::size_t H;
    std::size_t wx() const { return 0; }
    std::size_t wh() const { return H; }
    std::size_t bh() const { return H + H * H; }
    std::size_t wo() const { return 2 * H + H * H; }
    std::size_t bo() const { return 3 * H + H * H; }
    std::size_t size() const { return bo() + 1; }
};

struct Sequences {
    std::vector<double> x;  // rows x window, standardised
    std::vector<double> k;
    std::vector<double> F;
    std::size_t window = 0;
};

Sequences sequences_from(const ExperienceStore& store, int window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    Sequences s;
    s.window = static_cast<std::size_t>(window);
    for (const auto& rec : store.records()) {
        const auto& counts = rec.simplified.counts;
        if (counts.size() < s.window) throw std::invalid_argument("experience window shorter than the requested T_w");
        const double F = static_cast<double>(rec.truth.size());
        if (F <= 0) throw std::invalid_argument("experience record has an empty truth mask");
        for (std::size_t i = counts.size() - s.window; i < counts.size(); ++i) s.x.push_back(counts[i] / F);
        s.k.push_back(static_cast<double>(std::count(rec.truth.begin(), rec.truth.end(), true)));
        s.F.push_back(F);
    }
    return s;
}

void standardize(std::vector<double>& x, double mean, double scale) {
    for (auto& v : x) v = (v - mean) / scale;
}

// Forward pass over one sequence; fills hidden states h[0..T] (h[0] = 0).
double forward(const std::vector<double>& w, const Layout& L, const double* x, std::size_t T,
               std::vector<double>& h) {
    const std::size_t H = L.H;
    h.assign((T + 1) * H, 0.0);
    for (std::size_t t = 0; t < T; ++t) {
        const double* prev = &h[t * H];
        double* cur = &h[(t + 1) * H];
        for (std::size_t i = 0; i < H; ++i) {
            double a = w[L.wx() + i] * x[t] + w[L.bh() + i];
            for (std::size_t j = 0; j < H; ++j) a += w[L.wh() + i * H + j] * prev[j];
            cur[i] = std::tanh(a);
        }
    }
    double u = w[L.bo()];
    for (std::size_t i = 0; i < H; ++i) u += w[L.wo() + i] * h[T * H + i];
    return detail::sigmoid(u);
}

double objective(const std::vector<double>& w, const Layout& L, const Sequences& data, std::vector<double>* grad) {
    const std::size_t H = L.H;
    const std::size_t T = data.window;
    if (grad) grad->assign(w.size(), 0.0);
    std::vector<double> h;
    std::vector<double> dh(H);
    std::vector<double> da(H);
    double loss = 0.0;

    for (std::size_t r = 0; r < data.k.size(); ++r) {
        const double* x = &data.x[r * T];
        const double c = forward(w, L, x, T, h);
        const double k = data.k[r];
        const double F = data.F[r];
        loss += k * (1.0 - c) * (1.0 - c) + (F - k) * c * c;
        if (!grad) continue;

        auto& g = *grad;
        const double du = 2.0 * (F * c - k) * c * (1.0 - c);
        g[L.bo()] += du;
        for (std::size_t i = 0; i < H; ++i) {
            g[L.wo() + i] += du * h[T * H + i];
            dh[i] = du * w[L.wo() + i];
        }
        for (std::size_t t = T; t-- > 0;) {
            const double* cur = &h[(t + 1) * H];
            const double* prev = &h[t * H];
            for (std::size_t i = 0; i < H; ++i) da[i] = dh[i] * (1.0 - cur[i] * cur[i]);
            for (std::size_t i = 0; i < H; ++i) {
                g[L.wx() + i] += da[i] * x[t];
                g[L.bh() + i] += da[i];
                for (std::size_t j = 0; j < H; ++j) g[L.wh() + i * H + j] += da[i] * prev[j];
            }
            for (std::size_t j = 0; j < H; ++j) {
                double s = 0.0;
                for (std::size_t i = 0; i < H; ++i) s += w[L.wh() + i * H + j] * da[i];
                dh[j] = s;
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(data.k.size());
    if (grad)
        for (auto& v : *grad) v *= inv;
    return loss * inv;
}

void require_recurrent(const ModelParams& p) {
    if (!p.fitted()) throw std::invalid_argument("model parameters are not fitted");
    if (p.kind != ModelKind::recurrent) throw std::invalid_argument("model parameters are for a different model kind");
    if (p.hidden < 1 || p.window < 1 || p.weights.size() != Layout{static_cast<std::size_t>(p.hidden)}.size() ||
        p.feature_mean.size() != 1)
        throw std::invalid_argument("recurrent parameters have an inconsistent shape");
}

Sequences prepared(const ModelParams& p, const ExperienceStore& store) {
    auto data = sequences_from(store, p.window);
    standardize(data.x, p.feature_mean[0], p.feature_scale[0]);
    return data;
}

}  // namespace

FitResult fit_recurrent(const ExperienceStore& store, int window, const TrainOptions& opts,
                        const ModelParams* warm_start) {
    if (store.empty()) throw std::invalid_argument("cannot fit on an empty experience store");
    if (opts.hidden < 1) throw std::invalid_argument("recurrent hidden size must be >= 1");
    auto data = sequences_from(store, window);

    ModelParams p;
    if (warm_start && warm_start->fitted() && warm_start->window == window) {
        require_recurrent(*warm_start);
        p = *warm_start;
    } else {
        p.kind = ModelKind::recurrent;
        p.window = window;
        p.hidden = opts.hidden;
        double mean = 0.0;
        for (double v : data.x) mean += v;
        mean /= static_cast<double>(data.x.size());
        double var = 0.0;
        for (double v : data.x) var += (v - mean) * (v - mean);
        const double sd = std::sqrt(var / static_cast<double>(data.x.size()));
        p.feature_mean = {mean};
        p.feature_scale = {sd > 1e-9 ? sd : 1.0};
        p.weights = detail::random_init(Layout{static_cast<std::size_t>(opts.hidden)}.size(), opts.seed, 0.3);
    }
    standardize(data.x, p.feature_mean[0], p.feature_scale[0]);

    const Layout L{static_cast<std::size_t>(p.hidden)};
    auto fn = [&](const std::vector<double>& w, std::vector<double>& g) { return objective(w, L, data, &g); };
    const auto r = detail::adam_minimize(p.weights, fn, opts.epochs, opts.lr);
    return {std::move(p), r.initial_loss, r.best_loss};
}

double recurrent_baseline_predict(std::span<const int> history, int frames_per_slot, const ModelParams& params) {
    require_recurrent(params);
    if (frames_per_slot <= 0) throw std::invalid_argument("frames_per_slot must be positive");
    const auto s = make_simplified_state(history, params.window, frames_per_slot);
    std::vector<double> x(s.counts.begin(), s.counts.end());
    for (auto& v : x) v /= frames_per_slot;
    standardize(x, params.feature_mean[0], params.feature_scale[0]);
    std::vector<double> h;
    const Layout L{static_cast<std::size_t>(params.hidden)};
    return frames_per_slot * forward(params.weights, L, x.data(), x.size(), h);
}

double recurrent_loss(const ModelParams& params, const ExperienceStore& store) {
    require_recurrent(params);
    return objective(params.weights, Layout{static_cast<std::size_t>(params.hidden)}, prepared(params, store), nullptr);
}

std::vector<double> recurrent_loss_gradient(const ModelParams& params, const ExperienceStore& store) {
    require_recurrent(params);
    std::vector<double> g;
    objective(params.weights, Layout{static_cast<std::size_t>(params.hidden)}, prepared(params, store), &g);
    return g;
}

}  // namespace mudt
