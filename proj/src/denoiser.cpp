#include "foca/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace foca {

namespace {

constexpr const char* kWeightsMagic = "foca-weights v1";

void write_array(std::ostream& os, const char* name, const std::vector<double>& v) {
    os << name << ' ' << v.size() << '\n';
    char buf[64];
    for (size_t i = 0; i < v.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", v[i]);
        os << buf << (i + 1 == v.size() ? '\n' : ' ');
    }
    if (v.empty())
        os << '\n';
}

std::vector<double> read_array(std::istream& is, const std::string& expect) {
    std::string name;
    size_t n = 0;
    if (!(is >> name >> n) || name != expect)
        throw ConfigError("ToyDenoiser::load: expected array '" + expect + "'");
    std::vector<double> v(n);
    for (size_t i = 0; i < n; ++i)
        if (!(is >> v[i]))
            throw ConfigError("ToyDenoiser::load: truncated array '" + expect + "'");
    return v;
}

}  // namespace

void ToyDenoiser::init_weights(CounterRng& rng) {
    auto fill = [&rng](std::vector<double>& w, size_t n, double scale) {
        w.resize(n);
        for (size_t i = 0; i < n; ++i)
            w[i] = scale * (2.0 * rng.next_double() - 1.0);
    };
    const int in = dx + temb_dim;
    fill(w1, static_cast<size_t>(hidden) * in, 1.0 / std::sqrt(double(in)));
    fill(b1, static_cast<size_t>(hidden), 0.0);
    fill(w2, static_cast<size_t>(hidden) * hidden, 1.0 / std::sqrt(double(hidden)));
    fill(b2, static_cast<size_t>(hidden), 0.0);
    fill(w3, static_cast<size_t>(dx) * hidden, 1.0 / std::sqrt(double(hidden)));
    fill(b3, static_cast<size_t>(dx), 0.0);
}

std::vector<double> ToyDenoiser::time_embedding(int t, int dim) {
    std::vector<double> e(static_cast<size_t>(dim));
    const int half = dim / 2;
    // Sinusoid bank from 1.3 rad per timestep down to one cycle per ~500
    // timesteps. Amplitudes taper as 1/freq above 0.13 rad so every channel
    // moves at most ~0.13 per step: the embedding resolves single-step
    // structure near t = 0 without dominating the feature dynamics.
    for (int j = 0; j < half; ++j) {
        const double freq = 1.3 * std::pow(16.0, -double(j) / double(half - 1));
        const double amp = std::min(1.0, 0.13 / freq);
        e[static_cast<size_t>(2 * j)] = amp * std::sin(t * freq);
        e[static_cast<size_t>(2 * j + 1)] = amp * std::cos(t * freq);
    }
    return e;
}

FeatureVector ToyDenoiser::hidden_features(const FeatureVector& x, int t) const {
    if (x.dim() != dx)
        throw RangeError("ToyDenoiser::hidden_features: state dim mismatch");
    const std::vector<double> temb = time_embedding(t, temb_dim);
    const int in = dx + temb_dim;
    FeatureVector h1 = FeatureVector::zeros(hidden);
    for (int i = 0; i < hidden; ++i) {
        double s = b1[static_cast<size_t>(i)];
        const double* row = &w1[static_cast<size_t>(i) * in];
        for (int j = 0; j < dx; ++j)
            s += row[j] * x[j];
        for (int j = 0; j < temb_dim; ++j)
            s += row[dx + j] * temb[static_cast<size_t>(j)];
        h1[i] = std::tanh(s);
    }
    return h1;
}

FeatureVector ToyDenoiser::epsilon_from_hidden(const FeatureVector& h1) const {
    if (h1.dim() != hidden)
        throw RangeError("ToyDenoiser::epsilon_from_hidden: hidden dim mismatch");
    FeatureVector h2 = FeatureVector::zeros(hidden);
    for (int i = 0; i < hidden; ++i) {
        double s = b2[static_cast<size_t>(i)];
        const double* row = &w2[static_cast<size_t>(i) * hidden];
        for (int j = 0; j < hidden; ++j)
            s += row[j] * h1[j];
        h2[i] = std::tanh(s);
    }
    FeatureVector out = FeatureVector::zeros(dx);
    for (int i = 0; i < dx; ++i) {
        double s = b3[static_cast<size_t>(i)];
        const double* row = &w3[static_cast<size_t>(i) * hidden];
        for (int j = 0; j < hidden; ++j)
            s += row[j] * h2[j];
        out[i] = s;
    }
    return out;
}

FeatureVector ToyDenoiser::epsilon(const FeatureVector& x, int t) const {
    return epsilon_from_hidden(hidden_features(x, t));
}

void ToyDenoiser::save(const std::string& path) const {
    std::ofstream os(path);
    if (!os)
        throw ConfigError("ToyDenoiser::save: cannot open " + path);
    os << kWeightsMagic << '\n';
    os << "dx " << dx << '\n';
    os << "hidden " << hidden << '\n';
    os << "temb_dim " << temb_dim << '\n';
    os << "T " << schedule.T << '\n';
    write_array(os, "alpha", schedule.alpha);
    write_array(os, "sigma", schedule.sigma);
    write_array(os, "w1", w1);
    write_array(os, "b1", b1);
    write_array(os, "w2", w2);
    write_array(os, "b2", b2);
    write_array(os, "w3", w3);
    write_array(os, "b3", b3);
}

ToyDenoiser ToyDenoiser::load(const std::string& path) {
    std::ifstream is(path);
    if (!is)
        throw ConfigError("ToyDenoiser::load: cannot open " + path);
    std::string magic;
    std::getline(is, magic);
    if (magic != kWeightsMagic)
        throw ConfigError("ToyDenoiser::load: unknown weights format '" + magic + "'");
    ToyDenoiser d;
    auto read_int = [&is](const std::string& expect) {
        std::string name;
        int v = 0;
        if (!(is >> name >> v) || name != expect)
            throw ConfigError("ToyDenoiser::load: expected field '" + expect + "'");
        return v;
    };
    d.dx = read_int("dx");
    d.hidden = read_int("hidden");
    d.temb_dim = read_int("temb_dim");
    d.schedule.T = read_int("T");
    d.schedule.alpha = read_array(is, "alpha");
    d.schedule.sigma = read_array(is, "sigma");
    d.schedule.alpha_bar.resize(d.schedule.alpha.size());
    double abar = 1.0;
    for (size_t i = 0; i < d.schedule.alpha.size(); ++i) {
        abar *= d.schedule.alpha[i];
        d.schedule.alpha_bar[i] = abar;
    }
    d.w1 = read_array(is, "w1");
    d.b1 = read_array(is, "b1");
    d.w2 = read_array(is, "w2");
    d.b2 = read_array(is, "b2");
    d.w3 = read_array(is, "w3");
    d.b3 = read_array(is, "b3");
    const size_t in = static_cast<size_t>(d.dx + d.temb_dim);
    if (d.w1.size() != static_cast<size_t>(d.hidden) * in || d.w2.size() != static_cast<size_t>(d.hidden) * d.hidden ||
        d.w3.size() != static_cast<size_t>(d.dx) * d.hidden)
        throw ConfigError("ToyDenoiser::load: weight sizes inconsistent with header");
    d.schedule.validate();
    return d;
}

FeatureVector sample_mixture(CounterRng& rng) {
    const bool right = (rng.next_u64() & 1ULL) != 0;
    FeatureVector x = FeatureVector::zeros(2);
    x[0] = (right ? 2.0 : -2.0) + 0.3 * rng.next_gaussian();
    x[1] = 0.3 * rng.next_gaussian();
    return x;
}

std::vector<FeatureVector> sample_dataset(int n, uint64_t seed) {
    CounterRng rng(seed, /*stream=*/0xDA7A);
    std::vector<FeatureVector> out;
    out.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        out.push_back(sample_mixture(rng));
    return out;
}

namespace {

struct Batch {
    std::vector<double> x;      // B x dx, the noisy inputs
    std::vector<double> temb;   // B x temb_dim
    std::vector<double> eps;    // B x dx, the targets
};

// Forward + backward + SGD update for one batch; returns batch mean MSE per element.
double sgd_step(ToyDenoiser& d, const Batch& batch, int bsz, double lr) {
    const int in = d.dx + d.temb_dim;
    const int H = d.hidden;
    std::vector<double> h1(static_cast<size_t>(bsz) * H), h2(static_cast<size_t>(bsz) * H);
    std::vector<double> out(static_cast<size_t>(bsz) * d.dx);

    for (int b = 0; b < bsz; ++b) {
        const double* xb = &batch.x[static_cast<size_t>(b) * d.dx];
        const double* tb = &batch.temb[static_cast<size_t>(b) * d.temb_dim];
        for (int i = 0; i < H; ++i) {
            double s = d.b1[static_cast<size_t>(i)];
            const double* row = &d.w1[static_cast<size_t>(i) * in];
            for (int j = 0; j < d.dx; ++j)
                s += row[j] * xb[j];
            for (int j = 0; j < d.temb_dim; ++j)
                s += row[d.dx + j] * tb[j];
            h1[static_cast<size_t>(b) * H + i] = std::tanh(s);
        }
        for (int i = 0; i < H; ++i) {
            double s = d.b2[static_cast<size_t>(i)];
            const double* row = &d.w2[static_cast<size_t>(i) * H];
            const double* h1b = &h1[static_cast<size_t>(b) * H];
            for (int j = 0; j < H; ++j)
                s += row[j] * h1b[j];
            h2[static_cast<size_t>(b) * H + i] = std::tanh(s);
        }
        for (int i = 0; i < d.dx; ++i) {
            double s = d.b3[static_cast<size_t>(i)];
            const double* row = &d.w3[static_cast<size_t>(i) * H];
            const double* h2b = &h2[static_cast<size_t>(b) * H];
            for (int j = 0; j < H; ++j)
                s += row[j] * h2b[j];
            out[static_cast<size_t>(b) * d.dx + i] = s;
        }
    }

    double mse = 0.0;
    std::vector<double> dout(static_cast<size_t>(bsz) * d.dx);
    for (size_t i = 0; i < dout.size(); ++i) {
        const double diff = out[i] - batch.eps[i];
        mse += diff * diff;
        dout[i] = 2.0 * diff / double(bsz * d.dx);
    }
    mse /= double(bsz * d.dx);

    std::vector<double> dh2(static_cast<size_t>(bsz) * H, 0.0), dh1(static_cast<size_t>(bsz) * H, 0.0);
    // Output layer grads, applied directly (plain SGD).
    for (int b = 0; b < bsz; ++b)
        for (int i = 0; i < d.dx; ++i) {
            const double g = dout[static_cast<size_t>(b) * d.dx + i];
            double* row = &d.w3[static_cast<size_t>(i) * H];
            const double* h2b = &h2[static_cast<size_t>(b) * H];
            for (int j = 0; j < H; ++j) {
                dh2[static_cast<size_t>(b) * H + j] += g * row[j];
                row[j] -= lr * g * h2b[j];
            }
            d.b3[static_cast<size_t>(i)] -= lr * g;
        }
    for (int b = 0; b < bsz; ++b)
        for (int i = 0; i < H; ++i) {
            const double hv = h2[static_cast<size_t>(b) * H + i];
            const double g = dh2[static_cast<size_t>(b) * H + i] * (1.0 - hv * hv);
            double* row = &d.w2[static_cast<size_t>(i) * H];
            const double* h1b = &h1[static_cast<size_t>(b) * H];
            for (int j = 0; j < H; ++j) {
                dh1[static_cast<size_t>(b) * H + j] += g * row[j];
                row[j] -= lr * g * h1b[j];
            }
            d.b2[static_cast<size_t>(i)] -= lr * g;
        }
    for (int b = 0; b < bsz; ++b) {
        const double* xb = &batch.x[static_cast<size_t>(b) * d.dx];
        const double* tb = &batch.temb[static_cast<size_t>(b) * d.temb_dim];
        for (int i = 0; i < H; ++i) {
            const double hv = h1[static_cast<size_t>(b) * H + i];
            const double g = dh1[static_cast<size_t>(b) * H + i] * (1.0 - hv * hv);
            double* row = &d.w1[static_cast<size_t>(i) * in];
            for (int j = 0; j < d.dx; ++j)
                row[j] -= lr * g * xb[j];
            for (int j = 0; j < d.temb_dim; ++j)
                row[d.dx + j] -= lr * g * tb[j];
            d.b1[static_cast<size_t>(i)] -= lr * g;
        }
    }
    return mse;
}

}  // namespace

TrainResult train_denoiser(const DiffusionSchedule& schedule, const TrainConfig& config) {
    schedule.validate();
    if (config.max_epochs < 1)
        throw ConfigError("train_denoiser: max_epochs must be >= 1 (non-convergence otherwise)");
    if (config.dataset_size < 1 || config.batch_size < 1)
        throw ConfigError("train_denoiser: dataset_size and batch_size must be positive");

    TrainResult result;
    result.model.schedule = schedule;
    CounterRng init_rng(config.seed, /*stream=*/0x1417);
    result.model.init_weights(init_rng);
    ToyDenoiser& model = result.model;

    const std::vector<FeatureVector> train = sample_dataset(config.dataset_size, config.seed);
    const std::vector<FeatureVector> holdout = sample_dataset(config.holdout_size, config.seed + 0x4001);

    // Fixed holdout corruption draws so the evaluation metric is deterministic.
    CounterRng hrng(config.seed, /*stream=*/0x401D);
    std::vector<int> h_t(holdout.size());
    std::vector<FeatureVector> h_eps(holdout.size());
    std::vector<FeatureVector> h_x(holdout.size());
    for (size_t i = 0; i < holdout.size(); ++i) {
        h_t[i] = 1 + static_cast<int>(hrng.next_u64() % static_cast<uint64_t>(schedule.T));
        FeatureVector e = FeatureVector::zeros(2);
        e[0] = hrng.next_gaussian();
        e[1] = hrng.next_gaussian();
        h_eps[i] = e;
        h_x[i] = forward_diffuse(holdout[i], h_t[i], e, schedule);
    }
    auto holdout_mse = [&]() {
        double s = 0.0;
        for (size_t i = 0; i < holdout.size(); ++i) {
            const FeatureVector pred = model.epsilon(h_x[i], h_t[i]);
            for (int j = 0; j < 2; ++j) {
                const double diff = pred[j] - h_eps[i][j];
                s += diff * diff;
            }
        }
        return s / double(holdout.size() * 2);
    };

    CounterRng rng(config.seed, /*stream=*/0x7134);
    std::vector<int> order(train.size());
    std::iota(order.begin(), order.end(), 0);

    Batch batch;
    for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
        for (size_t i = order.size(); i > 1; --i)
            std::swap(order[i - 1], order[rng.next_u64() % i]);
        for (size_t pos = 0; pos < order.size(); pos += static_cast<size_t>(config.batch_size)) {
            const int bsz = static_cast<int>(std::min<size_t>(config.batch_size, order.size() - pos));
            batch.x.assign(static_cast<size_t>(bsz) * model.dx, 0.0);
            batch.temb.assign(static_cast<size_t>(bsz) * model.temb_dim, 0.0);
            batch.eps.assign(static_cast<size_t>(bsz) * model.dx, 0.0);
            for (int b = 0; b < bsz; ++b) {
                const FeatureVector& x0 = train[static_cast<size_t>(order[pos + static_cast<size_t>(b)])];
                const int t = 1 + static_cast<int>(rng.next_u64() % static_cast<uint64_t>(schedule.T));
                FeatureVector e = FeatureVector::zeros(2);
                e[0] = rng.next_gaussian();
                e[1] = rng.next_gaussian();
                const FeatureVector xt = forward_diffuse(x0, t, e, schedule);
                const std::vector<double> te = ToyDenoiser::time_embedding(t, model.temb_dim);
                for (int j = 0; j < model.dx; ++j) {
                    batch.x[static_cast<size_t>(b) * model.dx + j] = xt[j];
                    batch.eps[static_cast<size_t>(b) * model.dx + j] = e[j];
                }
                for (int j = 0; j < model.temb_dim; ++j)
                    batch.temb[static_cast<size_t>(b) * model.temb_dim + j] = te[static_cast<size_t>(j)];
            }
            sgd_step(model, batch, bsz, config.learning_rate);
        }
        const double mse = holdout_mse();
        result.loss_trace.emplace_back(epoch, mse);
        result.final_mse = mse;
        if (mse < config.mse_threshold) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace foca
