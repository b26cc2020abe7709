#include "uand/train.hpp"

#include "uand/analyze.hpp"
#include "uand/rng.hpp"

#include <cmath>

namespace uand {

double InitSpec::resolved_w_scale(const ProblemConfig& cfg) const {
    return w_scale > 0 ? w_scale : 1.0 / std::sqrt(static_cast<double>(cfg.m));
}

double InitSpec::resolved_r_scale(const ProblemConfig& cfg) const {
    return r_scale > 0 ? r_scale : 1.0 / std::sqrt(static_cast<double>(cfg.d));
}

namespace {

template <typename Rng>
void fill_uniform(Matrix& M, double scale, Rng& rng) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index i = 0; i < M.rows(); ++i)
        for (Eigen::Index j = 0; j < M.cols(); ++j) M(i, j) = scale > 0 ? dist(rng) : 0.0;
}

template <typename Rng>
void fill_uniform(Vector& v, double scale, Rng& rng) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = scale > 0 ? dist(rng) : 0.0;
}

// Adam with decoupled weight decay. Decay applies only where the
// caller passes wd > 0.
struct AdamState {
    Matrix mW, vW, mR, vR;
    Vector mb, vb, mc, vc;
    long t = 0;

    explicit AdamState(const Model& mdl) {
        mW = Matrix::Zero(mdl.compute.W.rows(), mdl.compute.W.cols());
        vW = mW;
        mR = Matrix::Zero(mdl.readout.R.rows(), mdl.readout.R.cols());
        vR = mR;
        mb = Vector::Zero(mdl.compute.b.size());
        vb = mb;
        mc = Vector::Zero(mdl.readout.c.size());
        vc = mc;
    }

    template <typename P, typename G>
    void update_one(P& param, const G& grad, P& m, P& v, const AdamParams& ap,
                    double lr, double wd, double bc1, double bc2) {
        m = ap.beta1 * m + (1.0 - ap.beta1) * grad;
        v = ap.beta2 * v + (1.0 - ap.beta2) * grad.cwiseProduct(grad);
        param.array() -= lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + ap.eps);
        if (wd > 0) param.array() -= lr * wd * param.array();
    }

    void step(Model& mdl, const GradientBundle& g, const TrainConfig& tc) {
        ++t;
        const double bc1 = 1.0 - std::pow(tc.adam.beta1, t);
        const double bc2 = 1.0 - std::pow(tc.adam.beta2, t);
        const double lr = tc.learning_rate;
        if (!tc.freeze_compute) {
            update_one(mdl.compute.W, g.dW, mW, vW, tc.adam, lr, tc.weight_decay, bc1, bc2);
            update_one(mdl.compute.b, g.db, mb, vb, tc.adam, lr, 0.0, bc1, bc2);
        }
        update_one(mdl.readout.R, g.dR, mR, vR, tc.adam, lr, tc.weight_decay, bc1, bc2);
        if (tc.train_readout_bias)
            update_one(mdl.readout.c, g.dc, mc, vc, tc.adam, lr, 0.0, bc1, bc2);
    }
};

void sgd_step(Model& mdl, const GradientBundle& g, const TrainConfig& tc) {
    const double lr = tc.learning_rate;
    if (!tc.freeze_compute) {
        mdl.compute.W -= lr * g.dW;
        mdl.compute.b -= lr * g.db;
        if (tc.weight_decay > 0) mdl.compute.W *= 1.0 - lr * tc.weight_decay;
    }
    mdl.readout.R -= lr * g.dR;
    if (tc.weight_decay > 0) mdl.readout.R *= 1.0 - lr * tc.weight_decay;
    if (tc.train_readout_bias) mdl.readout.c -= lr * g.dc;
}

}  // namespace

Model init_model(const ProblemConfig& cfg, const InitSpec& init, std::uint64_t seed) {
    cfg.validate();
    auto rng = rng_for(seed, kInitStream);
    Model mdl = Model::zeros(cfg);
    fill_uniform(mdl.compute.W, init.resolved_w_scale(cfg), rng);
    fill_uniform(mdl.compute.b, init.b_scale, rng);
    fill_uniform(mdl.readout.R, init.resolved_r_scale(cfg), rng);
    fill_uniform(mdl.readout.c, init.c_scale, rng);
    return mdl;
}

std::pair<double, GradientBundle> backward(const Model& model, const ProblemConfig& cfg,
                                           const SampleBatch& batch,
                                           const LossWeights& lw) {
    lw.validate();
    const Matrix& V = batch.inputs;
    const auto n = V.rows();

    auto [Y, Z] = forward_batch(model, cfg, V);

    // dL/dZ for L = mean_n (sum_k w (z - t)^2) / (sum_k w).
    Matrix G(n, cfg.output_dim());
    double objective = 0.0;
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vector v = V.row(r).transpose();
        const Vector t = target(cfg, v);
        const Vector w = case_weight_row(cfg, v, lw);
        const double denom = w.sum();
        const auto err = Z.row(r).transpose() - t;
        if (denom == 0.0) {
            G.row(r).setZero();
            continue;
        }
        objective += (w.array() * err.array().square()).sum() / denom;
        G.row(r) = (2.0 / (static_cast<double>(n) * denom)) *
                   (w.array() * err.array()).matrix().transpose();
    }
    objective /= static_cast<double>(n);

    if (!std::isfinite(objective))
        throw TrainingError("backward: non-finite objective (loss diverged)");

    GradientBundle g;
    g.dc = G.colwise().sum().transpose();
    g.dR = G.transpose() * Y;
    Matrix dY = G * model.readout.R;
    // ReLU mask: Y > 0 exactly where the pre-activation was > 0.
    Matrix dA = (Y.array() > 0.0).select(dY, 0.0);
    g.db = dA.colwise().sum().transpose();
    g.dW = dA.transpose() * V;

    if (!g.dW.allFinite() || !g.dR.allFinite())
        throw TrainingError("backward: non-finite gradient");
    return {objective, std::move(g)};
}

TrainResult train_from(Model model, const ProblemConfig& cfg, const TrainConfig& tc) {
    cfg.validate();
    tc.validate();
    const LossWeights lw = tc.loss_weights ? *tc.loss_weights : compute_loss_weights(cfg);

    TrainResult res;
    AdamState adam(model);
    // Evaluation batches live on a disjoint index range from training.
    const std::uint64_t eval_base = 0xE000000000000000ULL;

    for (int epoch = 0; epoch < tc.epochs; ++epoch) {
        double epoch_obj = 0.0;
        for (int b = 0; b < tc.batches_per_epoch; ++b) {
            const std::uint64_t bi =
                static_cast<std::uint64_t>(epoch) * tc.batches_per_epoch + b;
            SampleBatch batch = sample_batch(cfg, bi, tc.batch_size);
            double obj;
            GradientBundle g;
            try {
                std::tie(obj, g) = backward(model, cfg, batch, lw);
            } catch (const TrainingError&) {
                res.model = std::move(model);
                res.diverged = true;
                return res;
            }
            epoch_obj += obj;
            if (tc.optimizer == OptimizerKind::Adam)
                adam.step(model, g, tc);
            else
                sgd_step(model, g, tc);
        }
        EpochRecord rec;
        rec.epoch = epoch;
        rec.loss = std::sqrt(epoch_obj / tc.batches_per_epoch);
        rec.binarity = binarity_score(model.compute.W).score;
        SampleBatch eval = sample_batch(cfg, eval_base + epoch, 256);
        auto [Ye, Ze] = forward_batch(model, cfg, eval.inputs);
        rec.cases = case_losses(cfg, Ze, eval.inputs);
        res.history.push_back(rec);
    }

    SampleBatch eval = sample_batch(cfg, eval_base + tc.epochs, 1024);
    auto [Ye, Ze] = forward_batch(model, cfg, eval.inputs);
    res.final_loss = std::sqrt(batch_objective(cfg, Ze, eval.inputs, lw));
    res.final_cases = case_losses(cfg, Ze, eval.inputs);
    res.model = std::move(model);
    return res;
}

TrainResult train(const ProblemConfig& cfg, const TrainConfig& tc) {
    return train_from(init_model(cfg, tc.init, cfg.seed), cfg, tc);
}

double baseline_additive_loss(const ProblemConfig& cfg, const LossWeights& lw,
                              double alpha) {
    lw.validate();
    const CaseCounts n = expected_case_counts(cfg);
    const double e01 = alpha * alpha;
    const double e11 = (1.0 - 2.0 * alpha) * (1.0 - 2.0 * alpha);
    const double mass = lw.w00 * n.c00 + lw.w01 * n.c01 + lw.w11 * n.c11;
    if (mass == 0.0) return 0.0;
    return std::sqrt((lw.w01 * n.c01 * e01 + lw.w11 * n.c11 * e11) / mass);
}

}  // namespace uand
