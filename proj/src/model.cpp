#include "uand/model.hpp"

#include <cmath>

namespace uand {

std::pair<Vector, Vector> forward(const Model& model, const ProblemConfig& cfg,
                                  const Vector& v) {
    model.check_shapes(cfg);
    if (v.size() != cfg.m) throw ConfigError("forward: input size mismatch");
    Vector y = (model.compute.W * v + model.compute.b).cwiseMax(0.0);
    Vector z = model.readout.R * y + model.readout.c;
    return {std::move(y), std::move(z)};
}

std::pair<Matrix, Matrix> forward_batch(const Model& model, const ProblemConfig& cfg,
                                        const Matrix& V) {
    model.check_shapes(cfg);
    if (V.cols() != cfg.m) throw ConfigError("forward_batch: input size mismatch");
    Matrix Y = ((V * model.compute.W.transpose()).rowwise() +
                model.compute.b.transpose())
                   .cwiseMax(0.0);
    Matrix Z = (Y * model.readout.R.transpose()).rowwise() + model.readout.c.transpose();
    return {std::move(Y), std::move(Z)};
}

Vector target(const ProblemConfig& cfg, const Vector& v) {
    Vector t = Vector::Zero(cfg.output_dim());
    for (int i = 0; i < cfg.m; ++i) {
        if (v[i] == 0.0) continue;
        for (int j = 0; j < cfg.m; ++j)
            if (j != i && v[j] != 0.0) t[cfg.pair_index(i, j)] = 1.0;
    }
    return t;
}

Matrix target_batch(const ProblemConfig& cfg, const Matrix& V) {
    Matrix T = Matrix::Zero(V.rows(), cfg.output_dim());
    for (Eigen::Index r = 0; r < V.rows(); ++r)
        T.row(r) = target(cfg, V.row(r).transpose()).transpose();
    return T;
}

Vector case_weight_row(const ProblemConfig& cfg, const Vector& v, const LossWeights& lw) {
    Vector w = Vector::Zero(cfg.output_dim());
    for (int i = 0; i < cfg.m; ++i) {
        for (int j = 0; j < cfg.m; ++j) {
            if (i == j) continue;
            const int active = (v[i] != 0.0) + (v[j] != 0.0);
            w[cfg.pair_index(i, j)] = active == 2 ? lw.w11 : active == 1 ? lw.w01 : lw.w00;
        }
    }
    return w;
}

double weighted_loss(const ProblemConfig& cfg, const Vector& z, const Vector& v,
                     const LossWeights& lw) {
    lw.validate();
    const Vector t = target(cfg, v);
    const Vector w = case_weight_row(cfg, v, lw);
    const double denom = w.sum();
    if (denom == 0.0) return 0.0;
    const double num = (w.array() * (z - t).array().square()).sum();
    return std::sqrt(num / denom);
}

CaseLosses case_losses(const ProblemConfig& cfg, const Matrix& Z, const Matrix& V) {
    double se[3] = {0, 0, 0};
    double cnt[3] = {0, 0, 0};
    for (Eigen::Index r = 0; r < V.rows(); ++r) {
        const Vector t = target(cfg, V.row(r).transpose());
        for (int i = 0; i < cfg.m; ++i) {
            for (int j = 0; j < cfg.m; ++j) {
                if (i == j) continue;
                const int k = (V(r, i) != 0.0) + (V(r, j) != 0.0);
                const int idx = cfg.pair_index(i, j);
                const double e = Z(r, idx) - t[idx];
                se[k] += e * e;
                cnt[k] += 1.0;
            }
        }
    }
    CaseLosses cl;
    cl.loss00 = cnt[0] > 0 ? std::sqrt(se[0] / cnt[0]) : 0.0;
    cl.loss01 = cnt[1] > 0 ? std::sqrt(se[1] / cnt[1]) : 0.0;
    cl.loss11 = cnt[2] > 0 ? std::sqrt(se[2] / cnt[2]) : 0.0;
    return cl;
}

double mc_balanced_loss(const Model& model, const ProblemConfig& cfg,
                        const LossWeights& lw, int n_samples, std::uint64_t batch_tag) {
    if (n_samples < 1) throw ConfigError("mc_balanced_loss: n_samples must be >= 1");
    const int chunk = 512;
    double total = 0.0;
    long done = 0;
    for (std::uint64_t k = 0; done < n_samples; ++k) {
        const int n = static_cast<int>(std::min<long>(chunk, n_samples - done));
        SampleBatch batch = sample_batch(cfg, batch_tag + k, n);
        auto [Y, Z] = forward_batch(model, cfg, batch.inputs);
        total += batch_objective(cfg, Z, batch.inputs, lw) * n;
        done += n;
    }
    return std::sqrt(total / done);
}

double exhaustive_balanced_loss(const Model& model, const ProblemConfig& cfg,
                                const LossWeights& lw) {
    if (cfg.m > 20) throw ConfigError("exhaustive_balanced_loss: m too large to enumerate");
    // All exactly-s patterns, uniform, matching the sampling distribution.
    std::vector<int> comb(cfg.s);
    for (int i = 0; i < cfg.s; ++i) comb[i] = i;
    double total = 0.0;
    long count = 0;
    while (true) {
        Vector v = Vector::Zero(cfg.m);
        for (int i : comb) v[i] = 1.0;
        Matrix V = v.transpose();
        auto [Y, Z] = forward_batch(model, cfg, V);
        total += batch_objective(cfg, Z, V, lw);
        ++count;
        // next combination
        int i = cfg.s - 1;
        while (i >= 0 && comb[i] == cfg.m - cfg.s + i) --i;
        if (i < 0) break;
        ++comb[i];
        for (int j = i + 1; j < cfg.s; ++j) comb[j] = comb[j - 1] + 1;
    }
    return std::sqrt(total / count);
}

double batch_objective(const ProblemConfig& cfg, const Matrix& Z, const Matrix& V,
                       const LossWeights& lw) {
    lw.validate();
    double total = 0.0;
    for (Eigen::Index r = 0; r < V.rows(); ++r) {
        const Vector v = V.row(r).transpose();
        const Vector t = target(cfg, v);
        const Vector w = case_weight_row(cfg, v, lw);
        const double denom = w.sum();
        if (denom == 0.0) continue;
        total += (w.array() * (Z.row(r).transpose() - t).array().square()).sum() / denom;
    }
    return total / static_cast<double>(V.rows());
}

}  // namespace uand
