#include "uand/analyze.hpp"

#include "uand/datagen.hpp"
#include "uand/model.hpp"
#include "uand/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace uand {

BinarityReport binarity_score(const Matrix& W) {
    const auto d = W.rows(), m = W.cols();
    if (d < 1 || m < 1) throw ConfigError("binarity_score: empty matrix");

    BinarityReport rep;
    rep.upper = W.rowwise().maxCoeff();
    rep.lower = W.rowwise().minCoeff();
    rep.p_hat = Vector::Zero(d);
    rep.deviation_q90 = Vector::Zero(d);

    double total_dev = 0.0;
    std::vector<double> devs(m);
    for (Eigen::Index i = 0; i < d; ++i) {
        const double u = rep.upper[i], l = rep.lower[i];
        const double span = u - l;
        int nearer_upper = 0;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double du = std::abs(W(i, j) - u), dl = std::abs(W(i, j) - l);
            if (du <= dl) ++nearer_upper;
            devs[j] = std::min(du, dl);
            // Constant rows are degenerately binary: deviation 0.
            total_dev += span > 0 ? devs[j] / (2.0 * span) : 0.0;
        }
        rep.p_hat[i] = static_cast<double>(nearer_upper) / m;
        std::sort(devs.begin(), devs.end());
        rep.deviation_q90[i] = devs[static_cast<size_t>(0.9 * (m - 1))];
    }
    rep.score = 1.0 - total_dev / static_cast<double>(d * m);
    return rep;
}

std::vector<ScatterPoint> readout_scatter(const Model& model, const ProblemConfig& cfg,
                                          int i, int j) {
    model.check_shapes(cfg);
    if (i == j || i < 0 || j < 0 || i >= cfg.m || j >= cfg.m)
        throw ConfigError("readout_scatter: bad pair");
    std::vector<ScatterPoint> pts(cfg.d);
    const int row = cfg.pair_index(i, j);
    for (int n = 0; n < cfg.d; ++n)
        pts[n] = {model.compute.W(n, i), model.compute.W(n, j), model.readout.R(row, n)};
    return pts;
}

InferredClasses infer_classes(const Matrix& W) {
    const auto d = W.rows(), m = W.cols();
    InferredClasses ic;
    ic.upper = BoolMatrix(d, m);
    ic.u = Vector::Zero(d);
    ic.l = Vector::Zero(d);
    ic.row_ok.assign(d, true);

    for (Eigen::Index i = 0; i < d; ++i) {
        // 1-D 2-means, initialized at the row extremes.
        double cu = W.row(i).maxCoeff(), cl = W.row(i).minCoeff();
        for (int iter = 0; iter < 50; ++iter) {
            double su = 0, sl = 0;
            int nu = 0, nl = 0;
            for (Eigen::Index j = 0; j < m; ++j) {
                if (std::abs(W(i, j) - cu) <= std::abs(W(i, j) - cl)) {
                    su += W(i, j);
                    ++nu;
                } else {
                    sl += W(i, j);
                    ++nl;
                }
            }
            const double ncu = nu > 0 ? su / nu : cu;
            const double ncl = nl > 0 ? sl / nl : cl;
            if (ncu == cu && ncl == cl) break;
            cu = ncu;
            cl = ncl;
        }
        ic.u[i] = cu;
        ic.l[i] = cl;
        const double span = cu - cl;
        for (Eigen::Index j = 0; j < m; ++j) {
            const double du = std::abs(W(i, j) - cu), dl = std::abs(W(i, j) - cl);
            ic.upper(i, j) = du <= dl;
            if (span > 0 && std::min(du, dl) > 0.25 * span) ic.row_ok[i] = false;
        }
    }
    return ic;
}

ClassTableEstimate empirical_class_table(const Model& model, const BoolMatrix& upper,
                                         const ProblemConfig& cfg, int i, int j,
                                         int n_samples, std::uint64_t seed_tag) {
    model.check_shapes(cfg);
    if (n_samples < 2) throw ConfigError("empirical_class_table: need n_samples >= 2");

    ClassTableEstimate est;
    est.mean.setZero();
    est.se.setZero();
    for (int n = 0; n < cfg.d; ++n)
        ++est.counts[static_cast<int>(classify(upper(n, i), upper(n, j)))];

    for (int c = 0; c < 4; ++c) {
        const bool vi = (c >> 1) & 1, vj = c & 1;
        const int extra = std::max(0, cfg.s - static_cast<int>(vi) - static_cast<int>(vj));
        SampleBatch batch = sample_batch_conditioned(
            cfg, mix64(kAnalysisStream ^ seed_tag) + c, n_samples, i, j, vi, vj, extra);
        Matrix Y = ((batch.inputs * model.compute.W.transpose()).rowwise() +
                    model.compute.b.transpose())
                       .cwiseMax(0.0);
        // Per-sample class means, then mean and standard error over samples.
        for (int k = 0; k < 4; ++k) {
            if (est.counts[k] == 0) continue;
            Vector per_sample = Vector::Zero(n_samples);
            for (int n = 0; n < cfg.d; ++n)
                if (static_cast<int>(classify(upper(n, i), upper(n, j))) == k)
                    per_sample += Y.col(n);
            per_sample /= est.counts[k];
            const double mu = per_sample.mean();
            const double var =
                (per_sample.array() - mu).square().sum() / (n_samples - 1);
            est.mean(c, k) = mu;
            est.se(c, k) = std::sqrt(var / n_samples);
        }
    }
    return est;
}

InterferenceStats interference_stats(const Matrix& W, const ProblemConfig& cfg, int i,
                                     int j, int active_others, long n_samples,
                                     std::uint64_t seed_tag) {
    if (i == j || i < 0 || j < 0 || i >= cfg.m || j >= cfg.m)
        throw ConfigError("interference_stats: bad pair");
    if (active_others < 0 || active_others > cfg.m - 2)
        throw ConfigError("interference_stats: bad active_others");
    const int d = static_cast<int>(W.rows());
    const long per_neuron = std::max(2L, n_samples / d);

    std::vector<int> others;
    for (int k = 0; k < cfg.m; ++k)
        if (k != i && k != j) others.push_back(k);

    InterferenceStats st;
    st.mean = Vector::Zero(d);
    st.variance = Vector::Zero(d);
    auto rng = rng_for(cfg.seed, kAnalysisStream, mix64(0x1f5 ^ seed_tag));

    double gsum = 0, gsq = 0;
    std::vector<int> idx;
    for (int n = 0; n < d; ++n) {
        double sum = 0, sq = 0;
        for (long t = 0; t < per_neuron; ++t) {
            idx = others;
            for (int a = 0; a < active_others; ++a) {
                std::uniform_int_distribution<int> pick(a, static_cast<int>(idx.size()) - 1);
                std::swap(idx[a], idx[pick(rng)]);
            }
            double x = 0;
            for (int a = 0; a < active_others; ++a) x += W(n, idx[a]);
            sum += x;
            sq += x * x;
        }
        st.mean[n] = sum / per_neuron;
        st.variance[n] =
            std::max(0.0, (sq - sum * sum / per_neuron) / (per_neuron - 1));
        gsum += sum;
        gsq += sq;
    }
    st.n_draws = per_neuron * d;
    st.pooled_mean = gsum / st.n_draws;
    st.pooled_variance =
        std::max(0.0, (gsq - gsum * gsum / st.n_draws) / (st.n_draws - 1));
    return st;
}

double binomial_interference_variance(double u, double l, double s, double p) {
    return (u - l) * (u - l) * s * p * (1.0 - p);
}

double theory_var_cis(double s, double d, double p, double beta) {
    if (p <= 0 || p >= 1 || d <= 0) throw ConfigError("theory_var_cis: need 0<p<1, d>0");
    return beta * s * p * (1.0 - p) / (d * p * p);
}

double theory_var_binary(double s, double d, double p, double u, double l, double beta) {
    if (p <= 0 || p >= 1 || d <= 0)
        throw ConfigError("theory_var_binary: need 0<p<1, d>0");
    const double bracket =
        1.0 / (p * p) + 2.0 / (p * (1.0 - p)) + 1.0 / ((1.0 - p) * (1.0 - p));
    return beta * (u - l) * (u - l) * 16.0 * s * s * p * (1.0 - p) * bracket / d;
}

bool crossover_predicate(double s, double d, double m) {
    if (m < 3) throw ConfigError("crossover_predicate: need m >= 3");
    const double lm = std::log(m);
    return s < std::sqrt(d) / (lm * lm);
}

double calibrate_beta(const BinaryWeightSpec& spec, int s, double offset) {
    if (s < 1) throw ConfigError("calibrate_beta: need s >= 1");
    if (spec.u == spec.l) throw ConfigError("calibrate_beta: u == l has zero variance");
    // Exact moments over X = (u-l) Binom(s, p) + s l.
    std::vector<double> pmf(s + 1);
    double logc = 0;  // log C(s, k) built incrementally
    for (int k = 0; k <= s; ++k) {
        if (k > 0) logc += std::log(double(s - k + 1)) - std::log(double(k));
        pmf[k] = std::exp(logc + k * std::log(spec.p) + (s - k) * std::log1p(-spec.p));
    }
    double ex = 0, ex2 = 0, er = 0, er2 = 0;
    for (int k = 0; k <= s; ++k) {
        const double x = (spec.u - spec.l) * k + s * spec.l;
        const double r = std::max(x + offset, 0.0);
        ex += pmf[k] * x;
        ex2 += pmf[k] * x * x;
        er += pmf[k] * r;
        er2 += pmf[k] * r * r;
    }
    const double var_x = ex2 - ex * ex;
    const double var_r = er2 - er * er;
    if (var_x <= 0) throw ConfigError("calibrate_beta: degenerate interference");
    return var_r / var_x;
}

Vector least_squares_readout(const Model& model, const ProblemConfig& cfg, int i, int j,
                             const LossWeights& lw, int n_samples, double ridge,
                             std::uint64_t seed_tag) {
    model.check_shapes(cfg);
    lw.validate();
    if (i == j || i < 0 || j < 0 || i >= cfg.m || j >= cfg.m)
        throw ConfigError("least_squares_readout: bad pair");

    const int dim = cfg.d + 1;  // weights plus bias column
    Matrix gram = Matrix::Zero(dim, dim);
    Vector rhs = Vector::Zero(dim);

    const int chunk = 512;
    long done = 0;
    for (std::uint64_t k = 0; done < n_samples; ++k) {
        const int n = static_cast<int>(std::min<long>(chunk, n_samples - done));
        SampleBatch batch = sample_batch(cfg, mix64(0x15a ^ seed_tag) + k, n);
        Matrix Y = ((batch.inputs * model.compute.W.transpose()).rowwise() +
                    model.compute.b.transpose())
                       .cwiseMax(0.0);
        Matrix G(n, dim);
        G.leftCols(cfg.d) = Y;
        G.col(cfg.d).setOnes();
        Vector w(n), t(n);
        for (int r = 0; r < n; ++r) {
            const int act = (batch.inputs(r, i) != 0.0) + (batch.inputs(r, j) != 0.0);
            w[r] = act == 2 ? lw.w11 : act == 1 ? lw.w01 : lw.w00;
            t[r] = act == 2 ? 1.0 : 0.0;
        }
        gram.noalias() += G.transpose() * w.asDiagonal() * G;
        rhs.noalias() += G.transpose() * (w.asDiagonal() * t);
        done += n;
    }
    gram.diagonal().array() += ridge;
    return gram.ldlt().solve(rhs);
}

std::string to_string(SolutionType t) {
    switch (t) {
        case SolutionType::BinaryCircuit: return "binary_circuit";
        case SolutionType::Additive: return "additive";
        case SolutionType::FrozenLike: return "frozen_like";
        default: return "other";
    }
}

SolutionEvidence detect_solution_type(const Model& model, const ProblemConfig& cfg,
                                      const Matrix* w_init) {
    model.check_shapes(cfg);
    SolutionEvidence ev;
    ev.binarity = binarity_score(model.compute.W).score;

    if (w_init) {
        const double denom = std::max(w_init->norm(), 1e-300);
        ev.init_distance = (model.compute.W - *w_init).norm() / denom;
    }

    // Least-squares fit of z = alpha (v_i + v_j) over sampled inputs.
    SampleBatch batch = sample_batch(cfg, 0xADD111, 256);
    auto [Y, Z] = forward_batch(model, cfg, batch.inputs);
    double num = 0, den = 0, zsum = 0, zsq = 0;
    long cnt = 0;
    for (Eigen::Index r = 0; r < batch.inputs.rows(); ++r) {
        for (int i = 0; i < cfg.m; ++i) {
            for (int j = 0; j < cfg.m; ++j) {
                if (i == j) continue;
                const double a = batch.inputs(r, i) + batch.inputs(r, j);
                const double z = Z(r, cfg.pair_index(i, j));
                num += a * z;
                den += a * a;
                zsum += z;
                zsq += z * z;
                ++cnt;
            }
        }
    }
    ev.additive_alpha = den > 0 ? num / den : 0.0;
    const double ss_tot = zsq - zsum * zsum / cnt;
    double ss_res = 0;
    for (Eigen::Index r = 0; r < batch.inputs.rows(); ++r) {
        for (int i = 0; i < cfg.m; ++i) {
            for (int j = 0; j < cfg.m; ++j) {
                if (i == j) continue;
                const double a = batch.inputs(r, i) + batch.inputs(r, j);
                const double e = Z(r, cfg.pair_index(i, j)) - ev.additive_alpha * a;
                ss_res += e * e;
            }
        }
    }
    ev.additive_r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 0.0;

    // The additive check comes before binarity: a passthrough additive
    // model also has two-valued rows, but a genuine circuit's outputs
    // are a poor additive fit, so the order is unambiguous.
    if (ev.init_distance >= 0 && ev.init_distance < 1e-12)
        ev.type = SolutionType::FrozenLike;
    else if (ev.additive_r2 >= 0.8)
        ev.type = SolutionType::Additive;
    else if (ev.binarity >= 0.95)
        ev.type = SolutionType::BinaryCircuit;
    else
        ev.type = SolutionType::Other;
    return ev;
}

}  // namespace uand
