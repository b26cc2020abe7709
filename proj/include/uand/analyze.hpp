#pragma once

#include "uand/construct.hpp"
#include "uand/types.hpp"

#include <string>
#include <vector>

namespace uand {

/// Similarity of a weight matrix to a per-row two-valued distribution,
/// in [0, 1]. Per-neuron bounds u_i / l_i are the row max / min.
struct BinarityReport {
    double score = 0;
    Vector upper;          // u_i = max_j W_ij
    Vector lower;          // l_i = min_j W_ij
    Vector p_hat;          // fraction of entries nearer u_i
    Vector deviation_q90;  // 90th percentile of min(|W-u|, |W-l|) per row
};

BinarityReport binarity_score(const Matrix& W);

/// One neuron's position in the readout chart for a pair (i, j).
struct ScatterPoint {
    double wi = 0;       // W(neuron, i)
    double wj = 0;       // W(neuron, j)
    double readout = 0;  // R(i*m+j, neuron)
};

std::vector<ScatterPoint> readout_scatter(const Model& model, const ProblemConfig& cfg,
                                          int i, int j);

/// Per-row two-valued fit of a trained weight matrix: 2-means centers
/// (u_i, l_i), upper/lower assignment, and a per-row flag for rows
/// whose entries stray more than 25% of (u_i - l_i) from both centers.
struct InferredClasses {
    BoolMatrix upper;
    Vector u, l;
    std::vector<bool> row_ok;
};

InferredClasses infer_classes(const Matrix& W);

/// Empirical per-class mean activation for the four (v_i, v_j) cases,
/// with the remaining active inputs sampled. mean/se are (case, class)
/// with the same ordering as ClassTruthTable.
struct ClassTableEstimate {
    Eigen::Matrix4d mean;
    Eigen::Matrix4d se;
    std::array<int, 4> counts{};
};

ClassTableEstimate empirical_class_table(const Model& model, const BoolMatrix& upper,
                                         const ProblemConfig& cfg, int i, int j,
                                         int n_samples, std::uint64_t seed_tag = 0);

/// Empirical statistics of the interference term
/// X = sum over active non-pair inputs of W(neuron, input).
struct InterferenceStats {
    Vector mean;      // per neuron
    Vector variance;  // per neuron
    double pooled_mean = 0;
    double pooled_variance = 0;  // over all (neuron, sample) draws
    long n_draws = 0;
};

InterferenceStats interference_stats(const Matrix& W, const ProblemConfig& cfg, int i,
                                     int j, int active_others, long n_samples,
                                     std::uint64_t seed_tag = 0);

/// Interference variance of the two-valued pattern: (u-l)^2 s p (1-p).
double binomial_interference_variance(double u, double l, double s, double p);

/// Predicted readout variance of the sparse 0/1 construction:
/// beta * s * p * (1-p) / (d * p^2).
double theory_var_cis(double s, double d, double p, double beta);

/// Predicted readout variance of the dense two-valued circuit:
/// beta (u-l)^2 16 s^2 p(1-p) (1/p^2 + 2/(p(1-p)) + 1/(1-p)^2) / d.
double theory_var_binary(double s, double d, double p, double u, double l, double beta);

/// True in the regime where the dense circuit's predicted variance is
/// asymptotically lower: s < sqrt(d) / ln^2(m).
bool crossover_predicate(double s, double d, double m);

/// ReLU variance attenuation measured exactly on the binomial
/// interference model: beta = Var(ReLU(X + offset)) / Var(X) with
/// X = (u-l) Binom(s, p) + s l.
double calibrate_beta(const BinaryWeightSpec& spec, int s, double offset);

/// Closed-form weighted least-squares readout for one pair: returns
/// the d readout weights plus a bias (last entry) fitted on sampled
/// activations with the per-sample case weights applied. ridge guards
/// against rank-deficient activations.
Vector least_squares_readout(const Model& model, const ProblemConfig& cfg, int i, int j,
                             const LossWeights& lw, int n_samples, double ridge = 1e-8,
                             std::uint64_t seed_tag = 0);

enum class SolutionType { BinaryCircuit, Additive, FrozenLike, Other };

std::string to_string(SolutionType t);

struct SolutionEvidence {
    SolutionType type = SolutionType::Other;
    double binarity = 0;
    double additive_alpha = 0;
    double additive_r2 = 0;
    double init_distance = -1;  // relative; -1 when no init supplied
};

/// Classify a trained model as binary-circuit / additive / frozen-like
/// / other, with the raw evidence scores. Detection thresholds:
/// binarity >= 0.95, additive R^2 >= 0.8.
SolutionEvidence detect_solution_type(const Model& model, const ProblemConfig& cfg,
                                      const Matrix* w_init = nullptr);

}  // namespace uand
