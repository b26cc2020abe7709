#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace uand {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Bad dimensions, bad parameter values, unparseable config files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Numeric failure during training (divergence, non-finite values).
struct TrainingError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Problem dimensions shared by every experiment: m inputs, d neurons,
/// exactly s active inputs per sample.
struct ProblemConfig {
    int m = 100;
    int d = 1000;
    int s = 3;
    std::uint64_t seed = 0;

    void validate() const {
        if (m < 2) throw ConfigError("ProblemConfig: m must be >= 2");
        if (d < 1) throw ConfigError("ProblemConfig: d must be >= 1");
        if (s < 0 || s > m) throw ConfigError("ProblemConfig: s must satisfy 0 <= s <= m");
    }

    /// Row index of output pair (i, j) in the readout, i.e. i*m + j.
    int pair_index(int i, int j) const { return i * m + j; }
    int output_dim() const { return m * m; }
};

/// ReLU layer: activations are ReLU(W v + b). W is d x m.
struct ComputeLayer {
    Matrix W;
    Vector b;
};

/// Linear readout: z = R y + c. R is m^2 x d, row i*m+j holds the
/// weights that read out the AND of inputs (i, j).
struct ReadoutLayer {
    Matrix R;
    Vector c;
};

struct Model {
    ComputeLayer compute;
    ReadoutLayer readout;

    static Model zeros(const ProblemConfig& cfg) {
        Model mdl;
        mdl.compute.W = Matrix::Zero(cfg.d, cfg.m);
        mdl.compute.b = Vector::Zero(cfg.d);
        mdl.readout.R = Matrix::Zero(cfg.output_dim(), cfg.d);
        mdl.readout.c = Vector::Zero(cfg.output_dim());
        return mdl;
    }

    void check_shapes(const ProblemConfig& cfg) const {
        if (compute.W.rows() != cfg.d || compute.W.cols() != cfg.m ||
            compute.b.size() != cfg.d ||
            readout.R.rows() != cfg.output_dim() || readout.R.cols() != cfg.d ||
            readout.c.size() != cfg.output_dim()) {
            throw ConfigError("Model: shapes inconsistent with ProblemConfig");
        }
    }
};

/// Per-output-pair loss weights for the three cases (0,0), mixed, (1,1).
struct LossWeights {
    double w00 = 1.0;
    double w01 = 1.0;
    double w11 = 1.0;

    void validate() const {
        if (w00 < 0 || w01 < 0 || w11 < 0)
            throw ConfigError("LossWeights: weights must be nonnegative");
        if (w00 == 0 && w01 == 0 && w11 == 0)
            throw ConfigError("LossWeights: at least one weight must be positive");
    }
};

/// Expected off-diagonal ordered-pair counts per case under exactly-s
/// sampling.
struct CaseCounts {
    double c00 = 0, c01 = 0, c11 = 0;
};

inline CaseCounts expected_case_counts(const ProblemConfig& cfg) {
    const double s = cfg.s, m = cfg.m;
    return {(m - s) * (m - s - 1), 2.0 * s * (m - s), s * (s - 1)};
}

/// Weights making the expected total loss contribution of the three
/// cases equal: w_case proportional to 1 / expected pair count.
/// Throws on any case with zero expected count; set that case's weight
/// to zero by hand if it genuinely cannot occur.
inline LossWeights compute_loss_weights(const ProblemConfig& cfg) {
    cfg.validate();
    if (cfg.s < 2)
        throw ConfigError("compute_loss_weights: s < 2, no (1,1) pairs can occur");
    const CaseCounts n = expected_case_counts(cfg);
    if (n.c00 == 0 || n.c01 == 0 || n.c11 == 0)
        throw ConfigError("compute_loss_weights: a case has zero expected count; "
                          "override its weight to 0 explicitly if intended");
    // Normalized so w00 = 1.
    return {1.0, n.c00 / n.c01, n.c00 / n.c11};
}

}  // namespace uand
