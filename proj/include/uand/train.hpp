#pragma once

#include "uand/model.hpp"

#include <optional>
#include <vector>

namespace uand {

struct AdamParams {
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

enum class OptimizerKind { Sgd, Adam };

/// Uniform(-scale, scale) initialization per parameter group. A scale
/// of <= 0 for W/R means "use fan-in default" (1/sqrt(m), 1/sqrt(d)).
struct InitSpec {
    double w_scale = -1.0;
    double r_scale = -1.0;
    double b_scale = 0.0;
    double c_scale = 0.0;

    double resolved_w_scale(const ProblemConfig& cfg) const;
    double resolved_r_scale(const ProblemConfig& cfg) const;
};

struct TrainConfig {
    int epochs = 200;
    int batches_per_epoch = 100;
    int batch_size = 256;
    double learning_rate = 1e-3;
    double weight_decay = 1e-4;  // decoupled, applied to W and R only
    bool freeze_compute = false;
    bool train_readout_bias = true;
    OptimizerKind optimizer = OptimizerKind::Adam;
    AdamParams adam;
    InitSpec init;
    // Override for degenerate configs where a case has zero expected
    // count; default derives balanced weights from the problem config.
    std::optional<LossWeights> loss_weights;

    void validate() const {
        if (epochs < 1 || batches_per_epoch < 1 || batch_size < 1)
            throw ConfigError("TrainConfig: counts must be >= 1");
        if (learning_rate <= 0) throw ConfigError("TrainConfig: learning_rate must be > 0");
        if (weight_decay < 0) throw ConfigError("TrainConfig: weight_decay must be >= 0");
    }
};

struct GradientBundle {
    Matrix dW;
    Vector db;
    Matrix dR;
    Vector dc;
};

struct EpochRecord {
    int epoch = 0;
    double loss = 0;  // weighted RMS, averaged over the epoch's batches
    double binarity = 0;
    CaseLosses cases;
};

struct TrainResult {
    Model model;
    std::vector<EpochRecord> history;
    bool diverged = false;
    double final_loss = 0;  // weighted RMS on a fresh evaluation batch
    CaseLosses final_cases;
};

/// Draw a fresh model from the init spec. Deterministic in seed.
Model init_model(const ProblemConfig& cfg, const InitSpec& init, std::uint64_t seed);

/// Exact analytic gradient of batch_objective at the model, with the
/// ReLU subgradient taken as 0 at 0. Returns (objective, gradients).
std::pair<double, GradientBundle> backward(const Model& model, const ProblemConfig& cfg,
                                           const SampleBatch& batch,
                                           const LossWeights& lw);

/// Full training loop. Throws TrainingError with partial history kept
/// in the result when the loss goes non-finite.
TrainResult train(const ProblemConfig& cfg, const TrainConfig& tc);

/// Same loop starting from a caller-supplied model (e.g. frozen-random).
TrainResult train_from(Model model, const ProblemConfig& cfg, const TrainConfig& tc);

/// Closed-form weighted RMS loss of the degenerate additive predictor
/// z_{im+j} = alpha (v_i + v_j), under expected case counts.
double baseline_additive_loss(const ProblemConfig& cfg, const LossWeights& lw,
                              double alpha = 0.4);

}  // namespace uand
