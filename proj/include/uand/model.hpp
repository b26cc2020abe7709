#pragma once

#include "uand/datagen.hpp"
#include "uand/types.hpp"

#include <utility>

namespace uand {

/// y = ReLU(W v + b), z = R y + c.
std::pair<Vector, Vector> forward(const Model& model, const ProblemConfig& cfg,
                                  const Vector& v);

/// Batched forward pass. V is n x m; returns Y (n x d) and Z (n x m^2).
std::pair<Matrix, Matrix> forward_batch(const Model& model, const ProblemConfig& cfg,
                                        const Matrix& V);

/// Universal-AND target: entry i*m+j is v_i AND v_j for i != j, 0 on
/// the diagonal.
Vector target(const ProblemConfig& cfg, const Vector& v);
Matrix target_batch(const ProblemConfig& cfg, const Matrix& V);

/// Per-pair loss weight row for input v: w00/w01/w11 by the case of
/// (v_i, v_j), zero on the diagonal.
Vector case_weight_row(const ProblemConfig& cfg, const Vector& v, const LossWeights& lw);

/// Weighted RMS loss: sqrt of the w-weighted mean of (z - target)^2
/// over off-diagonal ordered pairs.
double weighted_loss(const ProblemConfig& cfg, const Vector& z, const Vector& v,
                     const LossWeights& lw);

/// Per-case breakdown of the same quantity: RMS error within each of
/// the three cases (unweighted within a case).
struct CaseLosses {
    double loss00 = 0, loss01 = 0, loss11 = 0;
};
CaseLosses case_losses(const ProblemConfig& cfg, const Matrix& Z, const Matrix& V);

/// Mean weighted squared error over a batch (the training objective;
/// weighted_loss is its square root for single samples).
double batch_objective(const ProblemConfig& cfg, const Matrix& Z, const Matrix& V,
                       const LossWeights& lw);

/// Weighted RMS loss estimated by Monte-Carlo over exactly-s inputs.
double mc_balanced_loss(const Model& model, const ProblemConfig& cfg,
                        const LossWeights& lw, int n_samples,
                        std::uint64_t batch_tag = 0x10555);

/// Exact weighted RMS loss over all C(m, s) input patterns. Feasible
/// only at small m; throws above m = 20.
double exhaustive_balanced_loss(const Model& model, const ProblemConfig& cfg,
                                const LossWeights& lw);

}  // namespace uand
