#pragma once

#include "uand/types.hpp"

#include <iosfwd>
#include <vector>

namespace uand {

// RNG stream tags; keeps data, init, construction and analysis
// draws independent under one experiment seed.
inline constexpr std::uint64_t kDataStream = 1;
inline constexpr std::uint64_t kInitStream = 2;
inline constexpr std::uint64_t kConstructStream = 3;
inline constexpr std::uint64_t kAnalysisStream = 4;

/// A batch of exactly-s-sparse binary inputs, stored as 0/1 doubles so
/// it can be fed straight into matrix products. inputs is n x m.
struct SampleBatch {
    Matrix inputs;

    int size() const { return static_cast<int>(inputs.rows()); }
};

/// Draw n rows, each a uniformly random s-subset of {0..m-1}, via
/// partial Fisher-Yates. Deterministic in (cfg.seed, batch_index).
SampleBatch sample_batch(const ProblemConfig& cfg, std::uint64_t batch_index, int n);

/// Like sample_batch but with v_i and v_j pinned to the given case and
/// `extra_active` additional active features among the rest.
SampleBatch sample_batch_conditioned(const ProblemConfig& cfg, std::uint64_t batch_index,
                                     int n, int i, int j, bool vi, bool vj,
                                     int extra_active);

/// One row per sample listing its active indices.
void dump_batch_csv(std::ostream& os, const SampleBatch& batch);

}  // namespace uand
