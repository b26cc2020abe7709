#include "uand/datagen.hpp"

#include "uand/rng.hpp"

#include <numeric>
#include <ostream>

namespace uand {

namespace {

// Partial Fisher-Yates: after k steps the first k entries of idx are a
// uniform k-subset of the pool.
template <typename Rng>
void draw_subset(std::vector<int>& idx, int k, Rng& rng) {
    const int n = static_cast<int>(idx.size());
    for (int t = 0; t < k; ++t) {
        std::uniform_int_distribution<int> pick(t, n - 1);
        std::swap(idx[t], idx[pick(rng)]);
    }
}

}  // namespace

SampleBatch sample_batch(const ProblemConfig& cfg, std::uint64_t batch_index, int n) {
    cfg.validate();
    if (n < 1) throw ConfigError("sample_batch: n must be >= 1");

    auto rng = rng_for(cfg.seed, kDataStream, batch_index);
    SampleBatch batch;
    batch.inputs = Matrix::Zero(n, cfg.m);

    std::vector<int> idx(cfg.m);
    for (int r = 0; r < n; ++r) {
        std::iota(idx.begin(), idx.end(), 0);
        draw_subset(idx, cfg.s, rng);
        for (int t = 0; t < cfg.s; ++t) batch.inputs(r, idx[t]) = 1.0;
    }
    return batch;
}

SampleBatch sample_batch_conditioned(const ProblemConfig& cfg, std::uint64_t batch_index,
                                     int n, int i, int j, bool vi, bool vj,
                                     int extra_active) {
    cfg.validate();
    if (n < 1) throw ConfigError("sample_batch_conditioned: n must be >= 1");
    if (i == j || i < 0 || j < 0 || i >= cfg.m || j >= cfg.m)
        throw ConfigError("sample_batch_conditioned: bad pair");
    if (extra_active < 0 || extra_active > cfg.m - 2)
        throw ConfigError("sample_batch_conditioned: bad extra_active");

    auto rng = rng_for(cfg.seed, kDataStream, batch_index);
    SampleBatch batch;
    batch.inputs = Matrix::Zero(n, cfg.m);

    std::vector<int> others;
    others.reserve(cfg.m - 2);
    for (int k = 0; k < cfg.m; ++k)
        if (k != i && k != j) others.push_back(k);

    std::vector<int> idx;
    for (int r = 0; r < n; ++r) {
        if (vi) batch.inputs(r, i) = 1.0;
        if (vj) batch.inputs(r, j) = 1.0;
        idx = others;
        draw_subset(idx, extra_active, rng);
        for (int t = 0; t < extra_active; ++t) batch.inputs(r, idx[t]) = 1.0;
    }
    return batch;
}

void dump_batch_csv(std::ostream& os, const SampleBatch& batch) {
    os << "active_indices\n";
    for (int r = 0; r < batch.size(); ++r) {
        bool first = true;
        for (int c = 0; c < batch.inputs.cols(); ++c) {
            if (batch.inputs(r, c) != 0.0) {
                os << (first ? "" : " ") << c;
                first = false;
            }
        }
        os << "\n";
    }
}

}  // namespace uand
