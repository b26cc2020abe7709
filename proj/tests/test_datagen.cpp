#include "uand/datagen.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace uand;

TEST_CASE("sample_batch: s = m gives all-ones rows") {
    ProblemConfig cfg{.m = 7, .d = 1, .s = 7, .seed = 1};
    auto b = sample_batch(cfg, 0, 20);
    CHECK(b.inputs.sum() == doctest::Approx(7.0 * 20));
}

TEST_CASE("sample_batch: s = 0 gives all-zero rows") {
    ProblemConfig cfg{.m = 7, .d = 1, .s = 0, .seed = 1};
    auto b = sample_batch(cfg, 0, 20);
    CHECK(b.inputs.sum() == 0.0);
}

TEST_CASE("sample_batch: every row has exactly s ones") {
    ProblemConfig cfg{.m = 23, .d = 1, .s = 5, .seed = 42};
    auto b = sample_batch(cfg, 3, 200);
    for (int r = 0; r < b.size(); ++r) {
        CHECK(b.inputs.row(r).sum() == doctest::Approx(5.0));
        for (int c = 0; c < cfg.m; ++c) {
            const double v = b.inputs(r, c);
            CHECK((v == 0.0 || v == 1.0));
        }
    }
}

TEST_CASE("sample_batch: marginal activation frequency is s/m") {
    ProblemConfig cfg{.m = 100, .d = 1, .s = 3, .seed = 7};
    const int n = 100000;
    auto b = sample_batch(cfg, 0, n);
    const double p = 0.03;
    const double sigma = std::sqrt(p * (1 - p) / n);
    int outside = 0;
    for (int c = 0; c < cfg.m; ++c) {
        const double freq = b.inputs.col(c).mean();
        if (std::abs(freq - p) > 3 * sigma) ++outside;
    }
    // 100 features at 3 sigma each: a couple of excursions are expected noise.
    CHECK(outside <= 2);
}

TEST_CASE("sample_batch: deterministic in (seed, batch_index)") {
    ProblemConfig cfg{.m = 31, .d = 1, .s = 4, .seed = 99};
    auto a = sample_batch(cfg, 5, 64);
    auto b = sample_batch(cfg, 5, 64);
    CHECK((a.inputs - b.inputs).norm() == 0.0);
    auto c = sample_batch(cfg, 6, 64);
    CHECK((a.inputs - c.inputs).norm() != 0.0);
    cfg.seed = 100;
    auto e = sample_batch(cfg, 5, 64);
    CHECK((a.inputs - e.inputs).norm() != 0.0);
}

TEST_CASE("sample_batch: invalid args throw") {
    ProblemConfig cfg{.m = 4, .d = 1, .s = 5, .seed = 0};
    CHECK_THROWS_AS(sample_batch(cfg, 0, 10), ConfigError);
    cfg.s = 2;
    CHECK_THROWS_AS(sample_batch(cfg, 0, 0), ConfigError);
}

TEST_CASE("sample_batch_conditioned pins the pair and the extra count") {
    ProblemConfig cfg{.m = 12, .d = 1, .s = 3, .seed = 5};
    auto b = sample_batch_conditioned(cfg, 0, 100, 2, 7, true, false, 2);
    for (int r = 0; r < b.size(); ++r) {
        CHECK(b.inputs(r, 2) == 1.0);
        CHECK(b.inputs(r, 7) == 0.0);
        CHECK(b.inputs.row(r).sum() == doctest::Approx(3.0));
    }
}

TEST_CASE("dump_batch_csv lists active indices") {
    ProblemConfig cfg{.m = 5, .d = 1, .s = 5, .seed = 0};
    auto b = sample_batch(cfg, 0, 1);
    std::ostringstream os;
    dump_batch_csv(os, b);
    CHECK(os.str() == "active_indices\n0 1 2 3 4\n");
}
