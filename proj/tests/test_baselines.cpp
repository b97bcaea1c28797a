#include <catch2/catch_amalgamated.hpp>

#include "mdsense/baselines.hpp"

using namespace mdsense;

namespace {

double pattern_mc(const SamplingPattern& p, const FourierMatrix& f) {
    return mutual_coherence(build_sensing_matrix(p, f));
}

}  // namespace

TEST_CASE("random_select fills forced choices and degenerate budgets", "[baselines]") {
    const FourierMatrix f(4);
    Rng rng(1);
    const CommPattern comm{{0}};
    const SamplingPattern p = random_select(comm, SelectorBudget(4, 4), rng);
    CHECK(p.sensing == std::vector<int>{1, 2, 3});

    const CommPattern full{{0, 1, 2}};
    const SamplingPattern q = random_select(full, SelectorBudget(3, 4), rng);
    CHECK(q.sensing.empty());
    CHECK(q.comm == full.slots);

    // comm larger than the budget also yields an empty sensing set
    const SamplingPattern r = random_select(full, SelectorBudget(2, 4), rng);
    CHECK(r.sensing.empty());
}

TEST_CASE("random_select is uniform over idle slots", "[baselines]") {
    const int w = 64, m = 8;
    const CommPattern comm{{10, 40}};
    Rng rng(2024);
    const int draws = 100000;
    std::vector<long> hits(w, 0);
    for (int t = 0; t < draws; ++t) {
        const SamplingPattern p = random_select(comm, SelectorBudget(m, w), rng);
        REQUIRE(static_cast<int>(p.sensing.size()) == m - 2);
        for (int s : p.sensing) ++hits[s];
    }
    // every idle slot is a Bernoulli(6/62) per draw; 3-sigma binomial bounds
    const double p_slot = 6.0 / 62.0;
    const double mean = draws * p_slot;
    const double sigma = std::sqrt(draws * p_slot * (1.0 - p_slot));
    for (int s = 0; s < w; ++s) {
        if (comm.contains(s)) {
            CHECK(hits[s] == 0);
        } else {
            CHECK(std::abs(hits[s] - mean) < 3.0 * sigma);
        }
    }
}

TEST_CASE("mcsfs matches exhaustive search on a small instance", "[baselines]") {
    const int w = 4;
    const FourierMatrix f(w);
    const CommPattern comm{{0}};
    const SamplingPattern greedy = mcsfs_select(comm, SelectorBudget(2, w), f);

    double best = std::numeric_limits<double>::infinity();
    int best_slot = -1;
    for (int cand : {1, 2, 3}) {
        const double mc = pattern_mc(SamplingPattern::create({0}, {cand}, w), f);
        if (mc < best - 1e-15) {
            best = mc;
            best_slot = cand;
        }
    }
    REQUIRE(greedy.sensing.size() == 1);
    CHECK(pattern_mc(greedy, f) == Catch::Approx(best).margin(1e-14));
    CHECK(greedy.sensing[0] == best_slot);
}

TEST_CASE("mcsfs beats the median random pattern", "[baselines]") {
    const int w = 8, m = 3;
    const FourierMatrix f(w);
    const CommPattern comm{{}};
    const SamplingPattern greedy = mcsfs_select(comm, SelectorBudget(m, w), f);
    const double greedy_mc = pattern_mc(greedy, f);

    Rng rng(5);
    std::vector<double> random_mcs;
    for (int t = 0; t < 1000; ++t)
        random_mcs.push_back(pattern_mc(random_select(comm, SelectorBudget(m, w), rng), f));
    std::sort(random_mcs.begin(), random_mcs.end());
    CHECK(greedy_mc <= random_mcs[random_mcs.size() / 2]);
}

TEST_CASE("mcsfs with a saturated budget returns comm unchanged", "[baselines]") {
    const FourierMatrix f(8);
    const CommPattern comm{{1, 3, 6}};
    const SamplingPattern p = mcsfs_select(comm, SelectorBudget(3, 8), f);
    CHECK(p.comm == comm.slots);
    CHECK(p.sensing.empty());
}

TEST_CASE("mcsfs is deterministic", "[baselines]") {
    const FourierMatrix f(32);
    const CommPattern comm{{4, 5}};
    const SamplingPattern a = mcsfs_select(comm, SelectorBudget(8, 32), f);
    const SamplingPattern b = mcsfs_select(comm, SelectorBudget(8, 32), f);
    CHECK(a.sensing == b.sensing);
}

TEST_CASE("rmcrs with one candidate equals random_select on the same rng", "[baselines]") {
    const int w = 32;
    const FourierMatrix f(w);
    const CommPattern comm{{2, 9}};
    const CplxVec prev(w, Cplx(1.0, 0.0));  // dense support
    Rng a(42), b(42);
    const SamplingPattern via_rmcrs = rmcrs_select(comm, SelectorBudget(8, w), prev, 1, f, a);
    const SamplingPattern via_random = random_select(comm, SelectorBudget(8, w), b);
    CHECK(via_rmcrs.sensing == via_random.sensing);
}

TEST_CASE("rmcrs on a dense support minimizes full coherence over its candidates", "[baselines]") {
    const int w = 32;
    const FourierMatrix f(w);
    const CommPattern comm{{0}};
    const CplxVec dense(w, Cplx(0.5, -0.5));
    const int candidates = 50;

    Rng pick_rng(7);
    const SamplingPattern chosen =
        rmcrs_select(comm, SelectorBudget(6, w), dense, candidates, f, pick_rng);

    // replay the identical candidate stream
    Rng replay_rng(7);
    double best = std::numeric_limits<double>::infinity();
    for (int c = 0; c < candidates; ++c)
        best = std::min(best, pattern_mc(random_select(comm, SelectorBudget(6, w), replay_rng), f));
    CHECK(pattern_mc(chosen, f) == Catch::Approx(best).margin(1e-14));
}

TEST_CASE("rmcrs restricted scoring matches brute force over the replayed stream", "[baselines]") {
    const int w = 16;
    const FourierMatrix f(w);
    const CommPattern comm{{}};
    CplxVec prev(w, Cplx(0.0, 0.0));
    prev[3] = Cplx(1.0, 0.0);
    prev[11] = Cplx(0.0, 2.0);  // support {3, 11}
    const int candidates = 64;

    Rng pick_rng(99);
    const SamplingPattern chosen =
        rmcrs_select(comm, SelectorBudget(4, w), prev, candidates, f, pick_rng);

    Rng replay_rng(99);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_sensing;
    for (int c = 0; c < candidates; ++c) {
        const SamplingPattern cand = random_select(comm, SelectorBudget(4, w), replay_rng);
        const double score = restricted_mutual_coherence(build_sensing_matrix(cand, f), {3, 11});
        if (score < best) {
            best = score;
            best_sensing = cand.sensing;
        }
    }
    CHECK(chosen.sensing == best_sensing);
}

TEST_CASE("rmcrs falls back to full coherence for tiny supports", "[baselines]") {
    const int w = 16;
    const FourierMatrix f(w);
    const CommPattern comm{{}};
    CplxVec prev(w, Cplx(0.0, 0.0));
    prev[5] = Cplx(3.0, 0.0);  // |U| = 1

    Rng pick_rng(13);
    const SamplingPattern chosen = rmcrs_select(comm, SelectorBudget(4, w), prev, 32, f, pick_rng);

    Rng replay_rng(13);
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> best_sensing;
    for (int c = 0; c < 32; ++c) {
        const SamplingPattern cand = random_select(comm, SelectorBudget(4, w), replay_rng);
        const double score = pattern_mc(cand, f);
        if (score < best) {
            best = score;
            best_sensing = cand.sensing;
        }
    }
    CHECK(chosen.sensing == best_sensing);
    CHECK_THROWS_AS(rmcrs_select(comm, SelectorBudget(4, w), prev, 0, f, pick_rng),
                    std::invalid_argument);
}

TEST_CASE("all selectors respect the pattern invariants", "[baselines]") {
    const int w = 64;
    const FourierMatrix f(w);
    Rng rng(314);
    const CplxVec prev(w, Cplx(1.0, 1.0));
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<int> comm_slots;
        for (int s = 0; s < w; ++s)
            if (rng() % 16 == 0) comm_slots.push_back(s);
        const CommPattern comm{comm_slots};
        const SelectorBudget budget(8, w);
        const int expected =
            comm.size() >= 8 ? comm.size() : 8;  // min(M, |M_c| + idle) with idle >= M - |M_c|
        for (const SamplingPattern& p :
             {random_select(comm, budget, rng), mcsfs_select(comm, budget, f),
              rmcrs_select(comm, budget, prev, 10, f, rng)}) {
            p.validate();
            CHECK(p.sample_count() == expected);
        }
    }
}

TEST_CASE("mcsfs final coherence beats random in most seeded trials", "[baselines]") {
    const int w = 64;
    const FourierMatrix f(w);
    const TrafficModel traffic(w, 4.0, 1.0);
    Rng traffic_rng(2718);
    Rng random_rng(161);
    int wins = 0;
    const int trials = 120;
    for (int t = 0; t < trials; ++t) {
        const CommPattern comm = sample_comm_pattern(traffic, traffic_rng);
        if (comm.size() >= 8) continue;
        const double greedy_mc = pattern_mc(mcsfs_select(comm, SelectorBudget(8, w), f), f);
        const double random_mc = pattern_mc(random_select(comm, SelectorBudget(8, w), random_rng), f);
        if (greedy_mc <= random_mc) ++wins;
    }
    CHECK(wins >= trials * 9 / 10);
}
