#pragma once

#include <cstdint>
#include <vector>

#include "fidsta/dims.hpp"
#include "fidsta/estimator.hpp"
#include "fidsta/noise.hpp"
#include "fidsta/rng.hpp"

namespace fidsta {

enum class HaarMode { FullVector, StreamingTopK, AnalyticRank };

struct HaarSample {
    Dims dims;
    std::vector<double> top_probs; // descending; top_probs[i] is rank i+1
    HaarMode mode = HaarMode::FullVector;
};

// Top-K ideal probabilities of one Haar-random state (flat Dirichlet via
// normalized unit exponentials). FullVector materializes all D entries;
// StreamingTopK consumes the identical variate stream but retains only a
// K-heap, so the two modes return bit-identical samples for the same engine
// state. AnalyticRank is the deterministic rank-mean model and draws nothing.
HaarSample sample_haar(const Dims& dims, std::uint64_t K, HaarMode mode, Engine& eng);

enum class CountLaw { Poisson, Binomial };

// Independent per-rank counts around S * p_k(f) (no multinomial coupling).
std::vector<std::uint64_t> sample_counts(const Dims& dims, const std::vector<double>& probs,
                                         const NoiseModel& noise, std::uint64_t S,
                                         CountLaw law, Engine& eng);

// Descending stable sort: equal counts keep their input order.
std::vector<std::uint64_t> rerank(std::vector<std::uint64_t> counts);

enum class SuccessStat { Mean, Median };

struct SimConfig {
    Dims dims;
    double true_fidelity = 0.5;
    std::uint64_t shots = 1000;
    std::uint64_t top_k = 500;
    std::uint64_t trials = 100;
    std::uint64_t seed = 1;
    double eps_rel = 0.1;
    CountLaw law = CountLaw::Poisson;
    HaarMode haar_mode = HaarMode::AnalyticRank;
    SuccessStat stat = SuccessStat::Mean;
};

// One synthetic estimation: generative ranks -> noisy counts -> rerank ->
// count MLE over ranks 1..K. Returns the point estimate.
double run_trial(const SimConfig& cfg, Engine& eng);

// cfg.trials trials with counter-derived engines, scheduled in parallel,
// results in trial order.
std::vector<double> run_trials(const SimConfig& cfg, std::uint64_t counter_base = 0);

struct ShotProbe {
    std::uint64_t shots = 0;
    double stat = 0.0; // mean or median of |f_hat - f*| / f*
    bool success = false;
};

struct MinShotsResult {
    std::uint64_t minimal_shots = 0;
    std::vector<ShotProbe> probes;
};

// Geometric expansion to bracket the success threshold, then bisection on
// log2(S) until hi/lo <= 1.1. Every probe reruns cfg.trials fresh trials on
// its own derived streams. Expansion is capped at 2^(n_qubits+4); reaching the
// cap without success raises estimation_error.
MinShotsResult min_shots_bisection(const SimConfig& cfg, std::uint64_t s_lo,
                                   std::uint64_t s_hi);

struct ScalingRow {
    int n_qubits = 0;
    double mean_error = 0.0; // mean |f_hat - f*| over trials
    double std_error = 0.0;  // sample std of |f_hat - f*| / sqrt(M)
};

// Error-vs-size experiment: per system size, M Haar realizations
// at fidelity f_star, probability-MLE over each rank set (large-D form for
// estimator consistency across sizes). Row order: size-major, then rank set.
std::vector<std::vector<ScalingRow>> error_scaling_experiment(
    const std::vector<int>& n_qubits_list, double f_star,
    const std::vector<RankSelection>& rank_sets, std::uint64_t M, std::uint64_t seed);

} // namespace fidsta
