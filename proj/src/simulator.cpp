#include "fidsta/simulator.hpp"

#include <algorithm>
#include <cmath>

#include "fidsta/errors.hpp"
#include "fidsta/parallel.hpp"
#include "fidsta/reduce.hpp"

namespace fidsta {

namespace {

// Shared by both sampling modes so their streams and roundings agree exactly:
// draw D exponentials in index order, Neumaier-accumulate the total.
struct NeumaierSum {
    double sum = 0.0, comp = 0.0;

    void add(double term) {
        const double t = sum + term;
        if (std::abs(sum) >= std::abs(term))
            comp += (sum - t) + term;
        else
            comp += (term - t) + sum;
        sum = t;
    }

    double value() const { return sum + comp; }
};

} // namespace

HaarSample sample_haar(const Dims& dims, std::uint64_t K, HaarMode mode, Engine& eng) {
    if (K < 1 || K > dims.dim) throw config_error("sample_haar: K out of range");
    HaarSample out;
    out.dims = dims;
    out.mode = mode;

    switch (mode) {
        case HaarMode::AnalyticRank: {
            out.top_probs.resize(K);
            for (std::uint64_t i = 0; i < K; ++i)
                out.top_probs[i] = digamma_mean(dims, i + 1);
            return out;
        }
        case HaarMode::FullVector: {
            if (dims.dim > (std::uint64_t(1) << 20))
                throw config_error("FullVector mode is limited to D <= 2^20");
            std::vector<double> e(dims.dim);
            NeumaierSum total;
            for (std::uint64_t i = 0; i < dims.dim; ++i) {
                e[i] = exp_variate(eng);
                total.add(e[i]);
            }
            std::sort(e.begin(), e.end(), std::greater<double>());
            const double norm = total.value();
            out.top_probs.resize(K);
            for (std::uint64_t i = 0; i < K; ++i) out.top_probs[i] = e[i] / norm;
            return out;
        }
        case HaarMode::StreamingTopK: {
            if (dims.dim > (std::uint64_t(1) << 34))
                throw config_error("StreamingTopK mode is limited to D <= 2^34");
            // min-heap of the K largest exponentials seen so far
            std::vector<double> heap;
            heap.reserve(K);
            NeumaierSum total;
            auto cmp = std::greater<double>(); // std::*_heap with greater = min-heap
            for (std::uint64_t i = 0; i < dims.dim; ++i) {
                const double v = exp_variate(eng);
                total.add(v);
                if (heap.size() < K) {
                    heap.push_back(v);
                    std::push_heap(heap.begin(), heap.end(), cmp);
                } else if (v > heap.front()) {
                    std::pop_heap(heap.begin(), heap.end(), cmp);
                    heap.back() = v;
                    std::push_heap(heap.begin(), heap.end(), cmp);
                }
            }
            std::sort(heap.begin(), heap.end(), std::greater<double>());
            const double norm = total.value();
            out.top_probs.resize(K);
            for (std::uint64_t i = 0; i < K; ++i) out.top_probs[i] = heap[i] / norm;
            return out;
        }
    }
    throw config_error("sample_haar: unknown mode");
}

std::vector<std::uint64_t> sample_counts(const Dims& dims, const std::vector<double>& probs,
                                         const NoiseModel& noise, std::uint64_t S,
                                         CountLaw law, Engine& eng) {
    if (S < 1) throw config_error("sample_counts: S must be >= 1");
    std::vector<std::uint64_t> counts(probs.size());
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double pf = apply_noise(probs[i], noise, dims);
        if (law == CountLaw::Poisson)
            counts[i] = poisson_variate(eng, static_cast<double>(S) * pf);
        else
            counts[i] = binomial_variate(eng, S, pf);
    }
    return counts;
}

std::vector<std::uint64_t> rerank(std::vector<std::uint64_t> counts) {
    std::stable_sort(counts.begin(), counts.end(), std::greater<std::uint64_t>());
    return counts;
}

double run_trial(const SimConfig& cfg, Engine& eng) {
    const HaarSample sample = sample_haar(cfg.dims, cfg.top_k, cfg.haar_mode, eng);
    const NoiseModel noise(cfg.true_fidelity);
    std::vector<std::uint64_t> counts =
        rerank(sample_counts(cfg.dims, sample.top_probs, noise, cfg.shots, cfg.law, eng));

    MeasurementRecord rec;
    rec.circuit_id = "trial";
    rec.shots = cfg.shots;
    // The reranked counts may exceed shots in total (independent per-rank
    // sampling); the record is a modeling construct here, not measured data.
    rec.counts = std::move(counts);

    CountLikelihood lik(rec, RankSelection::contiguous(1, static_cast<std::uint32_t>(rec.counts.size())),
                        cfg.dims);
    const LikelihoodCurve curve =
        maximize([&](double f) { return lik(f); }, EstimatorMethod::CountMLE);
    return curve.f_hat;
}

std::vector<double> run_trials(const SimConfig& cfg, std::uint64_t counter_base) {
    std::vector<double> f_hats(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t t) {
        Engine eng = make_engine(cfg.seed, counter_base + t);
        f_hats[t] = run_trial(cfg, eng);
    });
    return f_hats;
}

namespace {

double success_stat(std::vector<double> rel_errors, SuccessStat stat) {
    if (stat == SuccessStat::Mean)
        return pairwise_sum(rel_errors) / static_cast<double>(rel_errors.size());
    std::sort(rel_errors.begin(), rel_errors.end());
    const std::size_t n = rel_errors.size();
    return n % 2 == 1 ? rel_errors[n / 2]
                      : 0.5 * (rel_errors[n / 2 - 1] + rel_errors[n / 2]);
}

} // namespace

MinShotsResult min_shots_bisection(const SimConfig& cfg, std::uint64_t s_lo,
                                   std::uint64_t s_hi) {
    if (!(cfg.true_fidelity > 0.0))
        throw config_error("min_shots_bisection needs f* > 0 for relative errors");
    if (s_lo < 1 || s_hi <= s_lo) throw config_error("need 1 <= s_lo < s_hi");
    const std::uint64_t ceiling = std::uint64_t(1) << (cfg.dims.n_qubits + 4);

    MinShotsResult out;
    std::uint64_t probe_counter = 0;
    auto probe = [&](std::uint64_t S) {
        SimConfig c = cfg;
        c.shots = S;
        // fresh, reproducible streams per probe: counter = probe# * 2^32 + trial
        const std::vector<double> f_hats = run_trials(c, probe_counter << 32);
        ++probe_counter;
        std::vector<double> rel(f_hats.size());
        for (std::size_t i = 0; i < f_hats.size(); ++i)
            rel[i] = std::abs(f_hats[i] - cfg.true_fidelity) / cfg.true_fidelity;
        ShotProbe p{S, success_stat(std::move(rel), cfg.stat), false};
        p.success = p.stat <= cfg.eps_rel;
        out.probes.push_back(p);
        return p.success;
    };

    // establish a failing lower and a succeeding upper bound
    bool hi_ok = probe(s_hi);
    while (!hi_ok) {
        if (s_hi >= ceiling)
            throw estimation_error("threshold unattainable: failed at the ceiling S=2^" +
                                   std::to_string(cfg.dims.n_qubits + 4));
        s_lo = s_hi;
        s_hi = std::min(ceiling, s_hi * 2);
        hi_ok = probe(s_hi);
    }
    if (probe(s_lo)) {
        // the assumed-failing floor already succeeds; walk it down instead
        while (s_lo > 4) {
            const std::uint64_t lower = s_lo / 2;
            if (!probe(lower)) {
                s_hi = s_lo;
                s_lo = lower;
                break;
            }
            s_hi = s_lo = lower;
        }
        if (s_hi == s_lo) { // successful all the way down
            out.minimal_shots = s_lo;
            return out;
        }
    }

    while (static_cast<double>(s_hi) / static_cast<double>(s_lo) > 1.1 && s_hi - s_lo > 1) {
        const std::uint64_t mid = std::clamp<std::uint64_t>(
            static_cast<std::uint64_t>(
                std::llround(std::sqrt(static_cast<double>(s_lo) * static_cast<double>(s_hi)))),
            s_lo + 1, s_hi - 1);
        if (probe(mid))
            s_hi = mid;
        else
            s_lo = mid;
    }
    out.minimal_shots = s_hi;
    return out;
}

std::vector<std::vector<ScalingRow>> error_scaling_experiment(
    const std::vector<int>& n_qubits_list, double f_star,
    const std::vector<RankSelection>& rank_sets, std::uint64_t M, std::uint64_t seed) {
    if (rank_sets.empty()) throw config_error("need at least one rank set");
    std::uint32_t max_rank = 0;
    for (const auto& s : rank_sets) {
        if (s.ranks.empty()) throw config_error("empty rank set");
        max_rank = std::max(max_rank, s.ranks.back());
    }

    std::vector<std::vector<ScalingRow>> table(rank_sets.size());
    for (auto& rows : table) rows.resize(n_qubits_list.size());

    for (std::size_t ni = 0; ni < n_qubits_list.size(); ++ni) {
        const Dims dims = Dims::from_qubits(n_qubits_list[ni]);
        const NoiseModel noise(f_star);
        // realization scatter needs real sampling; fall back by dimension
        const HaarMode mode = dims.dim <= (std::uint64_t(1) << 20) ? HaarMode::FullVector
                              : dims.dim <= (std::uint64_t(1) << 34)
                                  ? HaarMode::StreamingTopK
                                  : HaarMode::AnalyticRank;
        // errors[set][trial]
        std::vector<std::vector<double>> errors(rank_sets.size(),
                                                std::vector<double>(M));
        parallel_for(M, [&](std::size_t m) {
            Engine eng = make_engine(seed, (static_cast<std::uint64_t>(ni) << 32) + m);
            const HaarSample sample = sample_haar(dims, max_rank, mode, eng);
            MeasurementRecord rec;
            rec.circuit_id = "haar";
            rec.probs.resize(sample.top_probs.size());
            for (std::size_t i = 0; i < sample.top_probs.size(); ++i)
                rec.probs[i] = apply_noise(sample.top_probs[i], noise, dims);
            for (std::size_t si = 0; si < rank_sets.size(); ++si) {
                const EstimationResult res = estimate_single_circuit(
                    rec, rank_sets[si], dims, EstimatorMethod::ProbabilityMLE,
                    PdfForm::LargeDApprox);
                errors[si][m] = std::abs(res.f_hat - f_star);
            }
        });
        for (std::size_t si = 0; si < rank_sets.size(); ++si) {
            const double mean = pairwise_sum(errors[si]) / static_cast<double>(M);
            double sq = 0.0;
            if (M > 1) {
                std::vector<double> dev(M);
                for (std::size_t m = 0; m < M; ++m) {
                    const double d = errors[si][m] - mean;
                    dev[m] = d * d;
                }
                sq = std::sqrt(pairwise_sum(dev) / static_cast<double>(M - 1)) /
                     std::sqrt(static_cast<double>(M));
            }
            table[si][ni] = ScalingRow{n_qubits_list[ni], mean, sq};
        }
    }
    return table;
}

} // namespace fidsta
