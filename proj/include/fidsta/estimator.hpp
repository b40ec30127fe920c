#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "fidsta/dims.hpp"
#include "fidsta/noise.hpp"
#include "fidsta/orderstat.hpp"

namespace fidsta {

// One circuit realization. counts[i] is the count of the rank-(i+1) bitstring;
// probs[i] the empirical (or synthetic) probability. Counts are the source of
// truth for measured data; synthetic probability-only records leave counts
// empty and set shots to 0.
struct MeasurementRecord {
    std::string circuit_id;
    std::uint64_t shots = 0;
    std::vector<std::uint64_t> counts;
    std::vector<double> probs;
    bool truncated = false;

    bool has_counts() const { return !counts.empty(); }
    bool has_probs() const { return !probs.empty(); }
    std::size_t num_ranks() const { return has_counts() ? counts.size() : probs.size(); }

    // Enforces: counts non-increasing, sum(counts) <= shots, probs == counts/shots
    // within 1e-12 when both are present.
    void validate() const;
};

struct RankSelection {
    std::vector<std::uint32_t> ranks; // sorted, unique, 1-based
    std::string description;

    // Accepts "1..20" and "1,5,9,13"; single integers are a one-element set.
    static RankSelection parse(const std::string& text);
    static RankSelection contiguous(std::uint32_t lo, std::uint32_t hi);
};

enum class EstimatorMethod { ProbabilityMLE, CountMLE };

struct LikelihoodCurve {
    std::vector<std::pair<double, double>> grid; // (f, lnL), -inf where infeasible
    double f_hat = 0.0;
    double width = 0.0; // NaN when the maximum sits on a boundary
    bool boundary = false;
    EstimatorMethod method = EstimatorMethod::ProbabilityMLE;
};

struct EstimationResult {
    double f_hat = 0.0;
    double width = 0.0;
    bool boundary = false;
    EstimatorMethod method = EstimatorMethod::ProbabilityMLE;
    RankSelection ranks_used;
    std::vector<std::string> circuits_used;
    JacobianMode jacobian_mode = JacobianMode::WithJacobian;
};

// Probability-based log-likelihood: sum over records and selected ranks of
// ln P_k(p_k; f). Holds the rank pdfs so a maximization loop pays the series
// setup once. f=0 is the degenerate channel: -inf unless every selected
// observation equals 1/D exactly (then +inf, a boundary maximum at 0).
class ProbLikelihood {
  public:
    ProbLikelihood(const std::vector<MeasurementRecord>& records, RankSelection sel,
                   Dims dims, PdfForm form,
                   JacobianMode mode = JacobianMode::WithJacobian);

    double operator()(double f) const;

    const RankSelection& selection() const { return sel_; }

  private:
    const std::vector<MeasurementRecord>* records_;
    RankSelection sel_;
    Dims dims_;
    JacobianMode mode_;
    std::vector<std::shared_ptr<const RankPdf>> pdfs_; // parallel to sel_.ranks
};

// Count-based log-likelihood for one record: sum over selected ranks of
// n_k ln p_k(f) - S p_k(f), with the plug-in rate p_k(f) = f<p_k> + (1-f)/D.
// The f-independent ln(n_k!) terms are dropped.
class CountLikelihood {
  public:
    CountLikelihood(const MeasurementRecord& record, RankSelection sel, Dims dims);

    double operator()(double f) const;

  private:
    std::vector<double> means_;  // ideal <p_k> per selected rank
    std::vector<double> counts_; // n_k per selected rank
    double shots_;
    double inv_d_;
};

// Free-function forms of the two likelihoods (convenience wrappers).
double log_likelihood_prob(const std::vector<MeasurementRecord>& records,
                           const RankSelection& sel, const Dims& dims, double f,
                           PdfForm form, JacobianMode mode = JacobianMode::WithJacobian);
double log_likelihood_count(const MeasurementRecord& record, const RankSelection& sel,
                            const Dims& dims, double f);

// Coarse grid (default 200 points on [0,1]) to find the feasible region, then
// golden-section to |df| <= 1e-4, then a three-point curvature width
// 1/sqrt(-d2 lnL). Boundary maxima carry width = NaN and the boundary flag.
// Grid ties within 1e-12 resolve to the smallest f.
LikelihoodCurve maximize(const std::function<double(double)>& lnL,
                         EstimatorMethod method, int grid_n = 200);

// Averaging schemes: likelihood summed across circuits at one
// rank, or across ranks within one circuit. curve_out, when non-null, receives
// the full grid scan for plotting.
EstimationResult estimate_fixed_rank(const std::vector<MeasurementRecord>& records,
                                     std::uint32_t k, Dims dims, EstimatorMethod method,
                                     PdfForm form = PdfForm::ExactSeries,
                                     JacobianMode mode = JacobianMode::WithJacobian,
                                     int grid_n = 200, LikelihoodCurve* curve_out = nullptr);
EstimationResult estimate_single_circuit(const MeasurementRecord& record,
                                         const RankSelection& sel, Dims dims,
                                         EstimatorMethod method,
                                         PdfForm form = PdfForm::ExactSeries,
                                         JacobianMode mode = JacobianMode::WithJacobian,
                                         int grid_n = 200, LikelihoodCurve* curve_out = nullptr);

} // namespace fidsta
