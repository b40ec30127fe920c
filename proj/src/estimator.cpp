#include "fidsta/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "fidsta/errors.hpp"
#include "fidsta/reduce.hpp"

namespace fidsta {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
} // namespace

void MeasurementRecord::validate() const {
    if (!has_counts() && !has_probs())
        throw parse_error("record '" + circuit_id + "': no counts and no probabilities");
    if (has_counts()) {
        std::uint64_t total = 0;
        for (std::size_t i = 0; i < counts.size(); ++i) {
            if (i > 0 && counts[i] > counts[i - 1])
                throw parse_error("record '" + circuit_id + "': counts not sorted at rank " +
                                  std::to_string(i + 1));
            total += counts[i];
        }
        if (shots == 0)
            throw parse_error("record '" + circuit_id + "': counts present but shots=0");
        if (total > shots)
            throw parse_error("record '" + circuit_id + "': retained counts exceed shots");
        if (has_probs()) {
            if (probs.size() != counts.size())
                throw parse_error("record '" + circuit_id + "': probs/counts length mismatch");
            for (std::size_t i = 0; i < counts.size(); ++i) {
                const double expect = static_cast<double>(counts[i]) / static_cast<double>(shots);
                if (std::abs(probs[i] - expect) > 1e-12)
                    throw parse_error("record '" + circuit_id + "': probs[" +
                                      std::to_string(i) + "] != n/S");
            }
        }
    }
}

RankSelection RankSelection::contiguous(std::uint32_t lo, std::uint32_t hi) {
    if (lo < 1 || hi < lo) throw config_error("bad rank range");
    RankSelection sel;
    for (std::uint32_t k = lo; k <= hi; ++k) sel.ranks.push_back(k);
    sel.description = std::to_string(lo) + ".." + std::to_string(hi);
    return sel;
}

RankSelection RankSelection::parse(const std::string& text) {
    const auto dots = text.find("..");
    try {
        if (dots != std::string::npos) {
            const std::uint32_t lo = std::stoul(text.substr(0, dots));
            const std::uint32_t hi = std::stoul(text.substr(dots + 2));
            return contiguous(lo, hi);
        }
        RankSelection sel;
        std::size_t pos = 0;
        while (pos < text.size()) {
            std::size_t used = 0;
            const unsigned long v = std::stoul(text.substr(pos), &used);
            if (v < 1) throw config_error("ranks are 1-based");
            sel.ranks.push_back(static_cast<std::uint32_t>(v));
            pos += used;
            if (pos < text.size()) {
                if (text[pos] != ',') throw config_error("bad rank list");
                ++pos;
            }
        }
        if (sel.ranks.empty()) throw config_error("empty rank selection");
        std::sort(sel.ranks.begin(), sel.ranks.end());
        sel.ranks.erase(std::unique(sel.ranks.begin(), sel.ranks.end()), sel.ranks.end());
        sel.description = text;
        return sel;
    } catch (const std::invalid_argument&) {
        throw config_error("cannot parse rank selection '" + text + "'");
    } catch (const std::out_of_range&) {
        throw config_error("rank out of range in '" + text + "'");
    }
}

ProbLikelihood::ProbLikelihood(const std::vector<MeasurementRecord>& records,
                               RankSelection sel, Dims dims, PdfForm form,
                               JacobianMode mode)
    : records_(&records), sel_(std::move(sel)), dims_(dims), mode_(mode) {
    if (records.empty()) throw config_error("no records");
    if (sel_.ranks.empty()) throw config_error("empty rank selection");
    for (const auto& rec : records) {
        if (!rec.has_probs())
            throw config_error("record '" + rec.circuit_id +
                               "' has no probabilities; probability MLE needs them");
        if (sel_.ranks.back() > rec.num_ranks())
            throw config_error("record '" + rec.circuit_id + "' lacks rank " +
                               std::to_string(sel_.ranks.back()));
    }
    pdfs_.reserve(sel_.ranks.size());
    for (std::uint32_t k : sel_.ranks)
        pdfs_.push_back(std::make_shared<const RankPdf>(dims_, k, form));
}

double ProbLikelihood::operator()(double f) const {
    if (!(f >= 0.0 && f <= 1.0)) return -kInf;
    const double inv_d = 1.0 / dims_.d();
    if (f == 0.0) {
        for (const auto& rec : *records_)
            for (std::uint32_t k : sel_.ranks)
                if (rec.probs[k - 1] != inv_d) return -kInf;
        return kInf; // point mass reproduced exactly: boundary maximum at f=0
    }
    const double shift = (1.0 - f) * inv_d;
    const double ln_f = std::log(f);
    std::vector<double> terms;
    terms.reserve(records_->size() * sel_.ranks.size());
    for (const auto& rec : *records_) {
        for (std::size_t i = 0; i < sel_.ranks.size(); ++i) {
            const double x = rec.probs[sel_.ranks[i] - 1];
            const double xf = (x - shift) / f;
            const double v = pdfs_[i]->pdf(xf);
            if (!(v > 0.0)) return -kInf; // outside the deformed support
            double term = std::log(v);
            if (mode_ == JacobianMode::WithJacobian) term -= ln_f;
            terms.push_back(term);
        }
    }
    return pairwise_sum(terms);
}

CountLikelihood::CountLikelihood(const MeasurementRecord& record, RankSelection sel,
                                 Dims dims) {
    if (!record.has_counts())
        throw config_error("record '" + record.circuit_id +
                           "' has no counts; count MLE needs them");
    if (sel.ranks.empty()) throw config_error("empty rank selection");
    if (sel.ranks.back() > record.counts.size())
        throw config_error("record '" + record.circuit_id + "' lacks rank " +
                           std::to_string(sel.ranks.back()));
    shots_ = static_cast<double>(record.shots);
    inv_d_ = 1.0 / dims.d();
    means_.reserve(sel.ranks.size());
    counts_.reserve(sel.ranks.size());
    for (std::uint32_t k : sel.ranks) {
        means_.push_back(digamma_mean(dims, k));
        counts_.push_back(static_cast<double>(record.counts[k - 1]));
    }
}

double CountLikelihood::operator()(double f) const {
    if (!(f >= 0.0 && f <= 1.0)) return -kInf;
    std::vector<double> terms(means_.size());
    for (std::size_t i = 0; i < means_.size(); ++i) {
        const double rate = f * means_[i] + (1.0 - f) * inv_d_;
        // rate > 0 on [0,1): means_ >= 1/D keeps it positive at f=1 as well
        terms[i] = counts_[i] * std::log(rate) - shots_ * rate;
    }
    return pairwise_sum(terms);
}

double log_likelihood_prob(const std::vector<MeasurementRecord>& records,
                           const RankSelection& sel, const Dims& dims, double f,
                           PdfForm form, JacobianMode mode) {
    return ProbLikelihood(records, sel, dims, form, mode)(f);
}

double log_likelihood_count(const MeasurementRecord& record, const RankSelection& sel,
                            const Dims& dims, double f) {
    return CountLikelihood(record, sel, dims)(f);
}

namespace {

double golden_section(const std::function<double(double)>& fn, double a, double b) {
    // assumes a single interior maximum inside [a,b]
    constexpr double phi = 0.6180339887498949;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = fn(x1), f2 = fn(x2);
    while (b - a > 1e-4) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = fn(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = fn(x1);
        }
    }
    return 0.5 * (a + b);
}

} // namespace

LikelihoodCurve maximize(const std::function<double(double)>& lnL,
                         EstimatorMethod method, int grid_n) {
    if (grid_n < 3) throw config_error("grid must have at least 3 points");
    LikelihoodCurve curve;
    curve.method = method;
    curve.grid.reserve(grid_n);
    int best = -1;
    double best_val = -kInf;
    bool any_finite = false;
    for (int i = 0; i < grid_n; ++i) {
        const double f = static_cast<double>(i) / (grid_n - 1);
        double v = lnL(f);
        if (std::isnan(v)) v = -kInf;
        curve.grid.emplace_back(f, v);
        if (v == kInf) { // degenerate point-mass fit; boundary maximum
            curve.f_hat = f;
            curve.width = kNaN;
            curve.boundary = true;
            return curve;
        }
        if (std::isfinite(v)) any_finite = true;
        // ties within 1e-12 keep the smallest f
        if (v > best_val + 1e-12 || (best < 0 && v > -kInf)) {
            best = i;
            best_val = v;
        }
    }
    if (!any_finite || best < 0)
        throw estimation_error("no feasible fidelity: the likelihood is -inf on the whole grid");

    const bool lo_open = best > 0 && std::isfinite(curve.grid[best - 1].second);
    const bool hi_open = best + 1 < grid_n && std::isfinite(curve.grid[best + 1].second);
    if (lo_open && hi_open) {
        curve.f_hat = golden_section(lnL, curve.grid[best - 1].first, curve.grid[best + 1].first);
        const double h = 1e-3;
        const double lo = lnL(std::max(0.0, curve.f_hat - h));
        const double hi = lnL(std::min(1.0, curve.f_hat + h));
        const double mid = lnL(curve.f_hat);
        const double d2 = (lo - 2.0 * mid + hi) / (h * h);
        curve.width = d2 < 0.0 ? 1.0 / std::sqrt(-d2) : kNaN;
        curve.boundary = false;
    } else {
        // grid edge or feasibility edge: curvature is one-sided, don't fake it
        curve.f_hat = curve.grid[best].first;
        curve.width = kNaN;
        curve.boundary = true;
    }
    return curve;
}

namespace {

EstimationResult from_curve(const LikelihoodCurve& curve, RankSelection sel,
                            std::vector<std::string> circuits, EstimatorMethod method,
                            JacobianMode mode) {
    EstimationResult res;
    res.f_hat = curve.f_hat;
    res.width = curve.width;
    res.boundary = curve.boundary;
    res.method = method;
    res.ranks_used = std::move(sel);
    res.circuits_used = std::move(circuits);
    res.jacobian_mode = mode;
    return res;
}

} // namespace

EstimationResult estimate_fixed_rank(const std::vector<MeasurementRecord>& records,
                                     std::uint32_t k, Dims dims, EstimatorMethod method,
                                     PdfForm form, JacobianMode mode, int grid_n,
                                     LikelihoodCurve* curve_out) {
    RankSelection sel;
    sel.ranks = {k};
    sel.description = std::to_string(k);
    std::vector<std::string> ids;
    ids.reserve(records.size());
    for (const auto& r : records) ids.push_back(r.circuit_id);

    LikelihoodCurve curve;
    if (method == EstimatorMethod::ProbabilityMLE) {
        ProbLikelihood lik(records, sel, dims, form, mode);
        curve = maximize([&](double f) { return lik(f); }, method, grid_n);
    } else {
        std::vector<CountLikelihood> liks;
        liks.reserve(records.size());
        for (const auto& r : records) liks.emplace_back(r, sel, dims);
        curve = maximize(
            [&](double f) {
                std::vector<double> parts(liks.size());
                for (std::size_t i = 0; i < liks.size(); ++i) parts[i] = liks[i](f);
                return pairwise_sum(parts);
            },
            method, grid_n);
    }
    if (curve_out) *curve_out = curve;
    return from_curve(curve, std::move(sel), std::move(ids), method, mode);
}

EstimationResult estimate_single_circuit(const MeasurementRecord& record,
                                         const RankSelection& sel, Dims dims,
                                         EstimatorMethod method, PdfForm form,
                                         JacobianMode mode, int grid_n,
                                         LikelihoodCurve* curve_out) {
    LikelihoodCurve curve;
    if (method == EstimatorMethod::ProbabilityMLE) {
        std::vector<MeasurementRecord> one{record};
        ProbLikelihood lik(one, sel, dims, form, mode);
        curve = maximize([&](double f) { return lik(f); }, method, grid_n);
    } else {
        CountLikelihood lik(record, sel, dims);
        curve = maximize([&](double f) { return lik(f); }, method, grid_n);
    }
    if (curve_out) *curve_out = curve;
    return from_curve(curve, sel, {record.circuit_id}, method, mode);
}

} // namespace fidsta
