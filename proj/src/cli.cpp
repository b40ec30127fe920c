#include "fidsta/cli.hpp"

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "fidsta/errors.hpp"
#include "fidsta/estimator.hpp"
#include "fidsta/io.hpp"
#include "fidsta/noise.hpp"
#include "fidsta/orderstat.hpp"
#include "fidsta/parallel.hpp"
#include "fidsta/simulator.hpp"

namespace fidsta {

namespace {

struct Logger {
    int level = 1; // 0 quiet, 1 info, 2 debug; always stderr, never the payload
    void info(const std::string& m) const {
        if (level >= 1) std::cerr << "[info] " << m << '\n';
    }
    void debug(const std::string& m) const {
        if (level >= 2) std::cerr << "[debug] " << m << '\n';
    }
};

// Payload sink: --out file, stdout otherwise. Binary mode so the byte stream
// is exactly what the writers emit.
struct OutFile {
    std::ofstream file;
    std::ostream* os = &std::cout;
    explicit OutFile(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary | std::ios::trunc);
            if (!file) throw config_error("cannot open output file '" + path + "'");
            os = &file;
        }
    }
    std::ostream& stream() { return *os; }
};

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        if (tok.empty()) throw config_error("empty entry in list '" + text + "'");
        try {
            out.push_back(std::stoi(tok));
        } catch (...) {
            throw config_error("cannot parse integer '" + tok + "' in '" + text + "'");
        }
    }
    if (out.empty()) throw config_error("empty list '" + text + "'");
    return out;
}

PdfForm parse_form(const std::string& s) {
    return s == "approx" ? PdfForm::LargeDApprox : PdfForm::ExactSeries;
}

JacobianMode parse_jacobian(const std::string& s) {
    return s == "literal" ? JacobianMode::LiteralSubstitution : JacobianMode::WithJacobian;
}

struct DistOpts {
    int n_qubits = 0;
    std::uint64_t rank = 1;
    std::string form = "exact";
    std::uint64_t points = 512;
    double fidelity = 1.0;
    std::string jacobian = "with";
};

void run_dist(const DistOpts& o, const std::string& out_path, const Logger& log) {
    if (o.points < 2 || o.points > 10'000'000)
        throw config_error("--points must lie in [2, 1e7]");
    const Dims dims = Dims::from_qubits(o.n_qubits);
    check_rank(dims, o.rank);
    auto base = std::make_shared<const RankPdf>(dims, o.rank, parse_form(o.form));
    std::vector<std::pair<double, double>> rows;
    rows.reserve(o.points);
    if (o.fidelity == 1.0) {
        const double xmax = base->support_max();
        for (std::uint64_t i = 0; i < o.points; ++i) {
            const double x = xmax * static_cast<double>(i) / static_cast<double>(o.points - 1);
            rows.emplace_back(x, base->pdf(x));
        }
    } else {
        DeformedRankPdf def(base, NoiseModel(o.fidelity), parse_jacobian(o.jacobian));
        const double xmax = def.support_max();
        for (std::uint64_t i = 0; i < o.points; ++i) {
            const double x = xmax * static_cast<double>(i) / static_cast<double>(o.points - 1);
            rows.emplace_back(x, def.pdf(x));
        }
    }
    log.debug("dist: D=" + std::to_string(dims.dim) + " k=" + std::to_string(o.rank) +
              " form=" + o.form);
    OutFile out(out_path);
    write_dist_csv(rows, out.stream());
}

struct MomentsOpts {
    int n_qubits = 0;
    std::string ranks;
};

void run_moments(const MomentsOpts& o, const std::string& out_path, const Logger& log) {
    const Dims dims = Dims::from_qubits(o.n_qubits);
    const RankSelection sel = RankSelection::parse(o.ranks);
    std::vector<std::pair<std::uint64_t, MomentSet>> rows;
    rows.reserve(sel.ranks.size());
    for (std::uint32_t k : sel.ranks) {
        check_rank(dims, k);
        rows.emplace_back(k, second_moment(dims, k));
    }
    log.debug("moments: D=" + std::to_string(dims.dim) + " ranks=" + sel.description);
    OutFile out(out_path);
    write_moments_csv(rows, out.stream());
}

struct EstimateOpts {
    std::string data;
    std::string ranks;
    std::string method = "prob";
    std::string form = "exact";
    std::string jacobian = "with";
    std::string scheme = "fixed-rank";
    std::string curve_out;
};

void run_estimate(const EstimateOpts& o, const std::string& out_path, const Logger& log) {
    std::ifstream in(o.data, std::ios::binary);
    if (!in) throw parse_error(o.data + ": cannot open file");
    const Dataset ds = read_dataset_json(in);
    if (ds.records.empty()) throw parse_error(o.data + ": dataset has no records");
    const RankSelection sel = RankSelection::parse(o.ranks);
    for (std::uint32_t k : sel.ranks) check_rank(ds.dims, k);
    const EstimatorMethod method =
        o.method == "count" ? EstimatorMethod::CountMLE : EstimatorMethod::ProbabilityMLE;
    const PdfForm form = parse_form(o.form);
    const JacobianMode jac = parse_jacobian(o.jacobian);

    const std::size_t n_results =
        o.scheme == "per-circuit" ? ds.records.size() : sel.ranks.size();
    if (!o.curve_out.empty() && n_results != 1)
        throw config_error("--curve-out needs a single-result invocation (one rank with "
                           "--scheme fixed-rank, or one record with --scheme per-circuit); "
                           "this one yields " +
                           std::to_string(n_results));

    LikelihoodCurve curve;
    LikelihoodCurve* curve_ptr = o.curve_out.empty() ? nullptr : &curve;
    std::vector<EstimationResult> results;
    results.reserve(n_results);
    if (o.scheme == "per-circuit") {
        for (const auto& rec : ds.records)
            results.push_back(
                estimate_single_circuit(rec, sel, ds.dims, method, form, jac, 200, curve_ptr));
    } else {
        for (std::uint32_t k : sel.ranks)
            results.push_back(
                estimate_fixed_rank(ds.records, k, ds.dims, method, form, jac, 200, curve_ptr));
    }
    log.info("estimate: " + std::to_string(ds.records.size()) + " records, " +
             std::to_string(results.size()) + " result(s)");
    if (curve_ptr) {
        OutFile cf(o.curve_out);
        write_curve_csv(curve, cf.stream());
    }
    OutFile out(out_path);
    write_estimation_json(results, out.stream());
}

HaarMode parse_haar(const std::string& s) {
    if (s == "full") return HaarMode::FullVector;
    if (s == "topk") return HaarMode::StreamingTopK;
    return HaarMode::AnalyticRank;
}

struct SimulateOpts {
    int n_qubits = 0;
    double fidelity = 0.5;
    std::uint64_t shots = 1000;
    std::uint64_t top_k = 500;
    std::uint64_t trials = 100;
    std::string law = "poisson";
    std::string haar = "analytic";
};

SimConfig to_config(const SimulateOpts& o, std::uint64_t seed) {
    SimConfig cfg;
    cfg.dims = Dims::from_qubits(o.n_qubits);
    cfg.true_fidelity = o.fidelity;
    cfg.shots = o.shots;
    cfg.top_k = o.top_k;
    cfg.trials = o.trials;
    cfg.seed = seed;
    cfg.law = o.law == "binomial" ? CountLaw::Binomial : CountLaw::Poisson;
    cfg.haar_mode = parse_haar(o.haar);
    return cfg;
}

void run_simulate(const SimulateOpts& o, std::uint64_t seed, const std::string& out_path,
                  const Logger& log) {
    const SimConfig cfg = to_config(o, seed);
    const std::vector<double> f_hats = run_trials(cfg);
    log.info("simulate: " + std::to_string(f_hats.size()) + " trials at S=" +
             std::to_string(cfg.shots));
    OutFile out(out_path);
    write_trials_csv(f_hats, out.stream());
}

struct MinShotsOpts {
    SimulateOpts sim;
    double eps_rel = 0.1;
    std::string stat = "mean";
    std::uint64_t s_lo = 1024;
    std::uint64_t s_hi = 4096;
};

void run_min_shots(const MinShotsOpts& o, std::uint64_t seed, const std::string& out_path,
                   const Logger& log) {
    SimConfig cfg = to_config(o.sim, seed);
    cfg.eps_rel = o.eps_rel;
    cfg.stat = o.stat == "median" ? SuccessStat::Median : SuccessStat::Mean;
    const MinShotsResult res = min_shots_bisection(cfg, o.s_lo, o.s_hi);
    log.info("min-shots: " + std::to_string(res.probes.size()) + " probes, minimal S = " +
             std::to_string(res.minimal_shots));
    OutFile out(out_path);
    write_minshots_json(cfg, res, out.stream());
}

struct ScalingOpts {
    std::string n_list;
    double fidelity = 0.48;
    std::string ranks = "1,2,3,5,6";
    std::uint64_t trials = 10;
};

void run_scaling(const ScalingOpts& o, std::uint64_t seed, const std::string& out_path,
                 const Logger& log) {
    const std::vector<int> ns = parse_int_list(o.n_list);
    const RankSelection sel = RankSelection::parse(o.ranks);
    const auto table = error_scaling_experiment(ns, o.fidelity, {sel}, o.trials, seed);
    log.info("scaling: " + std::to_string(ns.size()) + " sizes x " +
             std::to_string(o.trials) + " trials");
    OutFile out(out_path);
    write_scaling_csv(table.at(0), out.stream());
}

struct IngestOpts {
    std::vector<std::string> inputs;
    std::string format = "counts";
    std::uint64_t top_k = 500;
};

void run_ingest(const IngestOpts& o, const std::string& out_path, const Logger& log) {
    const RawFormat fmt =
        o.format == "shots" ? RawFormat::ShotList : RawFormat::BitstringCounts;
    std::vector<RawShotFile> raws(o.inputs.size());
    parallel_for(o.inputs.size(), [&](std::size_t i) { raws[i] = ingest(o.inputs[i], fmt); });

    Dataset ds;
    ds.dims = Dims::from_qubits(raws.at(0).n_qubits);
    for (std::size_t i = 0; i < raws.size(); ++i) {
        if (raws[i].n_qubits != ds.dims.n_qubits)
            throw parse_error(o.inputs[i] + ": n_qubits=" + std::to_string(raws[i].n_qubits) +
                              " disagrees with " + std::to_string(ds.dims.n_qubits));
        MeasurementRecord rec = to_record(raws[i], o.top_k);
        for (const auto& prev : ds.records)
            if (prev.circuit_id == rec.circuit_id)
                throw parse_error(o.inputs[i] + ": duplicate circuit_id '" + rec.circuit_id +
                                  "'");
        ds.records.push_back(std::move(rec));
        ds.provenance.emplace_back(o.inputs[i], sha256_file(o.inputs[i]));
    }
    log.info("ingest: " + std::to_string(ds.records.size()) + " record(s), n_qubits=" +
             std::to_string(ds.dims.n_qubits));
    OutFile out(out_path);
    write_dataset_json(ds, out.stream());
}

} // namespace

int fidsta_main(const std::vector<std::string>& args) {
    CLI::App app{"fidelity statistics for chaotic-circuit sampling"};
    app.name("fidsta");
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    int threads = 0;
    std::string log_level = "info";
    std::string out_path;
    app.add_option("--seed", seed, "master RNG seed (derived per-trial streams)");
    app.add_option("--threads", threads, "worker threads, 0 = hardware")
        ->check(CLI::Range(0, 1024));
    app.add_option("--log-level", log_level, "stderr verbosity")
        ->check(CLI::IsMember({"quiet", "info", "debug"}));
    app.add_option("--out", out_path, "output file (stdout when omitted)");

    DistOpts dist_o;
    CLI::App* dist = app.add_subcommand("dist", "tabulate a rank pdf as x,pdf CSV");
    dist->fallthrough();
    dist->add_option("--n-qubits", dist_o.n_qubits, "system size N (D = 2^N)")->required();
    dist->add_option("--rank", dist_o.rank, "rank k (1 = largest probability)")->required();
    dist->add_option("--form", dist_o.form, "pdf form")
        ->check(CLI::IsMember({"exact", "approx"}));
    dist->add_option("--points", dist_o.points, "grid points over the support");
    dist->add_option("--fidelity", dist_o.fidelity,
                     "depolarizing fidelity; 1 = noiseless (default)");
    dist->add_option("--jacobian", dist_o.jacobian, "deformed-density convention")
        ->check(CLI::IsMember({"with", "literal"}));

    MomentsOpts mom_o;
    CLI::App* mom = app.add_subcommand("moments", "closed-form rank moments as CSV");
    mom->fallthrough();
    mom->add_option("--n-qubits", mom_o.n_qubits, "system size N")->required();
    mom->add_option("--ranks", mom_o.ranks, "rank selection, e.g. 1..20 or 1,5,9")->required();

    EstimateOpts est_o;
    CLI::App* est = app.add_subcommand("estimate", "maximum-likelihood fidelity from a dataset");
    est->fallthrough();
    est->add_option("--data", est_o.data, "dataset JSON (from ingest)")->required();
    est->add_option("--ranks", est_o.ranks, "rank selection")->required();
    est->add_option("--method", est_o.method, "likelihood")
        ->check(CLI::IsMember({"prob", "count"}));
    est->add_option("--form", est_o.form, "rank pdf form for prob method")
        ->check(CLI::IsMember({"exact", "approx"}));
    est->add_option("--jacobian", est_o.jacobian, "deformed-density convention")
        ->check(CLI::IsMember({"with", "literal"}));
    est->add_option("--scheme", est_o.scheme,
                    "fixed-rank: one estimate per rank pooled over circuits; "
                    "per-circuit: one estimate per circuit over all ranks")
        ->check(CLI::IsMember({"fixed-rank", "per-circuit"}));
    est->add_option("--curve-out", est_o.curve_out,
                    "also write the f,loglik grid CSV (single-result runs only)");

    SimulateOpts sim_o;
    CLI::App* sim = app.add_subcommand("simulate", "synthetic trials, trial,f_hat CSV");
    sim->fallthrough();
    sim->add_option("--n-qubits", sim_o.n_qubits, "system size N")->required();
    sim->add_option("--fidelity", sim_o.fidelity, "true fidelity f*");
    sim->add_option("--shots", sim_o.shots, "measurements per trial");
    sim->add_option("--top-k", sim_o.top_k, "retained ranks per trial");
    sim->add_option("--trials", sim_o.trials, "independent trials");
    sim->add_option("--law", sim_o.law, "count law")
        ->check(CLI::IsMember({"poisson", "binomial"}));
    sim->add_option("--haar", sim_o.haar, "ideal-probability source")
        ->check(CLI::IsMember({"analytic", "full", "topk"}));

    MinShotsOpts min_o;
    CLI::App* mins = app.add_subcommand("min-shots", "bisect the minimal shot budget");
    mins->fallthrough();
    mins->add_option("--n-qubits", min_o.sim.n_qubits, "system size N")->required();
    mins->add_option("--fidelity", min_o.sim.fidelity, "true fidelity f*");
    mins->add_option("--top-k", min_o.sim.top_k, "retained ranks per trial");
    mins->add_option("--trials", min_o.sim.trials, "trials per probe");
    mins->add_option("--law", min_o.sim.law, "count law")
        ->check(CLI::IsMember({"poisson", "binomial"}));
    mins->add_option("--haar", min_o.sim.haar, "ideal-probability source")
        ->check(CLI::IsMember({"analytic", "full", "topk"}));
    mins->add_option("--eps-rel", min_o.eps_rel, "relative-error success threshold");
    mins->add_option("--stat", min_o.stat, "success statistic over trials")
        ->check(CLI::IsMember({"mean", "median"}));
    mins->add_option("--s-lo", min_o.s_lo, "initial bracket low");
    mins->add_option("--s-hi", min_o.s_hi, "initial bracket high");

    ScalingOpts sca_o;
    CLI::App* sca = app.add_subcommand("scaling", "error vs system size experiment CSV");
    sca->fallthrough();
    sca->add_option("--n-list", sca_o.n_list, "comma list of N, e.g. 12,16,20")->required();
    sca->add_option("--fidelity", sca_o.fidelity, "true fidelity f*");
    sca->add_option("--ranks", sca_o.ranks, "rank selection used by the estimator");
    sca->add_option("--trials", sca_o.trials, "Haar realizations per size");

    IngestOpts ing_o;
    CLI::App* ing = app.add_subcommand("ingest", "parse measurement files into dataset JSON");
    ing->fallthrough();
    ing->add_option("--input", ing_o.inputs, "measurement file (repeatable)")
        ->required()
        ->expected(-1);
    ing->add_option("--format", ing_o.format, "input grammar")
        ->check(CLI::IsMember({"counts", "shots"}));
    ing->add_option("--top-k", ing_o.top_k, "ranks kept per record");

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 4;
    }

    set_max_threads(threads);
    Logger log;
    log.level = log_level == "quiet" ? 0 : log_level == "debug" ? 2 : 1;

    try {
        if (dist->parsed()) run_dist(dist_o, out_path, log);
        else if (mom->parsed()) run_moments(mom_o, out_path, log);
        else if (est->parsed()) run_estimate(est_o, out_path, log);
        else if (sim->parsed()) run_simulate(sim_o, seed, out_path, log);
        else if (mins->parsed()) run_min_shots(min_o, seed, out_path, log);
        else if (sca->parsed()) run_scaling(sca_o, seed, out_path, log);
        else if (ing->parsed()) run_ingest(ing_o, out_path, log);
        return 0;
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const numeric_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const estimation_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}

} // namespace fidsta
