#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fidsta/cli.hpp"
#include "fidsta/errors.hpp"
#include "fidsta/io.hpp"

using namespace fidsta;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    const fs::path p = fs::temp_directory_path() / "fidsta_io_tests";
    fs::create_directories(p);
    return p;
}

fs::path write_file(const std::string& name, const std::string& content) {
    const fs::path p = tmp_dir() / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    out << content;
    return p;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string ingest_error(const std::string& body, RawFormat fmt) {
    std::istringstream in(body);
    try {
        ingest_stream(in, fmt, "mem");
        return "";
    } catch (const parse_error& e) {
        return e.what();
    }
}

bool same_record(const MeasurementRecord& a, const MeasurementRecord& b) {
    return a.circuit_id == b.circuit_id && a.shots == b.shots && a.counts == b.counts &&
           a.probs == b.probs && a.truncated == b.truncated;
}

} // namespace

TEST_CASE("bitstring-count ingestion") {
    std::istringstream in("# comment\n"
                          "# n_qubits=4 circuit=c1\n"
                          "0110,4821\n"
                          "1100,12\n"
                          "# trailing comment\n"
                          "0001,7\n");
    const RawShotFile raw = ingest_stream(in, RawFormat::BitstringCounts, "mem");
    CHECK(raw.circuit_id == "c1");
    CHECK(raw.n_qubits == 4);
    CHECK(raw.total_shots == 4840);
    REQUIRE(raw.entries.size() == 3);
    CHECK(raw.entries[0].first == "0110");
    CHECK(raw.entries[0].second == 4821);
    CHECK(raw.entries[2].first == "0001");
}

TEST_CASE("shot-list ingestion aggregates in first-seen order") {
    std::istringstream in("# n_qubits=3 circuit=s1\n"
                          "110\n011\n110\n000\n110\n011\n");
    const RawShotFile raw = ingest_stream(in, RawFormat::ShotList, "mem");
    CHECK(raw.total_shots == 6);
    REQUIRE(raw.entries.size() == 3);
    CHECK(raw.entries[0] == std::pair<std::string, std::uint64_t>{"110", 3});
    CHECK(raw.entries[1] == std::pair<std::string, std::uint64_t>{"011", 2});
    CHECK(raw.entries[2] == std::pair<std::string, std::uint64_t>{"000", 1});
}

TEST_CASE("ingestion reports distinct failure modes with line numbers") {
    const std::string head = "# n_qubits=4 circuit=c\n";

    auto msg = ingest_error("0101,3\n", RawFormat::BitstringCounts);
    CHECK(msg.find("mem:1:") != std::string::npos);
    CHECK(msg.find("E_NO_HEADER") != std::string::npos);

    msg = ingest_error(head + "010,3\n", RawFormat::BitstringCounts);
    CHECK(msg.find("mem:2:") != std::string::npos);
    CHECK(msg.find("E_BITSTRING") != std::string::npos);

    msg = ingest_error(head + "01a0,3\n", RawFormat::BitstringCounts);
    CHECK(msg.find("E_BITSTRING") != std::string::npos);

    msg = ingest_error(head + "0110,0\n", RawFormat::BitstringCounts);
    CHECK(msg.find("E_COUNT") != std::string::npos);

    msg = ingest_error(head + "0110,-3\n", RawFormat::BitstringCounts);
    CHECK(msg.find("E_COUNT") != std::string::npos);

    msg = ingest_error(head + "0110,xyz\n", RawFormat::BitstringCounts);
    CHECK(msg.find("E_COUNT") != std::string::npos);

    msg = ingest_error(head + "0110\n", RawFormat::BitstringCounts);
    CHECK(msg.find("E_FORMAT") != std::string::npos);

    msg = ingest_error(head + "0110,3\n0110,5\n", RawFormat::BitstringCounts);
    CHECK(msg.find("mem:3:") != std::string::npos);
    CHECK(msg.find("E_DUPLICATE") != std::string::npos);

    msg = ingest_error("", RawFormat::BitstringCounts);
    CHECK(msg.find("E_NO_HEADER") != std::string::npos);

    msg = ingest_error(head, RawFormat::BitstringCounts);
    CHECK(msg.find("E_EMPTY") != std::string::npos);

    msg = ingest_error(head + head + "0110,3\n", RawFormat::BitstringCounts);
    CHECK(msg.find("E_DUP_HEADER") != std::string::npos);
}

TEST_CASE("top-K extraction: stable ties, truncation flag, probabilities") {
    std::istringstream in("# n_qubits=3 circuit=t\n"
                          "000,5\n111,9\n010,5\n");
    const RawShotFile raw = ingest_stream(in, RawFormat::BitstringCounts, "mem");

    const MeasurementRecord top2 = to_record(raw, 2);
    CHECK(top2.counts == std::vector<std::uint64_t>{9, 5});
    CHECK(top2.shots == 19);
    CHECK(!top2.truncated);
    CHECK(top2.probs[0] == doctest::Approx(9.0 / 19.0).epsilon(1e-15));

    const MeasurementRecord top5 = to_record(raw, 5);
    CHECK(top5.counts == std::vector<std::uint64_t>{9, 5, 5});
    CHECK(top5.truncated); // fewer distinct outcomes than requested

    CHECK_THROWS_AS(to_record(raw, 0), config_error);
}

TEST_CASE("dataset round-trips through canonical JSON") {
    std::istringstream in("# n_qubits=3 circuit=rt\n"
                          "110\n011\n110\n000\n110\n011\n");
    const RawShotFile raw = ingest_stream(in, RawFormat::ShotList, "mem");
    Dataset ds;
    ds.dims = Dims::from_qubits(3);
    ds.records.push_back(to_record(raw, 2));
    ds.provenance.emplace_back("mem", "0000");

    std::ostringstream out;
    write_dataset_json(ds, out);
    const std::string once = out.str();

    std::istringstream back(once);
    const Dataset ds2 = read_dataset_json(back);
    CHECK(ds2.dims.n_qubits == 3);
    REQUIRE(ds2.records.size() == 1);
    CHECK(same_record(ds.records[0], ds2.records[0]));
    REQUIRE(ds2.provenance.size() == 1);
    CHECK(ds2.provenance[0].first == "mem");

    std::ostringstream out2;
    write_dataset_json(ds2, out2);
    CHECK(out2.str() == once); // byte-stable
}

TEST_CASE("count files and shot lists of the same multiset yield one record") {
    std::istringstream a("# n_qubits=3 circuit=x\n110,3\n011,2\n000,1\n");
    std::istringstream b("# n_qubits=3 circuit=x\n110\n011\n110\n000\n110\n011\n");
    const auto ra = to_record(ingest_stream(a, RawFormat::BitstringCounts, "a"), 2);
    const auto rb = to_record(ingest_stream(b, RawFormat::ShotList, "b"), 2);
    CHECK(same_record(ra, rb));
}

TEST_CASE("dataset JSON rejects corrupt input") {
    std::istringstream bad("{\"n_qubits\": }");
    CHECK_THROWS_AS(read_dataset_json(bad), parse_error);

    std::istringstream dup(
        "{\"n_qubits\":3,\"provenance\":[],\"records\":["
        "{\"circuit_id\":\"a\",\"counts\":[5],\"shots\":10,\"truncated\":false},"
        "{\"circuit_id\":\"a\",\"counts\":[4],\"shots\":10,\"truncated\":false}]}");
    CHECK_THROWS_AS(read_dataset_json(dup), parse_error);

    std::istringstream incons(
        "{\"n_qubits\":3,\"provenance\":[],\"records\":["
        "{\"circuit_id\":\"a\",\"counts\":[5,9],\"shots\":10,\"truncated\":false}]}");
    CHECK_THROWS_AS(read_dataset_json(incons), parse_error);
}

TEST_CASE("sha256 of a known file") {
    const auto p = write_file("abc.txt", "abc");
    CHECK(sha256_file(p.string()) ==
          "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK_THROWS_AS(sha256_file((tmp_dir() / "no_such_file").string()), parse_error);
}

TEST_CASE("canonical float formatting") {
    CHECK(fmt_g12(0.1) == "0.1");
    CHECK(fmt_g12(1.0 / 3.0) == "0.333333333333");
    CHECK(fmt_g12(1e-05) == "1e-05");
    CHECK(fmt_g12(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(fmt_g12(1234567.0) == "1234567");
}

TEST_CASE("CSV writers emit pinned headers and stable bytes") {
    {
        std::ostringstream s;
        write_dist_csv({{0.0, 0.0}, {0.25, 2.0}}, s);
        CHECK(s.str() == "x,pdf\n0,0\n0.25,2\n");
    }
    {
        std::ostringstream s;
        write_moments_csv({{1, MomentSet{0.5, 0.3, 0.05}}}, s);
        CHECK(s.str() == "k,mean,second_moment,variance\n1,0.5,0.3,0.05\n");
    }
    {
        LikelihoodCurve curve;
        curve.grid = {{0.0, -std::numeric_limits<double>::infinity()}, {1.0, -2.5}};
        std::ostringstream s;
        write_curve_csv(curve, s);
        CHECK(s.str() == "f,loglik\n0,-inf\n1,-2.5\n");
    }
    {
        std::ostringstream s;
        write_trials_csv({0.5, 0.25}, s);
        CHECK(s.str() == "trial,f_hat\n0,0.5\n1,0.25\n");
    }
    {
        std::ostringstream s;
        write_scaling_csv({ScalingRow{12, 0.03, 0.001}}, s);
        CHECK(s.str() == "n_qubits,mean_error,std_error\n12,0.03,0.001\n");
    }
}

TEST_CASE("estimation results serialize with sorted keys and null widths") {
    EstimationResult r;
    r.f_hat = 0.5;
    r.width = std::numeric_limits<double>::quiet_NaN();
    r.boundary = true;
    r.method = EstimatorMethod::CountMLE;
    r.ranks_used = RankSelection::parse("1..2");
    r.circuits_used = {"a"};
    std::ostringstream s;
    write_estimation_json({r}, s);
    CHECK(s.str() ==
          "[{\"boundary\":true,\"circuits_used\":[\"a\"],\"f_hat\":0.5,"
          "\"jacobian_mode\":\"with_jacobian\",\"method\":\"count\","
          "\"ranks_used\":[1,2],\"width\":null}]\n");
}

TEST_CASE("min-shots results serialize canonically") {
    SimConfig cfg;
    cfg.dims = Dims::from_qubits(6);
    MinShotsResult res;
    res.minimal_shots = 100;
    res.probes = {ShotProbe{50, 0.3, false}, ShotProbe{100, 0.1, true}};
    std::ostringstream s;
    write_minshots_json(cfg, res, s);
    CHECK(s.str() ==
          "{\"eps_rel\":0.1,\"fidelity\":0.5,\"minimal_shots\":100,\"n_qubits\":6,"
          "\"probes\":[{\"shots\":50,\"stat\":0.3,\"success\":false},"
          "{\"shots\":100,\"stat\":0.1,\"success\":true}],"
          "\"seed\":1,\"stat\":\"mean\",\"top_k\":500,\"trials\":100}\n");
}

// ---- command-line surface, driven in-process ----

TEST_CASE("cli: ingest then estimate end to end") {
    const auto f1 = write_file("cli_a.txt", "# n_qubits=6 circuit=a\n"
                                            "000000,900\n000001,500\n000010,300\n");
    const auto f2 = write_file("cli_b.txt", "# n_qubits=6 circuit=b\n"
                                            "000000,850\n000001,520\n000011,310\n");
    const auto ds = tmp_dir() / "cli_ds.json";
    const auto est = tmp_dir() / "cli_est.json";

    CHECK(fidsta_main({"--log-level", "quiet", "ingest", "--input", f1.string(), "--input",
                       f2.string(), "--format", "counts", "--top-k", "3", "--out",
                       ds.string()}) == 0);
    const std::string dsj = read_file(ds);
    CHECK(dsj.find("\"n_qubits\":6") != std::string::npos);
    CHECK(dsj.find("\"circuit_id\":\"a\"") != std::string::npos);
    CHECK(dsj.find("\"sha256\":\"") != std::string::npos);
    CHECK(dsj.find("\"probs\"") == std::string::npos); // probabilities never persisted

    CHECK(fidsta_main({"--log-level", "quiet", "estimate", "--data", ds.string(), "--ranks",
                       "1..2", "--method", "count", "--out", est.string()}) == 0);
    const std::string ej = read_file(est);
    CHECK(ej.find("\"f_hat\":") != std::string::npos);
    CHECK(ej.find("\"method\":\"count\"") != std::string::npos);
}

TEST_CASE("cli: dist and moments emit the documented CSV") {
    const auto dist = tmp_dir() / "cli_dist.csv";
    CHECK(fidsta_main({"--log-level", "quiet", "dist", "--n-qubits", "4", "--rank", "2",
                       "--points", "16", "--out", dist.string()}) == 0);
    const std::string dcsv = read_file(dist);
    CHECK(dcsv.rfind("x,pdf\n", 0) == 0);

    const auto mom = tmp_dir() / "cli_mom.csv";
    CHECK(fidsta_main({"--log-level", "quiet", "moments", "--n-qubits", "4", "--ranks",
                       "1..3", "--out", mom.string()}) == 0);
    const std::string mcsv = read_file(mom);
    CHECK(mcsv.rfind("k,mean,second_moment,variance\n", 0) == 0);
    CHECK(std::count(mcsv.begin(), mcsv.end(), '\n') == 4);
}

TEST_CASE("cli: simulate bytes are identical across runs and thread counts") {
    const auto o1 = tmp_dir() / "cli_sim1.csv";
    const auto o2 = tmp_dir() / "cli_sim2.csv";
    const std::vector<std::string> base{"--log-level", "quiet",    "--seed", "99",
                                        "simulate",    "--n-qubits", "8",    "--shots",
                                        "2000",        "--top-k",  "20",     "--trials",
                                        "12"};
    auto with = [&](const std::string& threads, const fs::path& out) {
        std::vector<std::string> args = base;
        args.insert(args.begin(), {"--threads", threads});
        args.push_back("--out");
        args.push_back(out.string());
        return fidsta_main(args);
    };
    CHECK(with("1", o1) == 0);
    CHECK(with("8", o2) == 0);
    CHECK(read_file(o1) == read_file(o2));
    CHECK(read_file(o1).rfind("trial,f_hat\n", 0) == 0);
}

TEST_CASE("cli: scaling and min-shots run deterministically") {
    const auto s1 = tmp_dir() / "cli_sca1.csv";
    const auto s2 = tmp_dir() / "cli_sca2.csv";
    const std::vector<std::string> sca{"--log-level", "quiet", "--seed", "11", "scaling",
                                       "--n-list", "8,10", "--ranks", "1,2", "--trials",
                                       "2"};
    auto run_to = [&](const std::vector<std::string>& argv, const fs::path& out) {
        std::vector<std::string> args = argv;
        args.push_back("--out");
        args.push_back(out.string());
        return fidsta_main(args);
    };
    CHECK(run_to(sca, s1) == 0);
    CHECK(run_to(sca, s2) == 0);
    CHECK(read_file(s1) == read_file(s2));
    CHECK(read_file(s1).rfind("n_qubits,mean_error,std_error\n", 0) == 0);

    const auto m1 = tmp_dir() / "cli_min.json";
    CHECK(fidsta_main({"--log-level", "quiet", "--seed", "5", "min-shots", "--n-qubits",
                       "8", "--fidelity", "0.5", "--top-k", "16", "--trials", "4",
                       "--eps-rel", "0.5", "--s-lo", "4", "--s-hi", "16", "--out",
                       m1.string()}) == 0);
    const std::string mj = read_file(m1);
    CHECK(mj.find("\"minimal_shots\":") != std::string::npos);
}

TEST_CASE("cli: exit codes map the error taxonomy") {
    // missing data file -> parse error (2)
    CHECK(fidsta_main({"--log-level", "quiet", "estimate", "--data",
                       (tmp_dir() / "nope.json").string(), "--ranks", "1"}) == 2);
    // malformed measurement file -> parse error (2)
    const auto bad = write_file("cli_bad.txt", "# n_qubits=4 circuit=z\n01a0,3\n");
    CHECK(fidsta_main({"--log-level", "quiet", "ingest", "--input", bad.string()}) == 2);
    // unattainable precision -> estimation failure (3)
    CHECK(fidsta_main({"--log-level", "quiet", "min-shots", "--n-qubits", "6", "--top-k",
                       "16", "--trials", "4", "--eps-rel", "0.0001", "--s-lo", "4",
                       "--s-hi", "16"}) == 3);
    // bad flag value / bad config -> 4
    CHECK(fidsta_main({"--log-level", "quiet", "dist", "--n-qubits", "4", "--rank",
                       "99"}) == 4);
    CHECK(fidsta_main({"--log-level", "quiet", "moments", "--n-qubits", "4", "--ranks",
                       "abc"}) == 4);
    CHECK(fidsta_main({"--no-such-flag"}) == 4);
    CHECK(fidsta_main({}) == 4); // a subcommand is required
    // help is success
    CHECK(fidsta_main({"--help"}) == 0);
    CHECK(fidsta_main({"dist", "--help"}) == 0);
}

TEST_CASE("cli: curve output demands a single result") {
    const auto f1 = write_file("cli_c.txt", "# n_qubits=6 circuit=c\n"
                                            "000000,900\n000001,500\n000010,300\n");
    const auto ds = tmp_dir() / "cli_ds2.json";
    REQUIRE(fidsta_main({"--log-level", "quiet", "ingest", "--input", f1.string(), "--out",
                         ds.string()}) == 0);

    const auto curve = tmp_dir() / "cli_curve.csv";
    // two ranks under fixed-rank scheme -> two results -> config error
    CHECK(fidsta_main({"--log-level", "quiet", "estimate", "--data", ds.string(), "--ranks",
                       "1..2", "--method", "count", "--curve-out", curve.string()}) == 4);
    // single rank works and writes both files
    const auto est = tmp_dir() / "cli_est2.json";
    CHECK(fidsta_main({"--log-level", "quiet", "estimate", "--data", ds.string(), "--ranks",
                       "1", "--method", "count", "--curve-out", curve.string(), "--out",
                       est.string()}) == 0);
    CHECK(read_file(curve).rfind("f,loglik\n", 0) == 0);
    CHECK(read_file(est).find("\"f_hat\":") != std::string::npos);
}
