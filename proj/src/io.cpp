#include "fidsta/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "fidsta/errors.hpp"

namespace fidsta {

namespace {

bool valid_bits(const std::string& s, int n_qubits) {
    if (static_cast<int>(s.size()) != n_qubits) return false;
    for (char c : s)
        if (c != '0' && c != '1') return false;
    return true;
}

[[noreturn]] void fail(const std::string& name, std::size_t line, const std::string& code,
                       const std::string& msg) {
    throw parse_error(name + ":" + std::to_string(line) + ": [" + code + "] " + msg);
}

// header: "# n_qubits=<N> circuit=<id>"
bool parse_header(const std::string& line, int& n_qubits, std::string& circuit) {
    std::istringstream ss(line);
    std::string hash, kq, kc;
    ss >> hash >> kq >> kc;
    if (hash != "#") return false;
    if (kq.rfind("n_qubits=", 0) != 0 || kc.rfind("circuit=", 0) != 0) return false;
    try {
        n_qubits = std::stoi(kq.substr(9));
    } catch (...) {
        return false;
    }
    circuit = kc.substr(8);
    return n_qubits >= 1 && !circuit.empty();
}

} // namespace

RawShotFile ingest_stream(std::istream& in, RawFormat format, const std::string& name) {
    RawShotFile raw;
    raw.format = format;
    std::unordered_map<std::string, std::size_t> index;
    bool have_header = false;
    std::string line;
    std::size_t lineno = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            int nq;
            std::string circuit;
            if (parse_header(line, nq, circuit)) {
                if (have_header) fail(name, lineno, "E_DUP_HEADER", "second header line");
                raw.n_qubits = nq;
                raw.circuit_id = circuit;
                have_header = true;
            }
            continue;
        }
        if (!have_header)
            fail(name, lineno, "E_NO_HEADER",
                 "data before the '# n_qubits=<N> circuit=<id>' header");

        std::string bits;
        std::uint64_t count = 1;
        if (format == RawFormat::BitstringCounts) {
            const auto comma = line.find(',');
            if (comma == std::string::npos)
                fail(name, lineno, "E_FORMAT", "expected '<bitstring>,<count>'");
            bits = line.substr(0, comma);
            const std::string cs = line.substr(comma + 1);
            if (cs.empty() || cs.find_first_not_of("0123456789") != std::string::npos)
                fail(name, lineno, "E_COUNT", "count must be a positive integer, got '" + cs + "'");
            try {
                count = std::stoull(cs);
            } catch (...) {
                fail(name, lineno, "E_COUNT", "count out of range '" + cs + "'");
            }
            if (count == 0) fail(name, lineno, "E_COUNT", "count must be positive");
        } else {
            bits = line;
        }
        if (!valid_bits(bits, raw.n_qubits))
            fail(name, lineno, "E_BITSTRING",
                 "bitstring must be " + std::to_string(raw.n_qubits) +
                     " characters of {0,1}, got '" + bits + "'");

        auto it = index.find(bits);
        if (it == index.end()) {
            index.emplace(bits, raw.entries.size());
            raw.entries.emplace_back(bits, count);
        } else {
            if (format == RawFormat::BitstringCounts)
                fail(name, lineno, "E_DUPLICATE", "duplicate bitstring '" + bits + "'");
            raw.entries[it->second].second += count;
        }
        raw.total_shots += count;
    }
    if (!have_header) fail(name, lineno + 1, "E_NO_HEADER", "missing header line");
    if (raw.entries.empty()) fail(name, lineno + 1, "E_EMPTY", "no data lines");
    return raw;
}

RawShotFile ingest(const std::string& path, RawFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path + ": cannot open file");
    return ingest_stream(in, format, path);
}

MeasurementRecord to_record(const RawShotFile& raw, std::uint64_t top_k) {
    if (top_k < 1) throw config_error("top_k must be >= 1");
    std::vector<std::pair<std::string, std::uint64_t>> sorted = raw.entries;
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    MeasurementRecord rec;
    rec.circuit_id = raw.circuit_id;
    rec.shots = raw.total_shots;
    rec.truncated = sorted.size() < top_k;
    const std::size_t keep = std::min<std::size_t>(top_k, sorted.size());
    rec.counts.reserve(keep);
    rec.probs.reserve(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        rec.counts.push_back(sorted[i].second);
        rec.probs.push_back(static_cast<double>(sorted[i].second) /
                            static_cast<double>(rec.shots));
    }
    rec.validate();
    return rec;
}

std::string fmt_g12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

namespace {

// Minimal canonical JSON emitter: alphabetical keys hardcoded at each call
// site, %.12g numbers, no whitespace. nlohmann is used only for reading.
std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    return out;
}

std::string json_number(double v) {
    if (std::isnan(v)) return "null";
    if (std::isinf(v)) return v > 0 ? "1e999" : "-1e999"; // curves never persist inf; guard anyway
    return fmt_g12(v);
}

} // namespace

void write_dataset_json(const Dataset& ds, std::ostream& out) {
    out << "{\"n_qubits\":" << ds.dims.n_qubits << ",\"provenance\":[";
    for (std::size_t i = 0; i < ds.provenance.size(); ++i) {
        if (i) out << ',';
        out << "{\"path\":\"" << json_escape(ds.provenance[i].first) << "\",\"sha256\":\""
            << json_escape(ds.provenance[i].second) << "\"}";
    }
    out << "],\"records\":[";
    for (std::size_t r = 0; r < ds.records.size(); ++r) {
        const auto& rec = ds.records[r];
        if (r) out << ',';
        out << "{\"circuit_id\":\"" << json_escape(rec.circuit_id) << "\",\"counts\":[";
        for (std::size_t i = 0; i < rec.counts.size(); ++i) {
            if (i) out << ',';
            out << rec.counts[i];
        }
        out << "],\"shots\":" << rec.shots
            << ",\"truncated\":" << (rec.truncated ? "true" : "false") << '}';
    }
    out << "]}\n";
}

Dataset read_dataset_json(std::istream& in) {
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("dataset JSON: ") + e.what());
    }
    Dataset ds;
    try {
        ds.dims = Dims::from_qubits(j.at("n_qubits").get<int>());
        if (j.contains("provenance"))
            for (const auto& p : j.at("provenance"))
                ds.provenance.emplace_back(p.at("path").get<std::string>(),
                                           p.at("sha256").get<std::string>());
        for (const auto& r : j.at("records")) {
            MeasurementRecord rec;
            rec.circuit_id = r.at("circuit_id").get<std::string>();
            rec.shots = r.at("shots").get<std::uint64_t>();
            rec.counts = r.at("counts").get<std::vector<std::uint64_t>>();
            if (r.contains("truncated")) rec.truncated = r.at("truncated").get<bool>();
            rec.probs.reserve(rec.counts.size());
            for (std::uint64_t c : rec.counts)
                rec.probs.push_back(static_cast<double>(c) / static_cast<double>(rec.shots));
            rec.validate();
            ds.records.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception& e) {
        throw parse_error(std::string("dataset JSON: ") + e.what());
    }
    std::unordered_map<std::string, int> seen;
    for (const auto& rec : ds.records)
        if (++seen[rec.circuit_id] > 1)
            throw parse_error("dataset JSON: duplicate circuit_id '" + rec.circuit_id + "'");
    return ds;
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path + ": cannot open file");
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw numeric_error("sha256 init failed");
    }
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0)
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    unsigned char digest[32];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (unsigned i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

void write_dist_csv(const std::vector<std::pair<double, double>>& rows, std::ostream& out) {
    out << "x,pdf\n";
    for (const auto& [x, p] : rows) out << fmt_g12(x) << ',' << fmt_g12(p) << '\n';
}

void write_moments_csv(const std::vector<std::pair<std::uint64_t, MomentSet>>& rows,
                       std::ostream& out) {
    out << "k,mean,second_moment,variance\n";
    for (const auto& [k, m] : rows)
        out << k << ',' << fmt_g12(m.mean) << ',' << fmt_g12(m.second_moment) << ','
            << fmt_g12(m.variance) << '\n';
}

void write_curve_csv(const LikelihoodCurve& curve, std::ostream& out) {
    out << "f,loglik\n";
    for (const auto& [f, ll] : curve.grid)
        out << fmt_g12(f) << ',' << fmt_g12(ll) << '\n';
}

void write_trials_csv(const std::vector<double>& f_hats, std::ostream& out) {
    out << "trial,f_hat\n";
    for (std::size_t i = 0; i < f_hats.size(); ++i)
        out << i << ',' << fmt_g12(f_hats[i]) << '\n';
}

void write_scaling_csv(const std::vector<ScalingRow>& rows, std::ostream& out) {
    out << "n_qubits,mean_error,std_error\n";
    for (const auto& r : rows)
        out << r.n_qubits << ',' << fmt_g12(r.mean_error) << ',' << fmt_g12(r.std_error)
            << '\n';
}

void write_estimation_json(const std::vector<EstimationResult>& results, std::ostream& out) {
    out << '[';
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        if (i) out << ',';
        out << "{\"boundary\":" << (r.boundary ? "true" : "false") << ",\"circuits_used\":[";
        for (std::size_t c = 0; c < r.circuits_used.size(); ++c) {
            if (c) out << ',';
            out << '"' << json_escape(r.circuits_used[c]) << '"';
        }
        out << "],\"f_hat\":" << json_number(r.f_hat) << ",\"jacobian_mode\":\""
            << (r.jacobian_mode == JacobianMode::WithJacobian ? "with_jacobian"
                                                              : "literal")
            << "\",\"method\":\""
            << (r.method == EstimatorMethod::ProbabilityMLE ? "prob" : "count")
            << "\",\"ranks_used\":[";
        for (std::size_t k = 0; k < r.ranks_used.ranks.size(); ++k) {
            if (k) out << ',';
            out << r.ranks_used.ranks[k];
        }
        out << "],\"width\":" << json_number(r.width) << '}';
    }
    out << "]\n";
}

void write_minshots_json(const SimConfig& cfg, const MinShotsResult& res, std::ostream& out) {
    out << "{\"eps_rel\":" << json_number(cfg.eps_rel)
        << ",\"fidelity\":" << json_number(cfg.true_fidelity)
        << ",\"minimal_shots\":" << res.minimal_shots << ",\"n_qubits\":" << cfg.dims.n_qubits
        << ",\"probes\":[";
    for (std::size_t i = 0; i < res.probes.size(); ++i) {
        const auto& p = res.probes[i];
        if (i) out << ',';
        out << "{\"shots\":" << p.shots << ",\"stat\":" << json_number(p.stat)
            << ",\"success\":" << (p.success ? "true" : "false") << '}';
    }
    out << "],\"seed\":" << cfg.seed << ",\"stat\":\""
        << (cfg.stat == SuccessStat::Mean ? "mean" : "median") << "\",\"top_k\":" << cfg.top_k
        << ",\"trials\":" << cfg.trials << "}\n";
}

} // namespace fidsta
