// tsp: command-line driver for the topological signal processing library.
//
//   tsp gen          synthetic complex + edge signals
//   tsp learn-stat   statistical complex inference from node time series
//   tsp learn-joint  joint topology / sparse-signal learning over a skeleton
//   tsp decompose    Hodge decomposition of an edge-signal file
//   tsp analyze      mean divergence / curl report
//
// Every option can also come from `--config file.json`; flags override the
// file and unknown keys are rejected. Exit status: 0 ok, 1 config error,
// 2 data error, 3 numerical failure. Failures print one JSON object on stderr.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include <tsp/tsp.hpp>

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kSchemaVersion = 1;

enum class Kind { String, Real, Integer, Flag, IntList };

struct Param {
    std::string key;  // config-file key; the flag is --key with '_' -> '-'
    Kind kind;
    json fallback;    // null means required
    std::string help;
};

/// One subcommand: declared parameters, raw flag storage, and its action.
struct Command {
    std::string name;
    std::string help;
    std::vector<Param> params;
    std::function<void(const json&, unsigned)> run;

    CLI::App* app = nullptr;
    std::map<std::string, std::string> raw;
    std::map<std::string, bool> flags;
    std::string config_path;
    unsigned threads = 1;
};

std::string flag_name(const std::string& key)
{
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

double parse_real(const std::string& key, const std::string& s)
{
    if (s == "inf" || s == "+inf" || s == "infinity") return std::numeric_limits<double>::infinity();
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw tsp::ConfigError("option '" + key + "' expects a number, got '" + s + "'");
}

long long parse_int(const std::string& key, const std::string& s)
{
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used == s.size()) return v;
    } catch (const std::exception&) {
    }
    throw tsp::ConfigError("option '" + key + "' expects an integer, got '" + s + "'");
}

json coerce(const Param& p, const json& v)
{
    auto bad = [&] { return tsp::ConfigError("config key '" + p.key + "' has the wrong type"); };
    switch (p.kind) {
    case Kind::String:
        if (!v.is_string()) throw bad();
        return v;
    case Kind::Real:
        if (v.is_number()) return v.get<double>();
        if (v.is_string()) return parse_real(p.key, v.get<std::string>());
        throw bad();
    case Kind::Integer:
        if (v.is_number_integer()) return v;
        throw bad();
    case Kind::Flag:
        if (!v.is_boolean()) throw bad();
        return v;
    case Kind::IntList:
        if (!v.is_array()) throw bad();
        for (const auto& e : v)
            if (!e.is_number_integer()) throw bad();
        return v;
    }
    throw bad();
}

json parse_flag_value(const Param& p, const std::string& s)
{
    switch (p.kind) {
    case Kind::String:
        return s;
    case Kind::Real:
        return parse_real(p.key, s);
    case Kind::Integer:
        return parse_int(p.key, s);
    case Kind::IntList: {
        json arr = json::array();
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!tok.empty()) arr.push_back(parse_int(p.key, tok));
        return arr;
    }
    case Kind::Flag:
        break;
    }
    return true;
}

/// Defaults, then the config file, then explicit flags.
json resolve(const Command& cmd)
{
    json cfg = json::object();
    for (const auto& p : cmd.params)
        if (!p.fallback.is_null()) cfg[p.key] = coerce(p, p.fallback);

    if (!cmd.config_path.empty()) {
        json file;
        try {
            file = json::parse(tsp::io::read_text(cmd.config_path));
        } catch (const json::parse_error& ex) {
            throw tsp::ConfigError("config file: " + std::string(ex.what()));
        } catch (const tsp::IoError& ex) {
            throw tsp::ConfigError(ex.what());
        }
        if (!file.is_object()) throw tsp::ConfigError("config file must hold a JSON object");
        for (const auto& [k, v] : file.items()) {
            auto it = std::find_if(cmd.params.begin(), cmd.params.end(), [&](const Param& p) { return p.key == k; });
            if (it == cmd.params.end()) throw tsp::ConfigError("unknown config key '" + k + "' for " + cmd.name);
            cfg[k] = coerce(*it, v);
        }
    }
    for (const auto& p : cmd.params) {
        if (p.kind == Kind::Flag) {
            if (cmd.flags.at(p.key)) cfg[p.key] = true;
        } else if (auto it = cmd.raw.find(p.key); it != cmd.raw.end() && cmd.app->count(flag_name(p.key))) {
            cfg[p.key] = parse_flag_value(p, it->second);
        }
    }
    for (const auto& p : cmd.params)
        if (!cfg.contains(p.key)) throw tsp::ConfigError("missing required option " + flag_name(p.key));
    return cfg;
}

// ----------------------------------------------------------------- output

fs::path out_dir(const json& cfg)
{
    fs::path dir = cfg.at("out").get<std::string>();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw tsp::IoError("cannot create output directory '" + dir.string() + "'");
    return dir;
}

json input_record(const std::string& path)
{
    return {{"path", path}, {"fnv1a64", tsp::io::hex64(tsp::io::fnv1a(tsp::io::read_text(path)))}};
}

json provenance(const std::string& command, const json& cfg, const json& inputs)
{
    json p;
    p["tool"] = "tsp";
    p["version"] = kVersion;
    p["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    p["command"] = command;
    p["config"] = cfg;
    p["inputs"] = inputs;
    if (cfg.contains("seed")) p["seed"] = cfg.at("seed");
    return p;
}

void write_json(const fs::path& path, const json& j) { tsp::io::write_text(path.string(), tsp::io::pretty(j)); }

json complex_document(const tsp::OrientedComplex& cx, json prov)
{
    json j;
    j["schema_version"] = kSchemaVersion;
    const json body = tsp::io::complex_to_json(cx);
    for (const auto& [k, v] : body.items()) j[k] = v;
    j["provenance"] = std::move(prov);
    return j;
}

std::string fmt(double v) { return tsp::io::format_double(v); }

std::uint64_t seed_of(const json& cfg)
{
    const auto s = cfg.at("seed").get<long long>();
    if (s < 0) throw tsp::ConfigError("seed must be non-negative");
    return static_cast<std::uint64_t>(s);
}

tsp::SignalMatrix load_edge_signals(const std::string& path, const tsp::OrientedComplex& cx)
{
    tsp::SignalMatrix s{tsp::io::load_matrix_csv(path), 1};
    if (s.values.rows() != static_cast<Eigen::Index>(cx.n_edges()))
        throw tsp::DimensionMismatch("'" + path + "' has " + std::to_string(s.values.rows()) +
                                     " rows but the complex has " + std::to_string(cx.n_edges()) + " edges");
    return s;
}

// ----------------------------------------------------------------- commands

void cmd_gen(const json& cfg, unsigned)
{
    const auto seed = seed_of(cfg);
    const auto dir = out_dir(cfg);
    tsp::SignalSpec sig;
    sig.w_grad = cfg.at("w_grad").get<double>();
    sig.w_sol = cfg.at("w_sol").get<double>();
    sig.w_harm = cfg.at("w_harm").get<double>();
    sig.samples = cfg.at("samples").get<long long>();
    sig.snr_db = cfg.at("snr_db").get<double>();
    sig.sol_sparsity = cfg.at("sol_sparsity").get<int>();
    sig.harm_sparsity = cfg.at("harm_sparsity").get<int>();
    const int nodes = cfg.at("nodes").get<int>();
    const int planted = cfg.at("planted").get<int>();

    tsp::OrientedComplex cx;
    Eigen::MatrixXd Y;
    json extra = json::object();
    if (planted > 0) {
        tsp::PlantedSpec ps{nodes, cfg.at("edge_prob").get<double>(), planted, sig};
        auto inst = tsp::gen_planted_instance(ps, seed);
        cx = inst.complex;
        Y = inst.Y;
        extra["planted_sol_l1"] = inst.sol_l1;
        extra["planted_harm_l1"] = inst.harm_l1;
    } else {
        cx = tsp::gen_complex(nodes, cfg.at("edge_prob").get<double>(), cfg.at("fill_prob").get<double>(), seed);
        Y = tsp::gen_edge_signals(cx, sig, seed ^ 0x5DEECE66DULL).Y;
    }

    json prov_cfg = cfg;
    prov_cfg.erase("out");
    if (!std::isfinite(sig.snr_db)) prov_cfg["snr_db"] = "inf";
    const json prov = provenance("gen", prov_cfg, json::array());
    write_json(dir / "complex.json", complex_document(cx, prov));
    tsp::io::save_matrix_csv((dir / "signals.csv").string(), Y);

    json manifest;
    manifest["schema_version"] = kSchemaVersion;
    manifest["seed"] = seed;
    manifest["prng"] = "xoshiro256** seeded via SplitMix64; Box-Muller normals";
    manifest["n_nodes"] = cx.n_nodes();
    manifest["n_edges"] = cx.n_edges();
    manifest["n_triangles"] = cx.n_triangles();
    manifest["samples"] = Y.cols();
    for (auto& [k, v] : extra.items()) manifest[k] = v;
    manifest["provenance"] = prov;
    write_json(dir / "manifest.json", manifest);
}

tsp::TcOptions tc_options(const json& cfg)
{
    tsp::TcOptions tc;
    const auto est = cfg.at("estimator").get<std::string>();
    if (est == "gaussian")
        tc.estimator = tsp::TcEstimator::Gaussian;
    else if (est == "binned")
        tc.estimator = tsp::TcEstimator::Binned;
    else
        throw tsp::ConfigError("estimator must be 'gaussian' or 'binned'");
    tc.bins = cfg.at("bins").get<int>();
    return tc;
}

void cmd_learn_stat(const json& cfg, unsigned threads)
{
    const fs::path input = cfg.at("input").get<std::string>();
    if (!fs::is_directory(input)) throw tsp::IoError("input directory '" + input.string() + "' not found");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(input))
        if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw tsp::EmptyInput("no .csv files in '" + input.string() + "'");

    std::vector<tsp::NodeSeriesSet> subjects;
    json inputs = json::array();
    for (const auto& f : files) {
        subjects.push_back({tsp::io::load_matrix_csv(f.string()), f.stem().string()});
        inputs.push_back(input_record(f.string()));
    }

    tsp::StatisticalConfig sc;
    sc.edge_fraction = cfg.at("edge_fraction").get<double>();
    const auto count = cfg.at("triangles").get<long long>();
    if (count < 0) throw tsp::ConfigError("triangles must be non-negative");
    sc.triangle_count = static_cast<std::size_t>(count);
    sc.tc = tc_options(cfg);
    sc.signed_correlation = cfg.at("signed").get<bool>();
    sc.threads = threads;
    const auto res = tsp::learn_statistical(subjects, sc);

    const auto dir = out_dir(cfg);
    json prov_cfg = cfg;
    prov_cfg.erase("out");
    json prov = provenance("learn-stat", prov_cfg, inputs);
    prov["subjects"] = subjects.size();
    prov["pre_closure_edges"] = res.skeleton_edges.size();
    prov["candidate_triples"] = res.mean_weights.triples.size();
    write_json(dir / "complex.json", complex_document(res.complex, prov));

    std::string w = "i,j,k,weight\n";
    for (std::size_t t = 0; t < res.mean_weights.triples.size(); ++t) {
        const auto& tr = res.mean_weights.triples[t];
        w += std::to_string(tr[0]) + ',' + std::to_string(tr[1]) + ',' + std::to_string(tr[2]) + ',' +
             fmt(res.mean_weights.weights(static_cast<Eigen::Index>(t))) + '\n';
    }
    tsp::io::write_text((dir / "weights.csv").string(), w);

    const auto mean = tsp::mean_zscored_series(subjects);
    const auto s1 = tsp::cofluctuation_edge_signals(mean, res.complex.edges());
    tsp::io::save_matrix_csv((dir / "edge_signals.csv").string(), s1.values);
}

void cmd_learn_joint(const json& cfg, unsigned threads)
{
    const auto skel_path = cfg.at("skeleton").get<std::string>();
    const auto sig_path = cfg.at("signals").get<std::string>();
    const auto skeleton = tsp::io::load_complex(skel_path);
    const auto Y = load_edge_signals(sig_path, skeleton).values;

    tsp::JointLearnConfig jc;
    jc.alpha1 = cfg.at("alpha1").get<double>();
    jc.alpha2 = cfg.at("alpha2").get<double>();
    jc.beta = cfg.at("beta").get<double>();
    jc.presence_threshold = cfg.at("presence_threshold").get<double>();
    jc.q_grid = cfg.at("q_grid").get<std::vector<int>>();
    jc.coarse_step = cfg.at("coarse_step").get<int>();
    if (const double zt = cfg.at("zero_tol").get<double>(); zt > 0) jc.zero_tol = zt;
    jc.solver.tolerance = cfg.at("tolerance").get<double>();
    jc.solver.max_iterations = cfg.at("max_iterations").get<int>();
    jc.threads = threads;
    const auto res = tsp::learn_joint(Y, skeleton, jc);

    const auto dir = out_dir(cfg);
    json prov_cfg = cfg;
    prov_cfg.erase("out");
    json prov = provenance("learn-joint", prov_cfg, json::array({input_record(skel_path), input_record(sig_path)}));
    prov["solenoidal_present"] = res.solenoidal_present;
    prov["q_star"] = res.q_star;
    prov["candidates"] = res.candidates.size();
    const auto learned = tsp::build_complex(skeleton.n_nodes(), skeleton.edges(), res.selected_triangles);
    write_json(dir / "complex.json", complex_document(learned, prov));

    std::string trace = "q,g,n_curl,n_harmonic,converged,error\n";
    std::string timing = "q,seconds\n";
    for (const auto& t : res.trace) {
        trace += std::to_string(t.q) + ',' + (t.ok() ? fmt(t.g) : "nan") + ',' + std::to_string(t.n_curl) + ',' +
                 std::to_string(t.n_harmonic) + ',' + (t.converged ? "1" : "0") + ',' + (t.ok() ? "" : "\"" + t.error + "\"") +
                 '\n';
        timing += std::to_string(t.q) + ',' + fmt(t.seconds) + '\n';
    }
    tsp::io::write_text((dir / "trace.csv").string(), trace);
    tsp::io::write_text((dir / "trace_timing.csv").string(), timing);

    std::string scores = "i,j,k,score,fill_rank\n";
    std::vector<std::size_t> rank(res.candidates.size());
    for (std::size_t r = 0; r < res.fill_order.size(); ++r) rank[res.fill_order[r]] = r;
    for (std::size_t n = 0; n < res.candidates.size() && res.scores.size(); ++n) {
        const auto& t = res.candidates[n];
        scores += std::to_string(t[0]) + ',' + std::to_string(t[1]) + ',' + std::to_string(t[2]) + ',' +
                  fmt(res.scores(static_cast<Eigen::Index>(n))) + ',' + std::to_string(rank[n]) + '\n';
    }
    tsp::io::write_text((dir / "scores.csv").string(), scores);
}

void cmd_decompose(const json& cfg, unsigned threads)
{
    const auto cx_path = cfg.at("complex").get<std::string>();
    const auto sig_path = cfg.at("signals").get<std::string>();
    const auto cx = tsp::io::load_complex(cx_path);
    const auto S = load_edge_signals(sig_path, cx).values;
    std::optional<double> tol;
    if (const double zt = cfg.at("zero_tol").get<double>(); zt > 0) tol = zt;
    const auto spec = tsp::partition_subspaces(tsp::incidence(cx), tol);

    Eigen::MatrixXd irr(S.rows(), S.cols()), sol(S.rows(), S.cols()), harm(S.rows(), S.cols());
    tsp::parallel_for(static_cast<std::size_t>(S.cols()), threads, [&](std::size_t m) {
        const auto c = static_cast<Eigen::Index>(m);
        const auto parts = tsp::hodge_decompose(spec, S.col(c));
        irr.col(c) = parts.irrotational;
        sol.col(c) = parts.solenoidal;
        harm.col(c) = parts.harmonic;
    });

    const auto dir = out_dir(cfg);
    tsp::io::save_matrix_csv((dir / "irrotational.csv").string(), irr);
    tsp::io::save_matrix_csv((dir / "solenoidal.csv").string(), sol);
    tsp::io::save_matrix_csv((dir / "harmonic.csv").string(), harm);

    json prov_cfg = cfg;
    prov_cfg.erase("out");
    const double total = S.squaredNorm();
    json summary;
    summary["schema_version"] = kSchemaVersion;
    const auto d = spec.dims();
    summary["dims"] = {{"gradient", d.gradient}, {"curl", d.curl}, {"harmonic", d.harmonic}};
    summary["energy"] = {{"total", total},
                         {"irrotational", irr.squaredNorm()},
                         {"solenoidal", sol.squaredNorm()},
                         {"harmonic", harm.squaredNorm()}};
    auto share = [&](double e) { return total > 0 ? e / total : 0.0; };
    summary["energy_fraction"] = {{"irrotational", share(irr.squaredNorm())},
                                  {"solenoidal", share(sol.squaredNorm())},
                                  {"harmonic", share(harm.squaredNorm())}};
    summary["provenance"] = provenance("decompose", prov_cfg, json::array({input_record(cx_path), input_record(sig_path)}));
    write_json(dir / "energy.json", summary);
}

json histogram_json(const tsp::Histogram& h) { return {{"edges", h.edges}, {"counts", h.counts}}; }

void save_histogram(const fs::path& path, const tsp::Histogram& h)
{
    std::string s = "lower,upper,count\n";
    for (std::size_t b = 0; b < h.counts.size(); ++b)
        s += fmt(h.edges[b]) + ',' + fmt(h.edges[b + 1]) + ',' + std::to_string(h.counts[b]) + '\n';
    tsp::io::write_text(path.string(), s);
}

void cmd_analyze(const json& cfg, unsigned)
{
    const auto cx_path = cfg.at("complex").get<std::string>();
    const auto sig_path = cfg.at("signals").get<std::string>();
    const auto cx = tsp::io::load_complex(cx_path);
    const auto s1 = load_edge_signals(sig_path, cx);
    tsp::AnalysisConfig ac;
    ac.n_bins = cfg.at("bins").get<int>();
    const auto top = cfg.at("top_nodes").get<long long>();
    const auto cons = cfg.at("conservative").get<long long>();
    if (top < 0 || cons < 0) throw tsp::ConfigError("top_nodes and conservative must be non-negative");
    ac.top_nodes = static_cast<std::size_t>(top);
    ac.conservative_count = static_cast<std::size_t>(cons);
    const auto r = tsp::analyze(cx, s1, ac);

    const auto dir = out_dir(cfg);
    tsp::io::save_vector_csv((dir / "mean_divergence.csv").string(), r.mean_divergence);
    tsp::io::save_vector_csv((dir / "mean_curl.csv").string(), r.mean_curl);
    save_histogram(dir / "histogram_divergence.csv", r.divergence_histogram);
    if (r.curl_histogram) save_histogram(dir / "histogram_curl.csv", *r.curl_histogram);

    json rep;
    rep["schema_version"] = kSchemaVersion;
    rep["mean_divergence"] = std::vector<double>(r.mean_divergence.data(), r.mean_divergence.data() + r.mean_divergence.size());
    rep["mean_curl"] = std::vector<double>(r.mean_curl.data(), r.mean_curl.data() + r.mean_curl.size());
    rep["histograms"]["divergence"] = histogram_json(r.divergence_histogram);
    rep["histograms"]["curl"] = r.curl_histogram ? histogram_json(*r.curl_histogram) : json(nullptr);
    auto nodes = [](const std::vector<tsp::RankedNode>& v) {
        json a = json::array();
        for (const auto& n : v) a.push_back({{"node", n.node}, {"mean_divergence", n.value}});
        return a;
    };
    rep["top_sources"] = nodes(r.top_sources);
    rep["top_sinks"] = nodes(r.top_sinks);
    json cons_arr = json::array();
    for (const auto& t : r.conservative_triangles)
        cons_arr.push_back({{"triangle", t.triangle}, {"mean_curl", t.circulation}});
    rep["conservative_triangles"] = cons_arr;
    rep["node_triangle_participation"] =
        std::vector<int>(r.node_triangle_participation.data(),
                         r.node_triangle_participation.data() + r.node_triangle_participation.size());
    json prov_cfg = cfg;
    prov_cfg.erase("out");
    rep["provenance"] = provenance("analyze", prov_cfg, json::array({input_record(cx_path), input_record(sig_path)}));
    write_json(dir / "report.json", rep);
}

std::vector<Command> make_commands()
{
    const json req = nullptr;
    return {
        {"gen",
         "Generate a synthetic complex and edge signals",
         {{"seed", Kind::Integer, req, "PRNG seed (required)"},
          {"out", Kind::String, req, "output directory"},
          {"nodes", Kind::Integer, 10, "number of nodes"},
          {"edge_prob", Kind::Real, 0.5, "edge probability"},
          {"fill_prob", Kind::Real, 0.5, "3-clique fill probability"},
          {"planted", Kind::Integer, 0, "plant this many edge-disjoint triangles instead of fill_prob"},
          {"samples", Kind::Integer, 100, "time samples M"},
          {"w_grad", Kind::Real, 1.0, "gradient energy weight"},
          {"w_sol", Kind::Real, 1.0, "solenoidal energy weight"},
          {"w_harm", Kind::Real, 1.0, "harmonic energy weight"},
          {"snr_db", Kind::Real, "inf", "signal-to-noise ratio in dB (inf: noiseless)"},
          {"sol_sparsity", Kind::Integer, 0, "non-zeros per column of triangle coefficients (0: dense)"},
          {"harm_sparsity", Kind::Integer, 0, "non-zeros per column of harmonic coefficients (0: dense)"}},
         cmd_gen},
        {"learn-stat",
         "Infer a complex from a directory of per-subject node time-series CSVs",
         {{"input", Kind::String, req, "directory of N x M CSV files"},
          {"out", Kind::String, req, "output directory"},
          {"edge_fraction", Kind::Real, 0.05, "fraction of node pairs kept as edges"},
          {"triangles", Kind::Integer, 200, "number of filled triangles"},
          {"estimator", Kind::String, "gaussian", "total-correlation estimator: gaussian | binned"},
          {"bins", Kind::Integer, 8, "bins per variable for the binned estimator"},
          {"signed", Kind::Flag, false, "threshold signed rather than absolute correlations"}},
         cmd_learn_stat},
        {"learn-joint",
         "Learn filled triangles and sparse edge-signal representations over a skeleton",
         {{"skeleton", Kind::String, req, "complex JSON whose edges form the skeleton"},
          {"signals", Kind::String, req, "E x M edge-signal CSV"},
          {"out", Kind::String, req, "output directory"},
          {"alpha1", Kind::Real, 1e3, "l1 budget for solenoidal coefficients"},
          {"alpha2", Kind::Real, 1e3, "l1 budget for harmonic coefficients"},
          {"beta", Kind::Real, 1.0, "data-fit weight (recorded; no numeric effect)"},
          {"presence_threshold", Kind::Real, 0.05, "relative norm threshold for the solenoidal check"},
          {"q_grid", Kind::IntList, json::array(), "comma-separated q values (default 1..T)"},
          {"coarse_step", Kind::Integer, 0, "coarse q step with local refinement (0: full scan)"},
          {"zero_tol", Kind::Real, 0.0, "eigenvalue zero threshold (0: scale-relative default)"},
          {"tolerance", Kind::Real, 1e-8, "relative objective change for solver convergence"},
          {"max_iterations", Kind::Integer, 5000, "solver iteration cap"}},
         cmd_learn_joint},
        {"decompose",
         "Hodge-decompose edge signals into irrotational, solenoidal and harmonic parts",
         {{"complex", Kind::String, req, "complex JSON"},
          {"signals", Kind::String, req, "E x M edge-signal CSV"},
          {"out", Kind::String, req, "output directory"},
          {"zero_tol", Kind::Real, 0.0, "eigenvalue zero threshold (0: scale-relative default)"}},
         cmd_decompose},
        {"analyze",
         "Mean divergence / curl report with histograms and rankings",
         {{"complex", Kind::String, req, "complex JSON"},
          {"signals", Kind::String, req, "E x M edge-signal CSV"},
          {"out", Kind::String, req, "output directory"},
          {"bins", Kind::Integer, 50, "histogram bins"},
          {"top_nodes", Kind::Integer, 10, "sources/sinks to list"},
          {"conservative", Kind::Integer, 20, "weakest-circulation triangles to list"}},
         cmd_analyze},
    };
}

int fail(int code, const std::string& kind, const std::string& message)
{
    json err{{"error", kind}, {"message", message}, {"exit_code", code}};
    std::cerr << err.dump() << std::endl;
    return code;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Topological signal processing over 2-order simplicial complexes"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    auto commands = make_commands();
    for (auto& cmd : commands) {
        cmd.app = app.add_subcommand(cmd.name, cmd.help);
        cmd.app->add_option("--config", cmd.config_path, "JSON file with option values");
        cmd.app->add_option("--threads", cmd.threads, "worker threads")->check(CLI::PositiveNumber);
        for (const auto& p : cmd.params) {
            if (p.kind == Kind::Flag) {
                cmd.flags[p.key] = false;
                cmd.app->add_flag(flag_name(p.key), cmd.flags[p.key], p.help);
            } else {
                cmd.app->add_option(flag_name(p.key), cmd.raw[p.key], p.help);
            }
        }
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return fail(1, "ConfigError", e.what());
    }

    for (auto& cmd : commands) {
        if (!cmd.app->parsed()) continue;
        try {
            const json cfg = resolve(cmd);
            cmd.run(cfg, cmd.threads);
            return 0;
        } catch (const tsp::Error& e) {
            return fail(static_cast<int>(e.kind()), e.code(), e.what());
        } catch (const json::exception& e) {
            return fail(1, "ConfigError", e.what());
        } catch (const std::exception& e) {
            return fail(3, "InternalError", e.what());
        }
    }
    return fail(1, "ConfigError", "no subcommand given");
}
