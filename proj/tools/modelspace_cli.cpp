// Command-line front end: analyze, levelset, decompose, gram.
//
// Exit codes: 0 completed with every verdict holding, 1 configuration or
// runtime error, 2 some verdict failed with a witness, 3 inconclusive only.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "modelspace/errors.hpp"
#include "modelspace/io.hpp"
#include "modelspace/kernels.hpp"

using namespace modelspace;

namespace {

constexpr const char* kToolVersion = "0.1.0";

struct Overrides {
    std::string config;
    std::optional<double> epsilon, p, tol, A;
    std::optional<std::vector<double>> r;
    std::optional<int> n, depth;
    std::optional<std::uint64_t> seed;
    std::string out;
};

struct Job {
    Json config;
    InnerFunction theta;
    DiscMeasure mu;
    double epsilon = 0.5;
    std::vector<double> r{2.0};
    double p = 3.0;
    int n = 1;
    int depth = 10;
    double tol = 1e-6;
    double A = 1.0;
    std::optional<std::uint64_t> seed;
    bool cls = false;
    std::vector<double> delta_grid;
    std::vector<std::string> criteria;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

double param_number(const Json& params, const char* key, double fallback) {
    if (!params.contains(key)) return fallback;
    if (!params.at(key).is_number()) throw ConfigError(std::string("/params/") + key + ": expected a number");
    return params.at(key).get<double>();
}

int param_int(const Json& params, const char* key, int fallback) {
    const double v = param_number(params, key, fallback);
    if (v != std::floor(v)) throw ConfigError(std::string("/params/") + key + ": expected an integer");
    return static_cast<int>(v);
}

std::vector<double> param_list(const Json& params, const char* key, std::vector<double> fallback) {
    if (!params.contains(key)) return fallback;
    const Json& v = params.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array()) throw ConfigError(std::string("/params/") + key + ": expected a number or an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw ConfigError(std::string("/params/") + key + "/" + std::to_string(i) + ": expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

const std::vector<std::string> kKnownCriteria{"carleson", "vanishing", "volberg_treil", "V1", "V2", "thm31",
                                              "schatten_sufficient", "schatten_necessary", "luecking",
                                              "thm54_family", "thm14", "bernstein_ratio"};

Job load_job(const Overrides& o, bool needs_measure) {
    Job job;
    job.config = parse_json_text(read_file(o.config), o.config);
    if (!job.config.is_object()) throw ConfigError(o.config + ": expected a JSON object");
    for (const auto& [key, value] : job.config.items()) {
        if (key != "inner" && key != "measure" && key != "params") throw ConfigError("/" + key + ": unknown field");
    }
    if (!job.config.contains("params")) job.config["params"] = Json::object();
    Json& params = job.config["params"];
    if (!params.is_object()) throw ConfigError("/params: expected an object");
    if (o.epsilon) params["epsilon"] = *o.epsilon;
    if (o.r) params["r"] = *o.r;
    if (o.p) params["p"] = *o.p;
    if (o.n) params["n"] = *o.n;
    if (o.depth) params["depth"] = *o.depth;
    if (o.tol) params["tol"] = *o.tol;
    if (o.seed) params["seed"] = *o.seed;
    if (o.A) params["A"] = *o.A;

    for (const auto& [key, value] : params.items()) {
        static const std::vector<std::string> allowed{"epsilon", "r", "p", "n", "depth", "tol", "seed",
                                                      "A", "cls", "delta_grid", "criteria"};
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("/params/" + key + ": unknown field");
        }
    }
    job.epsilon = param_number(params, "epsilon", job.epsilon);
    if (!(job.epsilon > 0.0 && job.epsilon < 1.0)) throw ConfigError("/params/epsilon: must lie in (0,1)");
    job.r = param_list(params, "r", job.r);
    for (double r : job.r) {
        if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("/params/r: values must be positive");
    }
    job.p = param_number(params, "p", job.p);
    if (!(job.p >= 1.0)) throw ConfigError("/params/p: must be at least 1");
    job.n = param_int(params, "n", job.n);
    if (job.n < 1) throw ConfigError("/params/n: must be at least 1");
    job.depth = param_int(params, "depth", job.depth);
    if (job.depth < 2 || job.depth > kMaxFamilyDepth) throw ConfigError("/params/depth: must lie in [2, 24]");
    job.tol = param_number(params, "tol", job.tol);
    if (!(job.tol > 0.0)) throw ConfigError("/params/tol: must be positive");
    job.A = param_number(params, "A", job.A);
    if (!(job.A > 0.0)) throw ConfigError("/params/A: must be positive");
    if (params.contains("seed")) {
        const Json& s = params.at("seed");
        if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("/params/seed: expected a nonnegative integer");
        job.seed = s.get<std::uint64_t>();
    }
    if (params.contains("cls")) {
        if (!params.at("cls").is_boolean()) throw ConfigError("/params/cls: expected a boolean");
        job.cls = params.at("cls").get<bool>();
    }
    job.delta_grid = param_list(params, "delta_grid", {});
    if (job.delta_grid.empty()) {
        for (int j = 1; j <= job.depth; ++j) job.delta_grid.push_back(std::ldexp(1.0, -j));
    }
    if (params.contains("criteria")) {
        const Json& c = params.at("criteria");
        if (!c.is_array()) throw ConfigError("/params/criteria: expected an array");
        for (std::size_t i = 0; i < c.size(); ++i) {
            const std::string where = "/params/criteria/" + std::to_string(i);
            if (!c[i].is_string()) throw ConfigError(where + ": expected a string");
            const std::string name = c[i].get<std::string>();
            if (std::find(kKnownCriteria.begin(), kKnownCriteria.end(), name) == kKnownCriteria.end()) {
                throw ConfigError(where + ": unknown criterion '" + name + "'");
            }
            job.criteria.push_back(name);
        }
    }

    if (!job.config.contains("inner")) throw ConfigError("/inner: missing field");
    job.theta = inner_from_json(job.config.at("inner"));
    if (needs_measure) {
        job.mu = job.config.contains("measure") ? measure_from_json(job.config.at("measure"), job.theta) : DiscMeasure{};
    }
    return job;
}

Json provenance(const Job& job, const char* command) {
    Json prov = {{"command", command},
                 {"tool_version", kToolVersion},
                 {"config_hash", config_hash(job.config)},
                 {"truncation", job.theta.truncation()},
                 {"zero_count", job.theta.zero_count()},
                 {"epsilon", job.epsilon},
                 {"depth", job.depth},
                 {"tol", job.tol},
                 {"convention", kLengthConvention}};
    prov["seed"] = job.seed ? Json(*job.seed) : Json(nullptr);
    return prov;
}

void emit(const Overrides& o, const std::string& name, const std::string& body) {
    if (o.out.empty()) {
        std::cout << body;
        return;
    }
    std::filesystem::create_directories(o.out);
    const auto path = std::filesystem::path(o.out) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError(path.string() + ": cannot write");
    out << body;
}

bool finite_product(const InnerFunction& theta) {
    return theta.atoms().empty() && theta.zero_count() > 0 && theta.zero_count() <= kMaxBasisSize;
}

// Verdict bookkeeping for the exit code.
struct Tally {
    bool failed = false;
    bool inconclusive = false;

    void add(Verdict v) {
        failed = failed || v == Verdict::fails_with_witness;
        inconclusive = inconclusive || v == Verdict::inconclusive;
    }
    int exit_code() const { return failed ? 2 : inconclusive ? 3 : 0; }
};

Json error_entry(const std::string& criterion, const std::exception& e) {
    return {{"criterion", criterion}, {"verdict", to_string(Verdict::inconclusive)}, {"error", e.what()}};
}

int cmd_analyze(const Overrides& o) {
    const Job job = load_job(o, true);
    std::vector<std::string> wanted = job.criteria;
    if (wanted.empty()) {
        wanted = {"volberg_treil", "V2", "schatten_sufficient", "schatten_necessary", "luecking", "thm54_family"};
        if (!job.theta.boundary_spectrum().empty()) wanted.insert(wanted.begin() + 1, "V1");
        if (job.cls) wanted.push_back("thm14");
    }
    auto want = [&](const char* name) { return std::find(wanted.begin(), wanted.end(), name) != wanted.end(); };

    Tally tally;
    Json reports = Json::array();
    Json sums = Json::array();
    auto run_report = [&](const std::string& name, auto&& fn) {
        try {
            const ConditionReport rep = fn();
            tally.add(rep.verdict);
            reports.push_back(to_json(rep));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            tally.add(Verdict::inconclusive);
            reports.push_back(error_entry(name, e));
        }
    };
    auto run_sum = [&](const std::string& name, auto&& fn) {
        try {
            const CriterionSum s = fn();
            tally.add(s.trend);
            sums.push_back(to_json(s));
        } catch (const Error& e) {
            tally.add(Verdict::inconclusive);
            sums.push_back(error_entry(name, e));
        }
    };

    if (want("carleson")) run_report("carleson", [&] { return check_carleson(job.mu, job.depth); });
    if (want("vanishing")) run_report("vanishing", [&] { return check_vanishing(job.mu, job.depth); });
    if (want("volberg_treil")) {
        run_report("volberg_treil", [&] { return check_volberg_treil(job.theta, job.epsilon, job.mu, job.depth); });
    }
    if (want("V1")) {
        run_report("V1", [&] { return check_V1(job.theta, job.mu, job.delta_grid, job.epsilon, job.depth); });
    }
    if (want("V2")) run_report("V2", [&] { return check_V2(job.theta, job.epsilon, job.mu, job.depth); });

    std::optional<WhitneyDecomposition> whitney;
    auto decomposition = [&]() -> const WhitneyDecomposition& {
        if (!whitney) whitney = whitney_decompose(job.theta, job.epsilon, job.tol);
        return *whitney;
    };
    if (want("thm31")) {
        for (double r : job.r) {
            if (!(r > 1.0 && r < job.p)) continue;
            try {
                const Thm31Reports t = check_thm31(job.theta, whitney_squares(decomposition()), job.mu, job.p, r,
                                                   job.depth, job.tol);
                tally.add(t.bounded.verdict);
                tally.add(t.compact.verdict);
                reports.push_back(to_json(t.bounded));
                reports.push_back(to_json(t.compact));
            } catch (const Error& e) {
                tally.add(Verdict::inconclusive);
                reports.push_back(error_entry("thm31", e));
            }
        }
    }
    for (double r : job.r) {
        if (want("schatten_sufficient")) {
            run_sum("schatten_sufficient", [&] { return schatten_sufficient_sum(decomposition(), job.mu, r); });
        }
        if (want("schatten_necessary")) {
            run_sum("schatten_necessary",
                    [&] { return schatten_necessary_sum(job.theta, job.epsilon, job.mu, r, job.depth); });
        }
        if (want("luecking")) run_sum("luecking", [&] { return luecking_sum(job.mu, r, job.depth); });
        if (want("thm54_family")) {
            run_sum("thm54_family",
                    [&] { return thm54_family_sum(job.theta, job.epsilon, job.A, job.mu, r, job.depth); });
        }
        if (want("thm14") && r >= 1.0) {
            run_report("thm14",
                       [&] { return check_thm14(job.theta, job.cls, job.epsilon, job.mu, r, job.depth, job.tol); });
        }
    }

    Json bundle = {{"provenance", provenance(job, "analyze")}, {"reports", reports}, {"sums", sums}};
    if (want("bernstein_ratio")) {
        if (job.p != 2.0 && !job.seed) throw ConfigError("/params/seed: required for the sampled Bernstein ratio");
        const BernsteinWeightSpec spec{job.p, job.n, WeightKind::w_pn, job.epsilon};
        try {
            const BernsteinRatio b = bernstein_ratio(job.theta, job.mu, spec, 256, job.seed.value_or(0), job.tol);
            bundle["bernstein_ratio"] = {{"value", b.value}, {"exact", b.exact}, {"samples", b.samples},
                                         {"seed", b.seed}, {"p", job.p}, {"n", job.n}};
        } catch (const Error& e) {
            bundle["bernstein_ratio"] = {{"error", e.what()}};
        }
    }
    if (finite_product(job.theta)) {
        try {
            const EmbeddingGram g = embedding_gram(InnerFunction::blaschke(job.theta.flat_zeros()), job.mu);
            std::vector<double> r_list = job.r;
            for (double extra : {1.0, 2.0}) {
                if (std::find(r_list.begin(), r_list.end(), extra) == r_list.end()) r_list.push_back(extra);
            }
            Json oracle = to_json(singular_values(g, r_list));
            oracle["gram"] = gram_to_json(g.matrix);
            bundle["oracle"] = oracle;
        } catch (const Error& e) {
            bundle["oracle"] = {{"error", e.what()}};
        }
    } else {
        bundle["oracle"] = nullptr;
    }
    const int code = tally.exit_code();
    bundle["exit_code"] = code;
    emit(o, "analyze.json", bundle.dump(2) + "\n");
    return code;
}

int cmd_levelset(const Overrides& o) {
    const Job job = load_job(o, false);
    std::ostringstream csv;
    csv.precision(17);
    csv << "x,y,cell_size\n";
    for (const auto& c : level_set_boundary_cells(job.theta, job.epsilon, job.tol)) {
        csv << c.x << ',' << c.y << ',' << c.size << '\n';
    }
    emit(o, "levelset.csv", csv.str());
    return 0;
}

int cmd_decompose(const Overrides& o) {
    const Job job = load_job(o, false);
    emit(o, "decompose.csv", whitney_decompose(job.theta, job.epsilon, job.tol).to_csv());
    return 0;
}

int cmd_gram(const Overrides& o) {
    const Job job = load_job(o, true);
    if (!finite_product(job.theta)) throw ConfigError("/inner: gram needs a finite Blaschke product with 1..64 zeros");
    const EmbeddingGram g = embedding_gram(InnerFunction::blaschke(job.theta.flat_zeros()), job.mu,
                                           std::min(job.tol, 1e-12));
    Json doc = to_json(singular_values(g, job.r));
    doc["gram"] = gram_to_json(g.matrix);
    doc["provenance"].update(provenance(job, "gram"));
    emit(o, "gram.json", doc.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Embedding criteria for model spaces"};
    app.require_subcommand(1);
    Overrides o;
    std::vector<CLI::App*> commands{
        app.add_subcommand("analyze", "Run the criteria and the spectral oracle; write a JSON bundle"),
        app.add_subcommand("levelset", "CSV of quadtree cells straddling |Theta| = epsilon"),
        app.add_subcommand("decompose", "Whitney decomposition as CSV"),
        app.add_subcommand("gram", "Embedding Gram matrix and singular values as JSON")};
    for (auto* cmd : commands) {
        cmd->add_option("--config", o.config, "JSON job configuration")->required()->check(CLI::ExistingFile);
        cmd->add_option_function<double>("--epsilon", [&](double v) { o.epsilon = v; }, "Level-set parameter");
        cmd->add_option_function<std::vector<double>>("--r", [&](const std::vector<double>& v) { o.r = v; },
                                                      "Schatten exponents")->delimiter(',');
        cmd->add_option_function<double>("--p", [&](double v) { o.p = v; }, "Integrability exponent");
        cmd->add_option_function<int>("--n", [&](int v) { o.n = v; }, "Derivative order");
        cmd->add_option_function<int>("--depth", [&](int v) { o.depth = v; }, "Arc family and dyadic depth");
        cmd->add_option_function<double>("--tol", [&](double v) { o.tol = v; }, "Tolerance");
        cmd->add_option_function<std::uint64_t>("--seed", [&](std::uint64_t v) { o.seed = v; }, "Sampling seed");
        cmd->add_option_function<double>("--A", [&](double v) { o.A = v; }, "Distance factor of the dyadic family");
        cmd->add_option("--out", o.out, "Output directory (stdout when omitted)");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    try {
        if (commands[0]->parsed()) return cmd_analyze(o);
        if (commands[1]->parsed()) return cmd_levelset(o);
        if (commands[2]->parsed()) return cmd_decompose(o);
        return cmd_gram(o);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
