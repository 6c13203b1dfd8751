#include "modelspace/io.hpp"

#include <cmath>
#include <cstdio>

#include "modelspace/errors.hpp"

namespace modelspace {

namespace {

Json number(double v) {
    if (std::isfinite(v)) return v;
    if (std::isnan(v)) return "nan";
    return v > 0 ? "inf" : "-inf";
}

Json numbers(const std::vector<double>& v) {
    Json out = Json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

const Json& field(const Json& obj, const char* key, const std::string& path) {
    if (!obj.is_object() || !obj.contains(key)) throw ConfigError(path + "/" + key + ": missing field");
    return obj.at(key);
}

double get_number(const Json& obj, const char* key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_number()) throw ConfigError(path + "/" + key + ": expected a number");
    return v.get<double>();
}

double get_number_or(const Json& obj, const char* key, double fallback, const std::string& path) {
    return obj.contains(key) ? get_number(obj, key, path) : fallback;
}

const Json& get_array(const Json& obj, const char* key, const std::string& path) {
    const Json& v = field(obj, key, path);
    if (!v.is_array()) throw ConfigError(path + "/" + key + ": expected an array");
    return v;
}

void expect_object(const Json& doc, const std::string& path) {
    if (!doc.is_object()) throw ConfigError(path + ": expected an object");
}

void check_keys(const Json& doc, std::initializer_list<const char*> allowed, const std::string& path) {
    for (const auto& [key, value] : doc.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(path + "/" + key + ": unknown field");
    }
}

std::string item(const std::string& path, const char* key, std::size_t i) {
    return path + "/" + key + "/" + std::to_string(i);
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& source) {
    try {
        return Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        std::size_t column = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                column = 1;
            } else {
                ++column;
            }
        }
        throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " + e.what());
    }
}

InnerFunction inner_from_json(const Json& doc, const std::string& path) {
    expect_object(doc, path);
    check_keys(doc, {"blaschke_zeros", "singular_atoms", "generator", "accumulation_angles"}, path);
    std::vector<BlaschkeZero> zeros;
    if (doc.contains("blaschke_zeros")) {
        const Json& arr = get_array(doc, "blaschke_zeros", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = item(path, "blaschke_zeros", i);
            const double mult = get_number_or(arr[i], "mult", 1.0, p);
            if (mult < 1.0 || mult != std::floor(mult)) throw ConfigError(p + "/mult: expected a positive integer");
            zeros.push_back({Complex(get_number(arr[i], "re", p), get_number(arr[i], "im", p)), static_cast<int>(mult)});
        }
    }
    std::vector<SingularAtom> atoms;
    if (doc.contains("singular_atoms")) {
        const Json& arr = get_array(doc, "singular_atoms", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = item(path, "singular_atoms", i);
            atoms.push_back({get_number(arr[i], "angle", p), get_number(arr[i], "mass", p)});
        }
    }
    std::optional<ZeroGenerator> gen;
    if (doc.contains("generator")) {
        const Json& g = doc.at("generator");
        const std::string p = path + "/generator";
        expect_object(g, p);
        ZeroGenerator z;
        const Json& name = field(g, "name", p);
        if (!name.is_string()) throw ConfigError(p + "/name: expected a string");
        z.name = name.get<std::string>();
        if (g.contains("params")) {
            expect_object(g.at("params"), p + "/params");
            for (const auto& [key, value] : g.at("params").items()) {
                if (!value.is_number()) throw ConfigError(p + "/params/" + key + ": expected a number");
                z.params[key] = value.get<double>();
            }
        }
        const double n = get_number(g, "truncation", p);
        if (n < 0.0 || n != std::floor(n)) throw ConfigError(p + "/truncation: expected a nonnegative integer");
        z.truncation = static_cast<int>(n);
        gen = z;
    }
    std::vector<double> accumulation;
    if (doc.contains("accumulation_angles")) {
        const Json& arr = get_array(doc, "accumulation_angles", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            if (!arr[i].is_number()) throw ConfigError(item(path, "accumulation_angles", i) + ": expected a number");
            accumulation.push_back(arr[i].get<double>());
        }
    }
    try {
        return InnerFunction(std::move(zeros), std::move(atoms), std::move(gen), std::move(accumulation));
    } catch (const InvalidArgument& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

DiscMeasure measure_from_json(const Json& doc, const InnerFunction& theta, const std::string& path) {
    expect_object(doc, path);
    check_keys(doc, {"atoms", "boundary_density", "clark"}, path);
    std::vector<MeasureAtom> atoms;
    if (doc.contains("atoms")) {
        const Json& arr = get_array(doc, "atoms", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = item(path, "atoms", i);
            atoms.push_back({Complex(get_number(arr[i], "re", p), get_number(arr[i], "im", p)), get_number(arr[i], "mass", p)});
        }
    }
    std::vector<DensityPiece> density;
    if (doc.contains("boundary_density")) {
        const Json& arr = get_array(doc, "boundary_density", path);
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string p = item(path, "boundary_density", i);
            try {
                density.push_back({make_arc(get_number(arr[i], "start", p), get_number(arr[i], "end", p)),
                                   get_number(arr[i], "density", p)});
            } catch (const InvalidArgument& e) {
                throw ConfigError(p + ": " + e.what());
            }
        }
    }
    DiscMeasure mu;
    try {
        mu = DiscMeasure(std::move(atoms), std::move(density));
    } catch (const InvalidArgument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (doc.contains("clark")) {
        const Json& c = doc.at("clark");
        const std::string p = path + "/clark";
        const Complex alpha(get_number(c, "re", p), get_number(c, "im", p));
        if (!theta.atoms().empty()) throw ConfigError(p + ": the Clark measure needs a finite Blaschke product");
        try {
            mu = mu.plus(clark_measure(InnerFunction::blaschke(theta.flat_zeros()), alpha));
        } catch (const Error& e) {
            throw ConfigError(p + ": " + e.what());
        }
    }
    return mu;
}

Json to_json(const InnerFunction& theta) {
    Json doc = Json::object();
    Json zeros = Json::array();
    for (const auto& z : theta.explicit_zeros()) {
        zeros.push_back({{"re", z.point.real()}, {"im", z.point.imag()}, {"mult", z.multiplicity}});
    }
    doc["blaschke_zeros"] = zeros;
    Json atoms = Json::array();
    for (const auto& a : theta.atoms()) atoms.push_back({{"angle", a.angle}, {"mass", a.mass}});
    doc["singular_atoms"] = atoms;
    if (const auto& g = theta.generator()) {
        Json params = Json::object();
        for (const auto& [k, v] : g->params) params[k] = v;
        doc["generator"] = {{"name", g->name}, {"params", params}, {"truncation", g->truncation}};
    }
    doc["accumulation_angles"] = theta.accumulation_angles();
    return doc;
}

Json to_json(const DiscMeasure& mu) {
    Json atoms = Json::array();
    for (const auto& a : mu.atoms()) atoms.push_back({{"re", a.point.real()}, {"im", a.point.imag()}, {"mass", a.mass}});
    Json density = Json::array();
    for (const auto& d : mu.density()) {
        density.push_back({{"start", d.arc.start}, {"end", d.arc.end}, {"density", d.density}});
    }
    return {{"atoms", atoms}, {"boundary_density", density}};
}

Json to_json(const Witness& w) {
    Json doc = {{"kind", to_string(w.kind)}};
    if (w.kind == WitnessKind::family_arc) {
        doc["family"] = {{"level", w.family.level}, {"shift", w.family.shift}, {"index", w.family.index}};
    }
    if (w.kind == WitnessKind::dyadic_cell) {
        doc["cell"] = {{"level", w.cell.level}, {"index", w.cell.index}};
    }
    doc["square"] = {{"h0", w.square.h0}, {"phi0", w.square.phi0}, {"h", w.square.h}};
    doc["mass"] = number(w.mass);
    doc["length"] = number(w.length);
    doc["ratio"] = number(w.ratio);
    doc["threshold"] = number(w.threshold);
    doc["reason"] = w.reason;
    return doc;
}

Json to_json(const ConditionReport& rep) {
    Json params = Json::object();
    for (const auto& [k, v] : rep.params) params[k] = number(v);
    Json profile = Json::object();
    for (const auto& [k, v] : rep.profile) profile[k] = numbers(v);
    Json doc = {{"criterion", to_string(rep.id)},
                {"verdict", to_string(rep.verdict)},
                {"params", params},
                {"profile", profile},
                {"undecided", rep.undecided},
                {"notes", rep.notes},
                {"convention", rep.convention}};
    doc["witness"] = rep.witness ? to_json(*rep.witness) : Json(nullptr);
    return doc;
}

Json to_json(const CriterionSum& sum) {
    Json params = Json::object();
    for (const auto& [k, v] : sum.params) params[k] = number(v);
    Json doc = {{"criterion", to_string(sum.id)},
                {"verdict", to_string(sum.trend)},
                {"value", number(sum.value)},
                {"terms", sum.terms},
                {"params", params},
                {"partial_sums", numbers(sum.partial_sums)},
                {"block_sums", numbers(sum.block_sums)},
                {"block_ratios", numbers(sum.block_ratios)},
                {"undecided", sum.undecided},
                {"undecided_value", number(sum.undecided_value)},
                {"uncovered_mass", number(sum.uncovered_mass)},
                {"support_violations", sum.support_violations},
                {"convention", kLengthConvention}};
    doc["witness"] = sum.witness ? to_json(*sum.witness) : Json(nullptr);
    return doc;
}

Json to_json(const SpectralReport& rep) {
    Json schatten = Json::object();
    for (const auto& [r, v] : rep.schatten) {
        char key[32];
        std::snprintf(key, sizeof key, "%g", r);
        schatten[key] = number(v);
    }
    return {{"singular_values", numbers(rep.singular_values)},
            {"operator_norm", number(rep.operator_norm)},
            {"hilbert_schmidt", number(rep.hilbert_schmidt)},
            {"schatten", schatten},
            {"eigen_residual", number(rep.eigen_residual)},
            {"provenance",
             {{"truncation", rep.provenance.truncation},
              {"dimension", rep.provenance.dimension},
              {"atoms", rep.provenance.atoms},
              {"density_pieces", rep.provenance.density_pieces},
              {"tol", rep.provenance.tol}}}};
}

Json gram_to_json(const Eigen::MatrixXcd& g) {
    Json re = Json::array();
    Json im = Json::array();
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
        Json rr = Json::array();
        Json ri = Json::array();
        for (Eigen::Index j = 0; j < g.cols(); ++j) {
            rr.push_back(g(i, j).real());
            ri.push_back(g(i, j).imag());
        }
        re.push_back(rr);
        im.push_back(ri);
    }
    return {{"re", re}, {"im", im}};
}

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string config_hash(const Json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

}  // namespace modelspace
