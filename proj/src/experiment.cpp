#include "psdocalc/experiment.hpp"

#include "psdocalc/bmo.hpp"
#include "psdocalc/calculus.hpp"
#include "psdocalc/decay.hpp"
#include "psdocalc/psido.hpp"
#include "psdocalc/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace psdocalc {

using nlohmann::json;
namespace fs = std::filesystem;

ConfigError::ConfigError(std::string path, const std::string& detail)
    : InvalidArgument("config error at " + path + ": " + detail), path_(std::move(path)) {}

bool RunResult::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

bool operator==(const ExperimentConfig& a, const ExperimentConfig& b) {
    return config_to_json(a) == config_to_json(b);
}

std::vector<std::string> recipe_names() {
    return {"opnorm",          "heat-decay",    "lemma-multiplier", "decompose-decay",   "thm-s10",
            "thm-s1delta",     "prop-dual-slope", "t1-correlation", "paraproduct-bound", "assumption-checks"};
}

namespace {

// Walks one JSON object, remembering which keys were consumed.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object())
            throw ConfigError(path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    void require(const std::string& key) {
        if (!has(key))
            throw ConfigError(at(key), "required key is missing");
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void string(const std::string& key, std::string& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_string())
            throw ConfigError(at(key), "expected a string");
        out = v.get<std::string>();
    }

    void number(const std::string& key, double& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_number())
            throw ConfigError(at(key), "expected a number");
        out = v.get<double>();
    }

    void integer(const std::string& key, int& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_number_integer())
            throw ConfigError(at(key), "expected an integer");
        out = v.get<int>();
    }

    void unsigned_integer(const std::string& key, std::uint64_t& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
            throw ConfigError(at(key), "expected a nonnegative integer");
        out = v.get<std::uint64_t>();
    }

    template <class T>
    void list(const std::string& key, std::vector<T>& out) {
        if (!has(key))
            return;
        const json& v = j_.at(key);
        if (!v.is_array())
            throw ConfigError(at(key), "expected an array");
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const bool ok = std::is_integral_v<T> ? v[i].is_number_integer() : v[i].is_number();
            if (!ok)
                throw ConfigError(at(key) + "[" + std::to_string(i) + "]",
                                  std::is_integral_v<T> ? "expected an integer" : "expected a number");
            out.push_back(v[i].get<T>());
        }
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(at(it.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class F>
void guarded(const std::string& path, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const InvalidArgument& e) {
        throw ConfigError(path, e.what());
    }
}

ClassParams read_params(Reader& r) {
    ClassParams p;
    r.number("s", p.s);
    r.number("rho", p.rho);
    r.number("delta", p.delta);
    r.number("m", p.m);
    return p;
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig c;
    Reader top(j, "$");
    top.string("recipe", c.recipe);
    const auto names = recipe_names();
    if (std::find(names.begin(), names.end(), c.recipe) == names.end())
        throw ConfigError("$.recipe", "unknown recipe '" + c.recipe + "'");
    top.unsigned_integer("seed", c.seed);
    top.string("output", c.output);

    top.require("space");
    {
        Reader s(top.raw("space"), "$.space");
        s.require("kind");
        std::string kind, measure = "counting";
        s.string("kind", kind);
        guarded("$.space.kind", [&] { c.space.kind = parse_space_kind(kind); });
        s.require("size");
        s.integer("size", c.space.size);
        s.integer("size2", c.space.size2);
        s.string("measure", measure);
        guarded("$.space.measure", [&] { c.space.measure = parse_measure_choice(measure); });
        s.finish();
        if (c.space.size < 1)
            throw ConfigError("$.space.size", "must be positive");
    }
    if (top.has("operator")) {
        Reader o(top.raw("operator"), "$.operator");
        o.string("kind", c.operator_kind);
        guarded("$.operator.kind", [&] { parse_operator_kind(c.operator_kind); });
        o.string("coefficient", c.coefficient);
        guarded("$.operator.coefficient", [&] { SymbolExpr::parse(c.coefficient); });
        o.finish();
    }
    if (top.has("symbols")) {
        const json& arr = top.raw("symbols");
        if (!arr.is_array())
            throw ConfigError("$.symbols", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string path = "$.symbols[" + std::to_string(i) + "]";
            Reader r(arr[i], path);
            SymbolSpec s;
            r.string("builtin", s.builtin);
            r.string("expression", s.expression);
            s.params = read_params(r);
            r.finish();
            if (s.builtin.empty() == s.expression.empty())
                throw ConfigError(path, "exactly one of 'builtin' and 'expression' is required");
            if (!s.builtin.empty()) {
                const auto ids = builtin_symbol_ids();
                if (std::find(ids.begin(), ids.end(), s.builtin) == ids.end())
                    throw ConfigError(path + ".builtin", "unknown builtin symbol '" + s.builtin + "'");
            } else {
                guarded(path + ".expression", [&] { SymbolExpr::parse(s.expression); });
            }
            c.symbols.push_back(s);
        }
    }
    if (top.has("scales")) {
        Reader s(top.raw("scales"), "$.scales");
        ScalesConfig& sc = c.scales;
        s.list("t", sc.t);
        s.list("levels", sc.levels);
        s.list("deltas", sc.deltas);
        s.integer("q", sc.q);
        s.integer("l_max", sc.l_max);
        s.number("nu", sc.nu);
        s.number("p", sc.p);
        s.integer("M", sc.M);
        s.number("s", sc.s);
        s.number("shift", sc.shift);
        s.integer("count", sc.count);
        s.finish();
        for (std::size_t i = 0; i < sc.t.size(); ++i)
            if (!(sc.t[i] > 0))
                throw ConfigError("$.scales.t[" + std::to_string(i) + "]", "scales must be positive");
        if (sc.count < 1)
            throw ConfigError("$.scales.count", "must be positive");
        if (!(sc.p >= 1))
            throw ConfigError("$.scales.p", "must be >= 1");
    }
    if (top.has("tolerances")) {
        Reader t(top.raw("tolerances"), "$.tolerances");
        Tolerances& tol = c.tolerances;
        t.number("spread", tol.spread);
        t.number("min_rate", tol.min_rate);
        t.number("min_r2", tol.min_r2);
        t.number("decay_r2", tol.decay_r2);
        t.number("slope_tol", tol.slope_tol);
        t.number("max_decay_slope", tol.max_decay_slope);
        t.number("residual", tol.residual);
        t.number("para_spread", tol.para_spread);
        t.finish();
    }
    top.finish();
    return c;
}

json config_to_json(const ExperimentConfig& c) {
    json j;
    j["recipe"] = c.recipe;
    j["seed"] = c.seed;
    j["output"] = c.output;
    j["space"] = {{"kind", to_string(c.space.kind)},
                  {"size", c.space.size},
                  {"size2", c.space.size2},
                  {"measure", to_string(c.space.measure)}};
    j["operator"] = {{"kind", c.operator_kind}, {"coefficient", c.coefficient}};
    j["symbols"] = json::array();
    for (const auto& s : c.symbols) {
        json e = {{"s", s.params.s}, {"rho", s.params.rho}, {"delta", s.params.delta}, {"m", s.params.m}};
        if (!s.builtin.empty())
            e["builtin"] = s.builtin;
        else
            e["expression"] = s.expression;
        j["symbols"].push_back(e);
    }
    const ScalesConfig& sc = c.scales;
    j["scales"] = {{"t", sc.t},         {"levels", sc.levels}, {"deltas", sc.deltas}, {"q", sc.q},
                   {"l_max", sc.l_max}, {"nu", sc.nu},         {"p", sc.p},           {"M", sc.M},
                   {"s", sc.s},         {"shift", sc.shift},   {"count", sc.count}};
    const Tolerances& t = c.tolerances;
    j["tolerances"] = {{"spread", t.spread},       {"min_rate", t.min_rate},
                       {"min_r2", t.min_r2},       {"decay_r2", t.decay_r2},
                       {"slope_tol", t.slope_tol}, {"max_decay_slope", t.max_decay_slope},
                       {"residual", t.residual},   {"para_spread", t.para_spread}};
    return j;
}

ExperimentConfig load_config(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        throw ConfigError("$", "cannot open config file " + file.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
    return config_from_json(j);
}

std::string config_hash(const ExperimentConfig& c) {
    const std::string s = config_to_json(c).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Setup make_setup(const SpaceSpec& spec, const std::string& operator_kind, const std::string& coefficient) {
    MetricMeasureSpace space = build_space(spec);
    SelfAdjointOperator op;
    switch (parse_operator_kind(operator_kind)) {
    case OperatorKind::graph_laplacian: op = build_graph_laplacian(space); break;
    case OperatorKind::divergence_form: {
        const SymbolExpr e = SymbolExpr::parse(coefficient);
        if (e.max_feature() >= int(space.feature_dim()))
            throw InvalidArgument("coefficient uses x" + std::to_string(e.max_feature()) + " but the space has " +
                                  std::to_string(space.feature_dim()) + " features");
        std::vector<double> a;
        for (const auto& [u, v] : space.edges()) {
            std::vector<double> mid(space.feature_dim());
            for (std::size_t i = 0; i < mid.size(); ++i)
                mid[i] = 0.5 * (space.coords(u)[i] + space.coords(v)[i]);
            a.push_back(e.eval(0.0, mid));
        }
        op = build_divergence_form(space, a);
        break;
    }
    case OperatorKind::sub_laplacian: op = build_sub_laplacian(space, edge_difference_fields(space)); break;
    }
    SpectralData sd = eigendecompose(op);
    return {std::move(space), std::move(op), std::move(sd)};
}

Symbol make_symbol(const SymbolSpec& spec, const MetricMeasureSpace& space, const SpectralData& sd) {
    if (!spec.builtin.empty())
        return builtin_symbol(spec.builtin, space, sd, spec.params);
    return symbol_from_text(spec.expression, space, spec.params);
}

std::string symbol_label(const SymbolSpec& spec) {
    const std::string& s = spec.builtin.empty() ? spec.expression : spec.builtin;
    if (s.find_first_of(",\"") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s)
        q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

SymbolSpec read_symbol_file(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        throw InvalidArgument("cannot open symbol file " + file.string());
    SymbolSpec out;
    std::string line, expr;
    while (std::getline(in, line)) {
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos)
            continue;
        if (line[first] == '#') {
            std::istringstream ss(line.substr(first + 1));
            std::string tok;
            while (ss >> tok) {
                const auto eq = tok.find('=');
                if (eq == std::string::npos)
                    continue;
                const std::string key = tok.substr(0, eq);
                double v = 0;
                try {
                    v = std::stod(tok.substr(eq + 1));
                } catch (const std::exception&) {
                    throw InvalidArgument("bad header value '" + tok + "' in " + file.string());
                }
                if (key == "s")
                    out.params.s = v;
                else if (key == "rho")
                    out.params.rho = v;
                else if (key == "delta")
                    out.params.delta = v;
                else if (key == "m")
                    out.params.m = v;
                else
                    throw InvalidArgument("unknown header key '" + key + "' in " + file.string());
            }
            continue;
        }
        expr += line + " ";
    }
    if (expr.find_first_not_of(" \t\r\n") == std::string::npos)
        throw InvalidArgument("symbol file " + file.string() + " has no expression");
    const auto ids = builtin_symbol_ids();
    const std::string trimmed = expr.substr(0, expr.find_last_not_of(" \t\r\n") + 1);
    if (std::find(ids.begin(), ids.end(), trimmed) != ids.end())
        out.builtin = trimmed;
    else
        out.expression = trimmed;
    return out;
}

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

class Writer {
public:
    Writer(fs::path dir, RunResult& res) : dir_(std::move(dir)), res_(res) {}

    void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out)
            throw ArtifactError("cannot write " + (dir_ / name).string());
        body(out);
        res_.files.push_back(name);
    }

private:
    fs::path dir_;
    RunResult& res_;
};

void check_le(RunResult& r, const std::string& name, double value, double bound) {
    r.checks.push_back({name, value, bound, "<=", value <= bound});
}
void check_ge(RunResult& r, const std::string& name, double value, double bound) {
    r.checks.push_back({name, value, bound, ">=", value >= bound});
}
void info(RunResult& r, const std::string& name, double value) { r.checks.push_back({name, value, 0.0, "info", true}); }

double spread(const std::vector<double>& v) {
    const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *lo > 0 ? *hi / *lo : HUGE_VAL;
}

std::vector<SymbolSpec> symbols_or(const ExperimentConfig& c, SymbolSpec fallback) {
    return c.symbols.empty() ? std::vector<SymbolSpec>{fallback} : c.symbols;
}

template <class T>
std::vector<T> or_default(const std::vector<T>& v, std::vector<T> d) {
    return v.empty() ? d : v;
}

int bmo_order(const ExperimentConfig& c, const MetricMeasureSpace& space) {
    return c.scales.M > 0 ? c.scales.M : default_bmo_M(doubling_profile(space).n);
}

void recipe_opnorm(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    std::vector<std::pair<std::string, BlockNorm>> rows;
    for (const auto& spec : symbols_or(c, {"one", "", {}}))
        rows.emplace_back(symbol_label(spec), opnorm(make_symbol(spec, s.space, s.sd), s.sd, c.scales.p, c.seed));
    w.write("opnorm.csv", [&](std::ostream& os) {
        os << "symbol,p,norm,lower_bound\n";
        for (const auto& [label, n] : rows)
            os << label << "," << num(c.scales.p) << "," << num(n.value) << "," << (n.lower_bound ? 1 : 0) << "\n";
    });
    for (const auto& [label, n] : rows)
        info(r, "opnorm[" + label + "]", n.value);
}

void recipe_heat_decay(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    HeatDecayOptions opt;
    opt.seed = c.seed;
    opt.p = opt.q = c.scales.p;
    const DecayReport rep = heat_decay(s.sd, s.space, or_default(c.scales.t, {1.0, 4.0, 16.0}), s.op.order_m, opt);
    w.write("decay.csv", [&](std::ostream& os) { write_decay_csv(rep, os); });
    check_ge(r, "gaussian_rate", rep.c, c.tolerances.min_rate);
    check_ge(r, "gaussian_fit_r2", rep.r2, c.tolerances.min_r2);
    info(r, "max_ratio", rep.max_ratio);
}

void recipe_lemma_multiplier(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    const double m = s.op.order_m;
    const double N = std::floor(c.scales.nu / m) + 1;
    auto family = [&](double radius) {
        MultiplierSpec spec;
        spec.r = radius;
        spec.N = N;
        spec.m = m;
        spec.nu = c.scales.nu;
        const double rm = std::pow(radius, m);
        spec.F = [rm, N](double xi) { return std::pow(rm * xi, N) * std::exp(-rm * xi); };
        return spec;
    };
    MultiplierCheckOptions opt;
    opt.p = c.scales.p;
    opt.seed = c.seed;
    const double n = doubling_profile(s.space).n;
    const DecayReport rep =
        multiplier_offdiag_check(s.sd, s.space, family, or_default(c.scales.t, {2.0, 4.0, 8.0}), c.scales.nu, n, opt);
    w.write("decay.csv", [&](std::ostream& os) { write_decay_csv(rep, os); });
    check_ge(r, "fitted_order", rep.exponent, c.scales.nu);
    info(r, "constant_C", rep.C);
}

void recipe_decompose(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    const SymbolSpec spec = symbols_or(c, {"decompose_test", "", {}}).front();
    const Symbol sigma = make_symbol(spec, s.space, s.sd);
    const int q = c.scales.q > 0 ? c.scales.q : 32;
    const PartitionOfUnity pu(8, q);
    const ScaleGrid grid = pu.grid(std::ldexp(1.0, -7));
    const ElementaryDecomposition d =
        decompose(sigma, s.space.size(), pu, grid, c.scales.l_max, 4 * (c.scales.l_max + 1));
    const double res = reconstruct_residual(d, probe_grid(1e-2, d.band_hi(), 16));
    w.write("decomposition.csv", [&](std::ostream& os) { write_decomposition_csv(d, os); });
    check_le(r, "reconstruction_residual", res, c.tolerances.residual);
    check_le(r, "coefficient_decay_slope", -d.decay_M, c.tolerances.max_decay_slope);
    check_ge(r, "coefficient_decay_r2", d.decay_r2, c.tolerances.decay_r2);
}

void recipe_levels(const ExperimentConfig& c, Writer& w, RunResult& r, SymbolSpec fallback) {
    const auto levels = or_default(c.scales.levels, {64, 128, 256});
    const auto specs = symbols_or(c, fallback);
    std::map<std::string, std::vector<double>> norms;
    std::ostringstream csv;
    csv << "level,symbol,norm,lower_bound\n";
    for (int level : levels) {
        SpaceSpec sp = c.space;
        sp.size = level;
        const Setup s = make_setup(sp, c.operator_kind, c.coefficient);
        for (const auto& spec : specs) {
            const BlockNorm n = opnorm(make_symbol(spec, s.space, s.sd), s.sd, c.scales.p, c.seed);
            norms[symbol_label(spec)].push_back(n.value);
            csv << level << "," << symbol_label(spec) << "," << num(n.value) << "," << (n.lower_bound ? 1 : 0) << "\n";
        }
    }
    w.write("opnorm_levels.csv", [&](std::ostream& os) { os << csv.str(); });
    for (const auto& [label, v] : norms)
        check_le(r, "max_norm_ratio[" + label + "]", spread(v), c.tolerances.spread);
}

void recipe_dual_slope(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    const auto ts = or_default(c.scales.t, {1.0, 2.0, 4.0, 8.0});
    const double m = s.op.order_m;
    std::ostringstream csv;
    csv << "delta,t,norm\n";
    for (double delta : or_default(c.scales.deltas, {0.0, 0.5})) {
        const double w0 = std::max(1.0, s.space.diameter() / 4.0);
        const ScaleDefect d = per_scale_defect(
            [&](double t) { return bump_profile(s.space, 0, w0 * std::pow(t, delta / 2)); },
            [](double t, double lam) { return t * lam * t * lam * std::exp(-t * lam); }, s.sd, ts, c.scales.p);
        for (std::size_t i = 0; i < ts.size(); ++i)
            csv << num(delta) << "," << num(ts[i]) << "," << num(d.norms[i]) << "\n";
        char name[64];
        std::snprintf(name, sizeof name, "slope_error[delta=%g]", delta);
        check_le(r, name, std::abs(d.slope - (1 - delta) / m), c.tolerances.slope_tol);
    }
    w.write("defect.csv", [&](std::ostream& os) { os << csv.str(); });
}

void recipe_t1(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    const int M = bmo_order(c, s.space);
    std::vector<CorrelationRecord> recs;
    std::vector<double> a, b;
    for (int i = 0; i < c.scales.count; ++i) {
        const std::uint64_t seed = c.seed + std::uint64_t(i);
        const Symbol sigma = random_s11_symbol(s.space, s.sd, seed);
        const T1Result t1 = t1_test(sigma, s.op, s.sd, s.space, M);
        recs.push_back({sigma.description(), t1.l2_norm, t1.bmo_t1, t1.seminorms.sum()});
        a.push_back(t1.l2_norm);
        b.push_back(t1.seminorms.sum() + t1.bmo_t1);
    }
    w.write("correlation.csv", [&](std::ostream& os) { write_correlation_csv(recs, os); });
    if (recs.size() >= 2)
        info(r, "spearman_opnorm_vs_seminorm_plus_bmo", spearman(a, b));
}

void recipe_paraproduct(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    const int M = bmo_order(c, s.space);
    const ScaleGrid grid = default_paraproduct_grid(s.sd);
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> u(-1, 1);
    std::vector<double> ratios;
    double identity = 0;
    std::ostringstream csv;
    csv << "draw,norm,sup_g,ratio\n";
    for (int i = 0; i < c.scales.count; ++i) {
        Vec g(s.space.size()), f(s.space.size());
        for (auto& v : g)
            v = u(rng);
        for (auto& v : f)
            v = u(rng);
        const Mat P = paraproduct_matrix(s.sd, g, M, grid);
        const double n = operator_norm(P, s.sd.measure, 2, 2).value, sup = g.cwiseAbs().maxCoeff();
        ratios.push_back(n / sup);
        csv << i << "," << num(n) << "," << num(sup) << "," << num(n / sup) << "\n";
        if (i < 3) {
            const CVec a = apply(symbol_of_paraproduct(s.sd, g, M, grid), s.sd, f);
            identity = std::max(identity, (a - paraproduct(s.sd, g, f, M, grid).cast<cdouble>()).norm() / f.norm());
        }
    }
    w.write("paraproduct.csv", [&](std::ostream& os) { os << csv.str(); });
    check_le(r, "norm_over_sup_spread", spread(ratios), c.tolerances.para_spread);
    check_le(r, "symbol_identity_error", identity, 1e-6);
    const double psi1 = psi_semigroup_apply(s.sd, 1.0, M, Vec::Ones(s.space.size())).cwiseAbs().maxCoeff();
    check_le(r, "psi_tL_one", psi1, 1e-12);
}

void recipe_assumptions(const ExperimentConfig& c, const Setup& s, Writer& w, RunResult& r) {
    const DoublingProfile dp = doubling_profile(s.space);
    w.write("doubling.csv", [&](std::ostream& os) {
        os << "A2,n,D,fit_residual\n" << num(dp.A2) << "," << num(dp.n) << "," << num(dp.D) << "," << num(dp.fit_residual) << "\n";
    });
    info(r, "doubling_n", dp.n);
    CheckOptions opt;
    opt.seed = c.seed + 7;
    std::vector<Witness> witnesses;
    std::ostringstream csv;
    csv << "mode,M,kappa,C\n";
    for (CheckMode mode : {CheckMode::sobolev, CheckMode::generalized_poincare, CheckMode::p2_poincare})
        for (const auto& e : embedding_poincare_check(s.sd, s.space, mode, opt)) {
            witnesses.push_back(e.witness);
            csv << to_string(mode) << "," << e.M << "," << num(e.kappa) << "," << num(e.C) << "\n";
            info(r, to_string(mode) + "_C[M=" + std::to_string(e.M) + "]", e.C);
        }
    w.write("constants.csv", [&](std::ostream& os) { os << csv.str(); });
    w.write("witnesses.csv", [&](std::ostream& os) { write_witness_csv(witnesses, os); });
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, fs::path dir) {
    if (dir.empty())
        dir = config.output;
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw ArtifactError("cannot create output directory " + dir.string() + ": " + ec.message());
    RunResult res;
    res.dir = dir;
    Writer w(dir, res);
    w.write("config.json", [&](std::ostream& os) { os << config_to_json(config).dump(2) << "\n"; });

    const bool levels = config.recipe == "thm-s10" || config.recipe == "thm-s1delta";
    if (levels) {
        recipe_levels(config, w, res,
                      config.recipe == "thm-s10" ? SymbolSpec{"s10_test", "", {}}
                                                 : SymbolSpec{"s1delta", "", {0.0, 1.0, 0.5, 2.0}});
    } else {
        const Setup s = make_setup(config.space, config.operator_kind, config.coefficient);
        w.write("space.json", [&](std::ostream& os) { os << space_to_json(s.space).dump() << "\n"; });
        w.write("spectrum.csv", [&](std::ostream& os) {
            os << "k,lambda\n";
            for (PointId k = 0; k < s.sd.size(); ++k)
                os << k << "," << num(s.sd.eigenvalues[k]) << "\n";
        });
        const std::string& rc = config.recipe;
        if (rc == "opnorm")
            recipe_opnorm(config, s, w, res);
        else if (rc == "heat-decay")
            recipe_heat_decay(config, s, w, res);
        else if (rc == "lemma-multiplier")
            recipe_lemma_multiplier(config, s, w, res);
        else if (rc == "decompose-decay")
            recipe_decompose(config, s, w, res);
        else if (rc == "prop-dual-slope")
            recipe_dual_slope(config, s, w, res);
        else if (rc == "t1-correlation")
            recipe_t1(config, s, w, res);
        else if (rc == "paraproduct-bound")
            recipe_paraproduct(config, s, w, res);
        else if (rc == "assumption-checks")
            recipe_assumptions(config, s, w, res);
        else
            throw ConfigError("$.recipe", "unknown recipe '" + rc + "'");
    }

    json manifest;
    manifest["tool"] = "psdocalc";
    manifest["version"] = kVersion;
    manifest["schema_version"] = 1;
    manifest["recipe"] = config.recipe;
    manifest["seed"] = config.seed;
    manifest["config_hash"] = config_hash(config);
    manifest["files"] = res.files;
    manifest["checks"] = json::array();
    for (const auto& ck : res.checks)
        manifest["checks"].push_back(
            {{"name", ck.name}, {"value", ck.value}, {"bound", ck.bound}, {"relation", ck.relation}, {"pass", ck.pass}});
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out)
        throw ArtifactError("cannot write manifest in " + dir.string());
    out << manifest.dump(2) << "\n";
    return res;
}

ReportResult report(const fs::path& dir) {
    const fs::path mf = dir / "manifest.json";
    if (!fs::exists(mf))
        throw ArtifactError("no manifest.json in " + dir.string());
    json m;
    try {
        std::ifstream in(mf);
        m = json::parse(in);
    } catch (const json::exception& e) {
        throw ArtifactError("corrupt manifest " + mf.string() + ": " + e.what());
    }
    ReportResult out;
    std::string recipe, version, hash;
    try {
        recipe = m.at("recipe").get<std::string>();
        version = m.at("version").get<std::string>();
        hash = m.at("config_hash").get<std::string>();
        for (const auto& c : m.at("checks"))
            out.checks.push_back({c.at("name").get<std::string>(), c.at("value").get<double>(),
                                  c.at("bound").get<double>(), c.at("relation").get<std::string>(),
                                  c.at("pass").get<bool>()});
    } catch (const json::exception& e) {
        throw ArtifactError("corrupt manifest " + mf.string() + ": " + e.what());
    }
    for (const auto& c : out.checks)
        out.passed = out.passed && c.pass;
    std::ofstream txt(dir / "summary.txt", std::ios::binary), csv(dir / "summary.csv", std::ios::binary);
    if (!txt || !csv)
        throw ArtifactError("cannot write summary in " + dir.string());
    txt << "recipe " << recipe << " (psdocalc " << version << ", config " << hash << ")\n";
    csv << "check,value,bound,relation,pass\n";
    for (const auto& c : out.checks) {
        char line[256];
        if (c.relation == "info")
            std::snprintf(line, sizeof line, "  %-44s %.6g\n", c.name.c_str(), c.value);
        else
            std::snprintf(line, sizeof line, "  %-44s %.6g %s %.6g  %s\n", c.name.c_str(), c.value,
                          c.relation.c_str(), c.bound, c.pass ? "PASS" : "FAIL");
        txt << line;
        csv << c.name << "," << num(c.value) << "," << num(c.bound) << "," << c.relation << "," << (c.pass ? 1 : 0)
            << "\n";
    }
    txt << (out.passed ? "all checks passed\n" : "some checks FAILED\n");
    return out;
}

}  // namespace psdocalc
