#include "run_config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "kacm/digest.hpp"
#include "kacm/errors.hpp"
#include "source_map.hpp"

namespace kacm::cli {

using nlohmann::json;

const char* operation_name(Operation op) {
    switch (op) {
        case Operation::Moment: return "moment";
        case Operation::McCompare: return "mc-compare";
        case Operation::KernelCheck: return "kernel-check";
        case Operation::Kato: return "kato";
        case Operation::ExpBound: return "exp-bound";
    }
    return "?";
}

TransitionKernel KernelSpec::build() const {
    switch (family) {
        case Family::Brownian: return TransitionKernel::brownian();
        case Family::BrownianDrift: return TransitionKernel::brownian_drift(drift);
        case Family::ReflectedBrownian: return TransitionKernel::reflected_brownian(lower);
        case Family::KilledBrownian: return TransitionKernel::killed_brownian(lower, upper);
    }
    return TransitionKernel::brownian();
}

TerminalFunction TerminalSpec::build() const {
    if (type == "constant") return TerminalFunction::constant(value, cemetery);
    if (type == "indicator") return TerminalFunction::indicator(lower, upper, inside, outside, cemetery);
    return TerminalFunction::one();
}

namespace {

struct Ctx {
    std::string source;
    SourceMap map;

    [[noreturn]] void fail(const std::string& ptr, const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(map.line_of(ptr)) + ": " + msg);
    }
};

std::string in_quotes(const std::string& s) { return "\"" + s + "\""; }

// Field access on one JSON object; remembers which keys were read so
// that leftovers can be reported as unknown.
class Obj {
public:
    Obj(const json& j, std::string ptr, const Ctx& ctx, std::string what)
        : j_(j), ptr_(std::move(ptr)), ctx_(ctx), what_(std::move(what)) {
        if (!j_.is_object()) ctx_.fail(ptr_, what_ + " must be an object");
    }

    const std::string& ptr() const { return ptr_; }
    std::string child(const std::string& key) const { return ptr_ + "/" + pointer_escape(key); }
    bool has(const std::string& key) const { return j_.contains(key); }

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const { ctx_.fail(child(key), msg); }

    const json& raw(const std::string& key) {
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> def = std::nullopt) {
        if (!has(key)) {
            if (def) return *def;
            fail(key, what_ + " is missing required field " + in_quotes(key));
        }
        const json& v = raw(key);
        if (!v.is_number()) fail(key, "field " + in_quotes(key) + " must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(key, "field " + in_quotes(key) + " must be finite");
        return d;
    }

    double positive(const std::string& key, std::optional<double> def = std::nullopt) {
        const double d = number(key, def);
        if (!(d > 0.0)) fail(key, "field " + in_quotes(key) + " must be positive");
        return d;
    }

    std::int64_t integer(const std::string& key, std::int64_t def, std::int64_t lo, std::int64_t hi) {
        if (!has(key)) return def;
        const json& v = raw(key);
        if (!v.is_number_integer()) fail(key, "field " + in_quotes(key) + " must be an integer");
        const auto i = v.get<std::int64_t>();
        if (i < lo || i > hi)
            fail(key, "field " + in_quotes(key) + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return i;
    }

    std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
        if (!has(key)) {
            if (def) return *def;
            fail(key, what_ + " is missing required field " + in_quotes(key));
        }
        const json& v = raw(key);
        if (!v.is_string()) fail(key, "field " + in_quotes(key) + " must be a string");
        return v.get<std::string>();
    }

    bool boolean(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_boolean()) fail(key, "field " + in_quotes(key) + " must be true or false");
        return v.get<bool>();
    }

    const json& array(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_array()) fail(key, "field " + in_quotes(key) + " must be an array");
        return v;
    }

    std::vector<double> numbers(const std::string& key) {
        const json& v = array(key);
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
                ctx_.fail(child(key) + "/" + std::to_string(i), "entries of " + in_quotes(key) + " must be numbers");
            out.push_back(v[i].get<double>());
        }
        return out;
    }

    void finish() const {
        for (const auto& [key, _] : j_.items())
            if (!used_.count(key)) fail(key, "unknown field " + in_quotes(key) + " in " + what_);
    }

private:
    const json& j_;
    std::string ptr_;
    const Ctx& ctx_;
    std::string what_;
    std::set<std::string> used_;
};

KernelSpec parse_kernel(Obj o) {
    KernelSpec k;
    const std::string fam = o.string("family");
    try {
        k.family = parse_family(fam);
    } catch (const ArgumentError&) {
        o.fail("family", "unknown kernel family " + in_quotes(fam));
    }
    switch (k.family) {
        case Family::Brownian: break;
        case Family::BrownianDrift: k.drift = o.number("drift", 0.0); break;
        case Family::ReflectedBrownian: k.lower = o.number("lower", 0.0); break;
        case Family::KilledBrownian:
            k.lower = o.number("lower");
            k.upper = o.number("upper");
            if (!(k.lower < k.upper)) o.fail("upper", "killed-brownian needs lower < upper");
            break;
    }
    o.finish();
    return k;
}

AcDensity parse_density(Obj o) {
    const std::string type = o.string("type");
    AcDensity d;
    if (type == "constant") {
        d = AcDensity::constant(o.number("level", 1.0));
        d.lower = o.number("lower", -INFINITY);
        d.upper = o.number("upper", INFINITY);
    } else if (type == "indicator") {
        const double a = o.number("lower");
        const double b = o.number("upper");
        if (!(a < b)) o.fail("upper", "indicator needs lower < upper");
        d = AcDensity::indicator(a, b, o.number("level", 1.0));
    } else if (type == "gaussian-bump") {
        d = AcDensity::gaussian_bump(o.number("centre"), o.positive("width"), o.number("height", 1.0));
    } else {
        o.fail("type", "unknown density type " + in_quotes(type) + " (constant, indicator, gaussian-bump)");
    }
    if (d.level < 0.0) o.fail(type == "gaussian-bump" ? "height" : "level", "densities must be nonnegative");
    o.finish();
    return d;
}

RevuzMeasure parse_measure(Obj o, const Ctx& ctx) {
    std::vector<AcDensity> dens;
    std::vector<Atom> atoms;
    if (o.has("densities")) {
        const json& a = o.array("densities");
        for (std::size_t i = 0; i < a.size(); ++i)
            dens.push_back(parse_density(Obj(a[i], o.child("densities") + "/" + std::to_string(i), ctx, "density")));
    }
    if (o.has("atoms")) {
        const json& a = o.array("atoms");
        for (std::size_t i = 0; i < a.size(); ++i) {
            Obj at(a[i], o.child("atoms") + "/" + std::to_string(i), ctx, "atom");
            Atom atom{at.number("at"), at.number("weight", 1.0)};
            if (atom.weight < 0.0) at.fail("weight", "atom weights must be nonnegative");
            at.finish();
            atoms.push_back(atom);
        }
    }
    o.finish();
    return {std::move(dens), std::move(atoms)};
}

TerminalSpec parse_terminal(Obj o) {
    TerminalSpec t;
    t.type = o.string("type");
    if (t.type == "one") {
    } else if (t.type == "constant") {
        t.value = o.number("value");
        t.cemetery = o.number("cemetery", t.value);
    } else if (t.type == "indicator") {
        t.lower = o.number("lower");
        t.upper = o.number("upper");
        if (!(t.lower <= t.upper)) o.fail("upper", "indicator needs lower <= upper");
        t.inside = o.number("inside", 1.0);
        t.outside = o.number("outside", 0.0);
        t.cemetery = o.number("cemetery", 0.0);
    } else {
        o.fail("type", "unknown terminal type " + in_quotes(t.type) + " (one, constant, indicator)");
    }
    o.finish();
    return t;
}

McBlock parse_mc(Obj o) {
    McBlock m;
    if (o.has("seed")) {
        const json& v = o.raw("seed");
        if (!v.is_number_unsigned()) o.fail("seed", "field \"seed\" must be a nonnegative integer");
        m.seed = v.get<std::uint64_t>();
    }
    m.n_paths = o.integer("n_paths", m.n_paths, 2, std::int64_t{1} << 40);
    m.dt = o.positive("dt", m.dt);
    m.epsilon = o.positive("epsilon", m.epsilon);
    const std::string lt = o.string("local_time", local_time_method_name(m.local_time));
    try {
        m.local_time = parse_local_time_method(lt);
    } catch (const ArgumentError&) {
        o.fail("local_time", "unknown local-time method " + in_quotes(lt));
    }
    const std::string kd = o.string("killing", kill_detection_name(m.killing));
    try {
        m.killing = parse_kill_detection(kd);
    } catch (const ArgumentError&) {
        o.fail("killing", "unknown killing detection " + in_quotes(kd));
    }
    if (o.has("workers")) m.workers = static_cast<int>(o.integer("workers", 1, 1, 1024));
    o.finish();
    return m;
}

OutputBlock parse_output(Obj o) {
    OutputBlock out;
    out.format = o.string("format", out.format);
    if (out.format != "csv" && out.format != "json") o.fail("format", "output format must be \"csv\" or \"json\"");
    out.path = o.string("path", out.path);
    out.verbosity = static_cast<int>(o.integer("verbosity", out.verbosity, 0, 2));
    o.finish();
    return out;
}

Operation parse_operation(Obj& o) {
    const std::string op = o.string("operation");
    for (Operation c : {Operation::Moment, Operation::McCompare, Operation::KernelCheck, Operation::Kato,
                        Operation::ExpBound})
        if (op == operation_name(c)) return c;
    o.fail("operation", "unknown operation " + in_quotes(op) +
                            " (moment, mc-compare, kernel-check, kato, exp-bound)");
}

void reference_kernel(Obj& o, Task& t, const RunConfig& cfg) {
    t.kernel = o.string("kernel");
    if (!cfg.kernels.count(t.kernel))
        o.fail("kernel", "task '" + t.id + "' references undeclared kernel " + in_quotes(t.kernel));
}

std::string reference_measure(const std::string& ptr, const std::string& name, const Task& t, const RunConfig& cfg,
                              const Ctx& ctx) {
    if (!cfg.measures.count(name))
        ctx.fail(ptr, "task '" + t.id + "' references undeclared measure " + in_quotes(name));
    return name;
}

// "measures": [names] or "measure": name with optional "k".
void parse_measure_list(Obj& o, Task& t, const RunConfig& cfg, const Ctx& ctx, bool single) {
    if (o.has("measures") && !single) {
        if (o.has("measure")) o.fail("measure", "give either \"measure\" or \"measures\", not both");
        const json& a = o.array("measures");
        for (std::size_t i = 0; i < a.size(); ++i) {
            const std::string p = o.child("measures") + "/" + std::to_string(i);
            if (!a[i].is_string()) ctx.fail(p, "measure names must be strings");
            t.measures.push_back(reference_measure(p, a[i].get<std::string>(), t, cfg, ctx));
        }
        return;
    }
    const std::string name = reference_measure(o.child("measure"), o.string("measure"), t, cfg, ctx);
    const int k = single ? 1 : static_cast<int>(o.integer("k", 1, 0, 64));
    t.measures.assign(static_cast<std::size_t>(k), name);
}

Task parse_task(Obj o, std::size_t index, const RunConfig& cfg, const Ctx& ctx, int line) {
    Task t;
    t.id = o.string("id", "task" + std::to_string(index + 1));
    t.line = line;
    t.op = parse_operation(o);
    reference_kernel(o, t, cfg);
    switch (t.op) {
        case Operation::Moment:
        case Operation::McCompare: {
            if (t.op == Operation::McCompare) t.quantity = o.string("quantity", "moment");
            if (t.quantity != "moment" && t.quantity != "potential")
                o.fail("quantity", "quantity must be \"moment\" or \"potential\"");
            const bool potential = t.quantity == "potential";
            parse_measure_list(o, t, cfg, ctx, potential);
            t.x = o.number("x", 0.0);
            if (potential) {
                t.alphas = o.numbers("alphas");
                if (t.alphas.empty()) o.fail("alphas", "potential comparisons need at least one rate");
                for (double a : t.alphas)
                    if (!(a > 0.0)) o.fail("alphas", "rates must be positive");
            } else {
                t.t = o.positive("t", 1.0);
                bool same = true;
                for (const auto& m : t.measures) same = same && m == t.measures.front();
                const std::string mode = o.string("mode", same ? "identical-power" : "permutation-sum");
                try {
                    t.mode = parse_order_mode(mode);
                } catch (const ArgumentError&) {
                    o.fail("mode", "unknown mode " + in_quotes(mode) + " (ordered, permutation-sum, identical-power)");
                }
                if (t.mode == OrderMode::IdenticalPower && !same)
                    o.fail("mode", "identical-power needs every measure to be the same");
                if (o.has("terminal")) t.terminal = parse_terminal(Obj(o.raw("terminal"), o.child("terminal"), ctx, "terminal"));
                if (o.has("killed_domain")) {
                    const auto d = o.numbers("killed_domain");
                    if (d.size() != 2 || !(d[0] < d[1])) o.fail("killed_domain", "killed_domain must be [a, b] with a < b");
                    t.killed_domain = std::pair{d[0], d[1]};
                }
            }
            if (t.op == Operation::McCompare) {
                if (!cfg.mc) ctx.fail(o.ptr(), "mc-compare task '" + t.id + "' needs an \"mc\" block");
                if (t.mode == OrderMode::Ordered)
                    o.fail("mode", "mc-compare supports identical-power and permutation-sum moments");
                if (o.has("local_time")) {
                    const std::string lt = o.string("local_time");
                    try {
                        t.local_time = parse_local_time_method(lt);
                    } catch (const ArgumentError&) {
                        o.fail("local_time", "unknown local-time method " + in_quotes(lt));
                    }
                }
                if (o.has("epsilon")) t.epsilon = o.positive("epsilon");
                if (o.has("dt")) t.dt = o.positive("dt");
            }
            break;
        }
        case Operation::KernelCheck:
            t.t = o.positive("t", 0.5);
            t.s = o.positive("s", 0.5);
            if (o.has("resolvent")) {
                const json& a = o.array("resolvent");
                for (std::size_t i = 0; i < a.size(); ++i) {
                    const std::string p = o.child("resolvent") + "/" + std::to_string(i);
                    if (!a[i].is_array() || a[i].size() != 2 || !a[i][0].is_number() || !a[i][1].is_number())
                        ctx.fail(p, "resolvent entries must be [alpha, beta] pairs");
                    const double al = a[i][0].get<double>(), be = a[i][1].get<double>();
                    if (!(al > 0.0 && be > 0.0 && al != be)) ctx.fail(p, "resolvent rates must be positive and distinct");
                    t.resolvent_pairs.emplace_back(al, be);
                }
            }
            t.tolerance = o.positive("tolerance", t.tolerance);
            t.duality_tolerance = o.positive("duality_tolerance", t.duality_tolerance);
            break;
        case Operation::Kato:
            parse_measure_list(o, t, cfg, ctx, true);
            if (o.has("alphas")) {
                t.alphas = o.numbers("alphas");
                for (double a : t.alphas)
                    if (!(a > 0.0)) o.fail("alphas", "rates must be positive");
            }
            t.grid_points = static_cast<int>(o.integer("grid_points", t.grid_points, 3, 100001));
            if (o.has("expect_in_kato")) t.expect_kato = o.boolean("expect_in_kato");
            break;
        case Operation::ExpBound:
            parse_measure_list(o, t, cfg, ctx, true);
            t.x = o.number("x", 0.0);
            t.t = o.positive("t", 1.0);
            t.series_cap = static_cast<int>(o.integer("series_cap", t.series_cap, 1, 64));
            break;
    }
    o.finish();
    return t;
}

json density_json(const AcDensity& d) {
    json j;
    if (d.kind == AcDensity::Kind::GaussianBump) {
        j = {{"type", "gaussian-bump"}, {"centre", d.centre}, {"width", d.width}, {"height", d.level}};
    } else if (std::isfinite(d.lower) && std::isfinite(d.upper)) {
        j = {{"type", "indicator"}, {"lower", d.lower}, {"upper", d.upper}, {"level", d.level}};
    } else {
        j = {{"type", "constant"}, {"level", d.level}};
        if (std::isfinite(d.lower)) j["lower"] = d.lower;
        if (std::isfinite(d.upper)) j["upper"] = d.upper;
    }
    return j;
}

json kernel_json(const KernelSpec& k) {
    json j = {{"family", family_name(k.family)}};
    if (k.family == Family::BrownianDrift) j["drift"] = k.drift;
    if (k.family == Family::ReflectedBrownian) j["lower"] = k.lower;
    if (k.family == Family::KilledBrownian) {
        j["lower"] = k.lower;
        j["upper"] = k.upper;
    }
    return j;
}

json terminal_json(const TerminalSpec& t) {
    json j = {{"type", t.type}};
    if (t.type == "constant") {
        j["value"] = t.value;
        j["cemetery"] = t.cemetery;
    } else if (t.type == "indicator") {
        j["lower"] = t.lower;
        j["upper"] = t.upper;
        j["inside"] = t.inside;
        j["outside"] = t.outside;
        j["cemetery"] = t.cemetery;
    }
    return j;
}

json task_json(const Task& t) {
    json j = {{"id", t.id}, {"operation", operation_name(t.op)}, {"kernel", t.kernel}};
    switch (t.op) {
        case Operation::Moment:
        case Operation::McCompare:
            j["measures"] = t.measures;
            j["x"] = t.x;
            if (t.op == Operation::McCompare) j["quantity"] = t.quantity;
            if (t.quantity == "potential") {
                j["alphas"] = t.alphas;
            } else {
                j["t"] = t.t;
                j["mode"] = order_mode_name(t.mode);
                if (t.terminal) j["terminal"] = terminal_json(*t.terminal);
                if (t.killed_domain) j["killed_domain"] = {t.killed_domain->first, t.killed_domain->second};
            }
            if (t.local_time) j["local_time"] = local_time_method_name(*t.local_time);
            if (t.epsilon) j["epsilon"] = *t.epsilon;
            if (t.dt) j["dt"] = *t.dt;
            break;
        case Operation::KernelCheck: {
            j["t"] = t.t;
            j["s"] = t.s;
            json pairs = json::array();
            for (const auto& [a, b] : t.resolvent_pairs) pairs.push_back({a, b});
            j["resolvent"] = pairs;
            j["tolerance"] = t.tolerance;
            j["duality_tolerance"] = t.duality_tolerance;
            break;
        }
        case Operation::Kato:
            j["measure"] = t.measures.front();
            if (!t.alphas.empty()) j["alphas"] = t.alphas;
            j["grid_points"] = t.grid_points;
            if (t.expect_kato) j["expect_in_kato"] = *t.expect_kato;
            break;
        case Operation::ExpBound:
            j["measure"] = t.measures.front();
            j["x"] = t.x;
            j["t"] = t.t;
            j["series_cap"] = t.series_cap;
            break;
    }
    return j;
}

}  // namespace

json RunConfig::to_json() const {
    json j;
    j["schema"] = kRunSchema;
    j["kernels"] = json::object();
    for (const auto& [name, k] : kernels) j["kernels"][name] = kernel_json(k);
    j["measures"] = json::object();
    for (const auto& [name, m] : measures) {
        json mj = {{"densities", json::array()}, {"atoms", json::array()}};
        for (const auto& d : m.densities()) mj["densities"].push_back(density_json(d));
        for (const auto& a : m.atoms()) mj["atoms"].push_back({{"at", a.location}, {"weight", a.weight}});
        j["measures"][name] = mj;
    }
    j["tasks"] = json::array();
    for (const auto& t : tasks) j["tasks"].push_back(task_json(t));
    if (mc) {
        j["mc"] = {{"seed", mc->seed},
                   {"n_paths", mc->n_paths},
                   {"dt", mc->dt},
                   {"epsilon", mc->epsilon},
                   {"local_time", local_time_method_name(mc->local_time)},
                   {"killing", kill_detection_name(mc->killing)}};
        if (mc->workers) j["mc"]["workers"] = *mc->workers;
    }
    j["output"] = {{"format", output.format}, {"path", output.path}, {"verbosity", output.verbosity}};
    return j;
}

std::uint64_t RunConfig::digest() const {
    // where the report goes does not change what is computed
    json j = to_json();
    j.erase("output");
    return fnv1a64(j.dump());
}

RunConfig parse_run_config(std::string_view text, const std::string& source) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const int line = SourceMap::line_at(text, e.byte > 0 ? e.byte - 1 : 0);
        std::string what = e.what();
        if (auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
        throw ConfigError(source + ":" + std::to_string(line) + ": invalid JSON: " + what);
    }
    Ctx ctx{source, SourceMap(text)};
    RunConfig cfg;
    cfg.source = source;
    Obj root(doc, "", ctx, "configuration");
    const std::string schema = root.string("schema");
    if (schema != kRunSchema) root.fail("schema", "unsupported schema " + in_quotes(schema) + ", expected " + in_quotes(kRunSchema));

    if (root.has("kernels")) {
        Obj ks(root.raw("kernels"), "/kernels", ctx, "kernels block");
        for (const auto& [name, v] : root.raw("kernels").items()) {
            const std::string p = "/kernels/" + pointer_escape(name);
            KernelSpec k = parse_kernel(Obj(v, p, ctx, "kernel " + in_quotes(name)));
            try {
                (void)k.build();
            } catch (const std::exception& e) {
                ctx.fail(p, "kernel " + in_quotes(name) + ": " + e.what());
            }
            cfg.kernels.emplace(name, k);
        }
    }
    if (root.has("measures")) {
        Obj ms(root.raw("measures"), "/measures", ctx, "measures block");
        for (const auto& [name, v] : root.raw("measures").items())
            cfg.measures.emplace(name, parse_measure(Obj(v, "/measures/" + pointer_escape(name), ctx, "measure " + in_quotes(name)), ctx));
    }
    if (root.has("mc")) cfg.mc = parse_mc(Obj(root.raw("mc"), "/mc", ctx, "mc block"));
    if (root.has("output")) cfg.output = parse_output(Obj(root.raw("output"), "/output", ctx, "output block"));

    const json& tasks = root.array("tasks");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const std::string p = "/tasks/" + std::to_string(i);
        Task t = parse_task(Obj(tasks[i], p, ctx, "task"), i, cfg, ctx, ctx.map.line_of(p));
        if (!ids.insert(t.id).second) ctx.fail(p + "/id", "duplicate task id " + in_quotes(t.id));
        cfg.tasks.push_back(std::move(t));
    }
    root.finish();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read configuration file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error reading configuration file '" + path + "'");
    return parse_run_config(buf.str(), path);
}

RunConfig builtin_kernel_check_config() {
    json j;
    j["schema"] = kRunSchema;
    j["kernels"] = {{"brownian", {{"family", "brownian"}}},
                    {"brownian-drift", {{"family", "brownian-drift"}, {"drift", 0.5}}},
                    {"reflected-brownian", {{"family", "reflected-brownian"}, {"lower", 0.0}}},
                    {"killed-brownian", {{"family", "killed-brownian"}, {"lower", -1.0}, {"upper", 1.0}}}};
    j["tasks"] = json::array();
    for (const auto& [name, _] : j["kernels"].items()) {
        for (auto [t, s] : {std::pair{0.5, 0.5}, std::pair{0.2, 1.0}}) {
            json task = {{"id", name + "@" + (t == 0.5 ? std::string("0.5+0.5") : std::string("0.2+1.0"))},
                         {"operation", "kernel-check"},
                         {"kernel", name},
                         {"t", t},
                         {"s", s}};
            if (name == "brownian" || name == "reflected-brownian")
                task["resolvent"] = json::array({json::array({1.0, 2.0}), json::array({1.0, 3.0})});
            j["tasks"].push_back(task);
        }
    }
    return parse_run_config(j.dump(2), "<built-in kernel-check>");
}

}  // namespace kacm::cli
