#include "multicav/job.hpp"

#include "multicav/closed_form.hpp"
#include "multicav/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <set>
#include <sstream>

#ifndef MULTICAV_VERSION
#define MULTICAV_VERSION "0.0.0"
#endif

namespace multicav::job {

namespace {

constexpr double pi = std::numbers::pi;

// Best-effort line attribution: first occurrence of "key" in the source text.
int line_of(const std::string* text, const std::string& key)
{
    if (text == nullptr || key.empty()) {
        return 0;
    }
    const auto pos = text->find('"' + key + '"');
    if (pos == std::string::npos) {
        return 0;
    }
    return 1 + static_cast<int>(std::count(text->begin(), text->begin() + static_cast<long>(pos), '\n'));
}

class Parser
{
public:
    explicit Parser(const std::string* text) : text_(text) {}

    [[noreturn]] void fail(const std::string& key, const std::string& message) const
    {
        throw ConfigError(message, line_of(text_, key));
    }

    void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) const
    {
        if (!obj.is_object()) {
            fail(where, "'" + where + "' must be an object");
        }
        for (const auto& [key, _] : obj.items()) {
            if (std::none_of(allowed.begin(), allowed.end(),
                             [&](const char* a) { return key == a; })) {
                fail(key, "unknown key '" + key + "' in " + where);
            }
        }
    }

    double number(const json& obj, const std::string& key) const
    {
        if (!obj.contains(key)) {
            fail(key, "missing required key '" + key + "'");
        }
        try {
            return parse_length(obj.at(key));
        } catch (const ConfigError& e) {
            fail(key, "'" + key + "': " + e.what());
        }
    }

    std::optional<double> maybe_number(const json& obj, const std::string& key) const
    {
        if (!obj.contains(key)) {
            return std::nullopt;
        }
        return number(obj, key);
    }

    long long integer(const json& v, const std::string& key) const
    {
        if (!v.is_number_integer()) {
            fail(key, "'" + key + "' must be an integer");
        }
        return v.get<long long>();
    }

    Incidence incidence(const json& obj) const
    {
        if (!obj.contains("incidence")) {
            return Incidence::FromLeft;
        }
        const auto& v = obj.at("incidence");
        if (v == "left") {
            return Incidence::FromLeft;
        }
        if (v == "right") {
            return Incidence::FromRight;
        }
        fail("incidence", "'incidence' must be \"left\" or \"right\"");
    }

    StackSpec stack(const json& obj, const std::string& where) const
    {
        StackSpec spec;
        if (!obj.is_object()) {
            fail(where, "'" + where + "' must be an object");
        }
        if (obj.contains("elements")) {
            only_keys(obj, where, {"elements", "incidence"});
            const auto& elems = obj.at("elements");
            if (!elems.is_array() || elems.empty()) {
                fail("elements", "'elements' must be a non-empty array");
            }
            for (const auto& e : elems) {
                only_keys(e, "elements", {"zeta", "position"});
                spec.elements.push_back({number(e, "zeta"), number(e, "position")});
            }
        } else if (obj.contains("family")) {
            only_keys(obj, where, {"family", "zeta", "zeta_prime", "L", "l", "l1", "l2", "incidence"});
            const auto family = obj.at("family");
            const double z = number(obj, "zeta");
            const double zp = number(obj, "zeta_prime");
            const double L = number(obj, "L");
            std::vector<double> zetas;
            std::vector<double> gaps;
            if (family == "two") {
                zetas = {z, zp};
                gaps = {L};
            } else if (family == "three") {
                zetas = {z, zp, z};
                gaps = {L, number(obj, "l")};
            } else if (family == "four") {
                const auto l = maybe_number(obj, "l");
                const double l1 = l ? *l : number(obj, "l1");
                const double l2 = l ? *l : number(obj, "l2");
                zetas = {z, zp, zp, z};
                gaps = {l1, L, l2};
            } else {
                fail("family", "'family' must be one of \"two\", \"three\", \"four\"");
            }
            double x = 0.0;
            for (std::size_t i = 0; i < zetas.size(); ++i) {
                if (i > 0) {
                    x += gaps[i - 1];
                }
                spec.elements.push_back({zetas[i], x});
            }
        } else {
            fail(where, "'" + where + "' needs either 'elements' or 'family'");
        }
        spec.incidence = incidence(obj);
        try {
            (void)spec.build();
        } catch (const Error& e) {
            fail(where, std::string("invalid stack: ") + e.what());
        }
        return spec;
    }

    std::size_t element_index(const json& obj, const StackSpec& stack) const
    {
        const long long idx = integer(obj.at("movable_element"), "movable_element");
        if (idx < 0 || static_cast<std::size_t>(idx) >= stack.elements.size()) {
            fail("movable_element", "'movable_element' out of range");
        }
        return static_cast<std::size_t>(idx);
    }

private:
    const std::string* text_;
};

json stack_to_json(const StackSpec& s)
{
    json elems = json::array();
    for (const auto& e : s.elements) {
        elems.push_back({{"zeta", e.zeta}, {"position", e.position}});
    }
    return {{"elements", elems},
            {"incidence", s.incidence == Incidence::FromLeft ? "left" : "right"}};
}

OutputKind output_kind(const std::string& name, const Parser& p)
{
    static const std::map<std::string, OutputKind> kinds = {
        {"spectrum", OutputKind::Spectrum},   {"resonances", OutputKind::Resonances},
        {"fields", OutputKind::Fields},       {"couplings", OutputKind::Couplings},
        {"sweep", OutputKind::Sweep}};
    const auto it = kinds.find(name);
    if (it == kinds.end()) {
        p.fail("outputs", "unknown output '" + name + "'");
    }
    return it->second;
}

JobConfig parse_impl(const json& doc, const std::string* text)
{
    const Parser p(text);
    p.only_keys(doc, "config",
                {"stack", "k_range", "samples_per_fsr", "speed_of_light", "outputs", "emitter",
                 "movable_element", "references", "sweep", "format", "output"});
    JobConfig cfg;

    if (doc.contains("stack")) {
        cfg.stack = p.stack(doc.at("stack"), "stack");
    }
    if (doc.contains("k_range")) {
        const auto& kr = doc.at("k_range");
        p.only_keys(kr, "k_range", {"min", "max"});
        cfg.k_min = p.number(kr, "min");
        cfg.k_max = p.number(kr, "max");
        if (!(cfg.k_min > 0.0) || !(cfg.k_max > cfg.k_min)) {
            p.fail("k_range", "'k_range' must satisfy 0 < min < max");
        }
    }
    if (doc.contains("samples_per_fsr")) {
        cfg.samples_per_fsr = static_cast<int>(p.integer(doc.at("samples_per_fsr"), "samples_per_fsr"));
        if (cfg.samples_per_fsr < 16) {
            p.fail("samples_per_fsr", "'samples_per_fsr' must be at least 16");
        }
    }
    if (doc.contains("speed_of_light")) {
        cfg.speed_of_light = p.number(doc, "speed_of_light");
        if (!(cfg.speed_of_light > 0.0)) {
            p.fail("speed_of_light", "'speed_of_light' must be positive");
        }
    }
    if (doc.contains("outputs")) {
        const auto& outs = doc.at("outputs");
        if (!outs.is_array() || outs.empty()) {
            p.fail("outputs", "'outputs' must be a non-empty array");
        }
        for (const auto& o : outs) {
            if (!o.is_string()) {
                p.fail("outputs", "'outputs' entries must be strings");
            }
            const auto kind = output_kind(o.get<std::string>(), p);
            if (std::find(cfg.outputs.begin(), cfg.outputs.end(), kind) == cfg.outputs.end()) {
                cfg.outputs.push_back(kind);
            }
        }
    }
    if (doc.contains("emitter")) {
        const auto& em = doc.at("emitter");
        p.only_keys(em, "emitter", {"beta", "gamma"});
        EmitterParams e{p.number(em, "beta"), p.number(em, "gamma")};
        if (!(e.beta > 0.0) || !(e.gamma > 0.0)) {
            p.fail("emitter", "emitter 'beta' and 'gamma' must be positive");
        }
        cfg.emitter = e;
    }
    if (doc.contains("movable_element")) {
        if (!cfg.stack) {
            p.fail("movable_element", "'movable_element' needs a 'stack'");
        }
        cfg.movable_element = p.element_index(doc, *cfg.stack);
    }
    if (doc.contains("references")) {
        const auto& refs = doc.at("references");
        if (!refs.is_array()) {
            p.fail("references", "'references' must be an array");
        }
        for (const auto& r : refs) {
            p.only_keys(r, "references", {"name", "stack", "movable_element"});
            if (!r.contains("name") || !r.at("name").is_string()) {
                p.fail("references", "every reference needs a string 'name'");
            }
            if (!r.contains("stack")) {
                p.fail("references", "every reference needs a 'stack'");
            }
            ReferenceSpec ref;
            ref.name = r.at("name").get<std::string>();
            ref.stack = p.stack(r.at("stack"), "stack");
            if (r.contains("movable_element")) {
                ref.movable_element = p.element_index(r, ref.stack);
            }
            cfg.references.push_back(std::move(ref));
        }
    }
    if (doc.contains("sweep")) {
        const auto& sw = doc.at("sweep");
        p.only_keys(sw, "sweep", {"zeta", "zeta_primes", "total_length", "target_k", "orders"});
        SweepSpec s;
        s.zeta = p.number(sw, "zeta");
        s.total_length = p.number(sw, "total_length");
        s.target_k = p.number(sw, "target_k");
        if (!sw.contains("zeta_primes") || !sw.at("zeta_primes").is_array()) {
            p.fail("zeta_primes", "'zeta_primes' must be an array");
        }
        for (const auto& v : sw.at("zeta_primes")) {
            s.zeta_primes.push_back(parse_length(v));
        }
        if (!sw.contains("orders") || !sw.at("orders").is_array()) {
            p.fail("orders", "'orders' must be an array of integers");
        }
        for (const auto& v : sw.at("orders")) {
            s.orders.push_back(p.integer(v, "orders"));
        }
        if (!(s.total_length > 0.0) || !(s.target_k > 0.0)) {
            p.fail("sweep", "'total_length' and 'target_k' must be positive");
        }
        cfg.sweep = std::move(s);
    }
    if (doc.contains("format")) {
        const auto& f = doc.at("format");
        if (f == "csv") {
            cfg.format = OutputFormat::Csv;
        } else if (f == "json") {
            cfg.format = OutputFormat::Json;
        } else {
            p.fail("format", "'format' must be \"csv\" or \"json\"");
        }
    }
    if (doc.contains("output")) {
        if (!doc.at("output").is_string()) {
            p.fail("output", "'output' must be a string path");
        }
        cfg.output_path = doc.at("output").get<std::string>();
    }

    for (const auto kind : cfg.outputs) {
        if (kind == OutputKind::Sweep) {
            if (!cfg.sweep) {
                p.fail("outputs", "output 'sweep' needs a 'sweep' section");
            }
            continue;
        }
        if (!cfg.stack) {
            p.fail("outputs", std::string("output '") + to_string(kind) + "' needs a 'stack'");
        }
        if (!(cfg.k_max > 0.0)) {
            p.fail("outputs", std::string("output '") + to_string(kind) + "' needs a 'k_range'");
        }
        if (kind == OutputKind::Couplings && !cfg.movable_element) {
            p.fail("outputs", "output 'couplings' needs 'movable_element'");
        }
    }

    // Resolved echo of the configuration with every default filled in.
    json r;
    if (cfg.stack) {
        r["stack"] = stack_to_json(*cfg.stack);
    }
    if (cfg.k_max > 0.0) {
        r["k_range"] = {{"min", cfg.k_min}, {"max", cfg.k_max}};
    }
    r["samples_per_fsr"] = cfg.samples_per_fsr;
    r["speed_of_light"] = cfg.speed_of_light;
    r["outputs"] = json::array();
    for (const auto kind : cfg.outputs) {
        r["outputs"].push_back(to_string(kind));
    }
    const EmitterParams em = cfg.emitter.value_or(EmitterParams{});
    r["emitter"] = {{"beta", em.beta}, {"gamma", em.gamma}};
    if (cfg.movable_element) {
        r["movable_element"] = *cfg.movable_element;
    }
    if (!cfg.references.empty()) {
        r["references"] = json::array();
        for (const auto& ref : cfg.references) {
            json j = {{"name", ref.name}, {"stack", stack_to_json(ref.stack)}};
            if (ref.movable_element) {
                j["movable_element"] = *ref.movable_element;
            }
            r["references"].push_back(j);
        }
    }
    if (cfg.sweep) {
        r["sweep"] = {{"zeta", cfg.sweep->zeta},
                      {"zeta_primes", cfg.sweep->zeta_primes},
                      {"total_length", cfg.sweep->total_length},
                      {"target_k", cfg.sweep->target_k},
                      {"orders", cfg.sweep->orders}};
    }
    r["format"] = cfg.format == OutputFormat::Csv ? "csv" : "json";
    r["output"] = cfg.output_path;
    cfg.resolved = std::move(r);
    return cfg;
}

std::string fmt17(double v)
{
    if (std::isnan(v)) {
        return "";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number_or_null(const std::optional<double>& v)
{
    return v ? json(*v) : json(nullptr);
}

ReferenceResult evaluate_reference(const ReferenceSpec& ref, double k_center, const EmitterParams& emitter,
                                   const EngineOptions& opts)
{
    const auto stack = ref.stack.build();
    const double len = stack.total_length();
    if (!(len > 0.0)) {
        throw InvalidInput("reference '" + ref.name + "' needs at least two elements");
    }
    const double fsr = pi / len;
    const auto found = find_resonances(stack, std::max(k_center - fsr, 0.5 * k_center), k_center + fsr, opts);
    ReferenceResult out;
    out.name = ref.name;
    out.resonance = nearest_resonance(found, k_center);
    if (ref.movable_element) {
        const auto report = evaluate_couplings(stack, out.resonance, *ref.movable_element, emitter, opts);
        out.G = report.G;
        out.C_om = report.C_om;
        out.g_max = *std::max_element(report.g_per_gap.begin(), report.g_per_gap.end());
    } else {
        const auto jc = jc_coupling(stack, out.resonance, emitter);
        out.g_max = *std::max_element(jc.g_per_gap.begin(), jc.g_per_gap.end());
    }
    return out;
}

std::vector<SweepRow> run_sweep(const SweepSpec& sweep, const EngineOptions& opts)
{
    std::vector<SweepRow> rows;
    const double total = sweep.total_length;
    for (const double zp : sweep.zeta_primes) {
        const auto ph = common_resonance_phases(CommonFamily::ThreeMirror, sweep.zeta, zp);
        const double base = ph.theta0 + ph.phi0;
        const double n_total = std::round((sweep.target_k * total - base) / pi);
        const double k = (base + n_total * pi) / total;
        for (const long long m : sweep.orders) {
            const double l = (ph.phi0 + static_cast<double>(m) * pi) / k;
            const double L = total - l;
            if (!(l > 0.0) || !(L > 0.0)) {
                continue;
            }
            const double z[] = {sweep.zeta, zp, sweep.zeta};
            const double g[] = {L, l};
            const auto stack = CavityStack::from_gaps(z, g);
            const double fsr = pi / total;
            const auto found = find_resonances(stack, k - 0.5 * fsr, k + 0.5 * fsr, opts);
            const auto& res = nearest_resonance(found, k);

            SweepRow row;
            row.zeta_prime = zp;
            row.order = m;
            row.L = L;
            row.l = l;
            row.k0 = res.k0;
            row.kappa = res.kappa_curvature;
            row.G = om_coupling(stack, res, 1, 0.0, opts).G;
            const auto cf = closed_form::three_mirror_common(sweep.zeta, zp, L, l, res.k0,
                                                             opts.speed_of_light);
            row.G_m = cf.G_m;
            row.kappa_m = opts.speed_of_light / (2.0 * sweep.zeta * sweep.zeta * total);
            row.prediction = closed_form::membrane_at_end_enhancement(zp, L, l);
            rows.push_back(row);
        }
    }
    return rows;
}

bool wants(const std::vector<OutputKind>& kinds, OutputKind k)
{
    return std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

const char* region_name(Region r)
{
    switch (r) {
    case Region::LeftOuter:
        return "left_outer";
    case Region::Gap:
        return "gap";
    case Region::RightOuter:
        return "right_outer";
    }
    return "gap";
}

} // namespace

double parse_length(const json& value)
{
    if (value.is_number()) {
        return value.get<double>();
    }
    if (!value.is_string()) {
        throw ConfigError("expected a number or a multiple of pi such as \"100pi\"");
    }
    const auto s = value.get<std::string>();
    static const std::regex pattern(R"(^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi\s*$)");
    std::smatch m;
    if (!std::regex_match(s, m, pattern)) {
        throw ConfigError("cannot read '" + s + "' as a number or multiple of pi");
    }
    const double factor = m[1].matched ? std::stod(m[1].str()) : 1.0;
    return factor * pi;
}

JobConfig parse_config(const std::string& text)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
        throw ConfigError(std::string("malformed JSON: ") + e.what(), line);
    }
    return parse_impl(doc, &text);
}

JobConfig parse_config(const json& doc)
{
    return parse_impl(doc, nullptr);
}

std::vector<std::string> preset_names()
{
    return {"fig3", "fig_tunnel", "fig4", "fig6", "fig7"};
}

json preset_document(const std::string& name)
{
    const json emitter = {{"beta", 1.0}, {"gamma", 1.0}};
    const json all = {"spectrum", "resonances", "fields", "couplings"};
    if (name == "fig3") {
        return {{"stack", {{"family", "three"}, {"zeta", 20}, {"zeta_prime", 5}, {"L", "100pi"}, {"l", "pi"}}},
                {"k_range", {{"min", 589.9}, {"max", 590.2}}},
                {"outputs", all},
                {"movable_element", 1},
                {"emitter", emitter},
                {"references",
                 {{{"name", "no_middle_mirror"},
                   {"stack", {{"family", "two"}, {"zeta", 20}, {"zeta_prime", 20}, {"L", "101pi"}}},
                   {"movable_element", 1}},
                  {{"name", "right_subcavity"},
                   {"stack", {{"family", "two"}, {"zeta", 5}, {"zeta_prime", 20}, {"L", "pi"}}},
                   {"movable_element", 0}}}}};
    }
    if (name == "fig_tunnel") {
        return {{"stack", {{"family", "three"}, {"zeta", 10}, {"zeta_prime", 10}, {"L", "1000pi"}, {"l", "pi"}}},
                {"k_range", {{"min", 589.99}, {"max", 590.07}}},
                {"outputs", {"spectrum", "resonances"}},
                {"references",
                 {{{"name", "no_middle_mirror"},
                   {"stack", {{"family", "two"}, {"zeta", 10}, {"zeta_prime", 10}, {"L", "1001pi"}}}},
                  {{"name", "right_subcavity"},
                   {"stack", {{"family", "two"}, {"zeta", 10}, {"zeta_prime", 10}, {"L", "pi"}}}}}}};
    }
    if (name == "fig4") {
        json orders = json::array();
        for (const int m : {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128, 192, 256, 384, 512, 768, 1000}) {
            orders.push_back(m);
        }
        return {{"sweep",
                 {{"zeta", 20},
                  {"zeta_primes", {0.5, 2, 10}},
                  {"total_length", "101pi"},
                  {"target_k", 20},
                  {"orders", orders}}},
                {"outputs", {"sweep"}}};
    }
    if (name == "fig6" || name == "fig7") {
        const bool hybrid = name == "fig7";
        json stack = {{"family", "four"}, {"zeta", 20}, {"zeta_prime", 5}, {"L", "100pi"}};
        if (hybrid) {
            stack["l1"] = "9.91pi";
            stack["l2"] = "pi";
        } else {
            stack["l"] = "pi";
        }
        const double lo = hybrid ? 592.98 : 589.9;
        const double hi = hybrid ? 593.1 : 590.2;
        return {{"stack", stack},
                {"k_range", {{"min", lo}, {"max", hi}}},
                {"outputs", all},
                {"movable_element", 3},
                {"emitter", emitter},
                {"references",
                 {{{"name", "no_middle_mirrors"},
                   {"stack", {{"family", "two"}, {"zeta", 20}, {"zeta_prime", 20}, {"L", hybrid ? "110.91pi" : "102pi"}}},
                   {"movable_element", 1}},
                  {{"name", "right_subcavity"},
                   {"stack", {{"family", "two"}, {"zeta", 5}, {"zeta_prime", 20}, {"L", "pi"}}},
                   {"movable_element", 1}},
                  {{"name", "short_symmetric"},
                   {"stack", {{"family", "two"}, {"zeta", 20}, {"zeta_prime", 20}, {"L", "pi"}}},
                   {"movable_element", 1}}}}};
    }
    std::string names;
    for (const auto& n : preset_names()) {
        names += (names.empty() ? "" : ", ") + n;
    }
    throw ConfigError("unknown preset '" + name + "'; available presets: " + names);
}

JobConfig preset(const std::string& name)
{
    return parse_config(preset_document(name));
}

JobResult run(const JobConfig& config)
{
    const auto opts = config.engine();
    const auto& kinds = config.outputs;
    const EmitterParams emitter = config.emitter.value_or(EmitterParams{});
    JobResult result;

    if (wants(kinds, OutputKind::Sweep)) {
        result.sweep = run_sweep(*config.sweep, opts);
    }
    const bool needs_stack = wants(kinds, OutputKind::Spectrum) || wants(kinds, OutputKind::Resonances) ||
                             wants(kinds, OutputKind::Fields) || wants(kinds, OutputKind::Couplings);
    if (!needs_stack) {
        return result;
    }
    const auto stack = config.stack->build();
    if (wants(kinds, OutputKind::Spectrum)) {
        result.spectrum = scan_spectrum(stack, config.k_min, config.k_max, opts.samples_per_fsr);
    }
    if (wants(kinds, OutputKind::Resonances) || wants(kinds, OutputKind::Fields) ||
        wants(kinds, OutputKind::Couplings)) {
        auto report = classify_overlap(stack, find_resonances(stack, config.k_min, config.k_max, opts), opts);
        result.resonances = std::move(report.resonances);
        result.overlap_criterion = report.analytic;
    }
    if (wants(kinds, OutputKind::Fields)) {
        for (const auto& r : result.resonances) {
            result.fields.push_back({r.k0, field_segments(stack, r.k0)});
        }
    }
    if (wants(kinds, OutputKind::Couplings)) {
        for (const auto& r : result.resonances) {
            CouplingRow row;
            row.resonance = r;
            if (r.overlap_flag != OverlapFlag::WellResolved) {
                row.status = "overlapping-resonance";
            } else {
                try {
                    row.report = evaluate_couplings(stack, r, *config.movable_element, emitter, opts);
                } catch (const Error& e) {
                    row.status = e.name();
                }
            }
            result.couplings.push_back(std::move(row));
        }
    }
    if (!config.references.empty()) {
        const double center = 0.5 * (config.k_min + config.k_max);
        for (const auto& ref : config.references) {
            result.references.push_back(evaluate_reference(ref, center, emitter, opts));
        }
    }
    return result;
}

json to_json(const JobResult& result, const std::vector<OutputKind>& kinds)
{
    json out = json::object();
    auto resonance_json = [](const Resonance& r) {
        return json{{"k0", r.k0},
                    {"transmission_peak", r.transmission_peak},
                    {"kappa_curvature", r.kappa_curvature},
                    {"kappa_halfmax", number_or_null(r.kappa_halfmax)},
                    {"overlap_flag", to_string(r.overlap_flag)},
                    {"neighbor_spacing", r.neighbor_spacing}};
    };
    if (wants(kinds, OutputKind::Spectrum)) {
        json k = json::array(), t = json::array(), d = json::array();
        for (const auto& s : result.spectrum) {
            k.push_back(s.k);
            t.push_back(s.transmission);
            d.push_back(s.denominator);
        }
        out["spectrum"] = {{"k", k}, {"T", t}, {"D", d}};
    }
    if (wants(kinds, OutputKind::Resonances)) {
        json arr = json::array();
        for (const auto& r : result.resonances) {
            arr.push_back(resonance_json(r));
        }
        out["resonances"] = arr;
        if (result.overlap_criterion) {
            const auto& c = *result.overlap_criterion;
            out["overlap_criterion"] = {{"family", to_string(c.family)},
                                        {"expression", c.expression},
                                        {"lhs", c.lhs},
                                        {"rhs", c.rhs},
                                        {"satisfied", c.satisfied}};
        }
    }
    if (wants(kinds, OutputKind::Fields)) {
        json arr = json::array();
        for (const auto& f : result.fields) {
            json segs = json::array();
            for (const auto& s : f.segments) {
                segs.push_back({{"region", region_name(s.region)},
                                {"gap_index", s.gap_index},
                                {"c_plus", {s.c_plus.real(), s.c_plus.imag()}},
                                {"c_minus", {s.c_minus.real(), s.c_minus.imag()}},
                                {"mean_intensity", s.mean_intensity}});
            }
            arr.push_back({{"k0", f.k0}, {"segments", segs}});
        }
        out["fields"] = arr;
    }
    if (wants(kinds, OutputKind::Couplings)) {
        json arr = json::array();
        for (const auto& c : result.couplings) {
            json j = {{"resonance", resonance_json(c.resonance)}, {"status", c.status}};
            if (c.report) {
                j["G"] = c.report->G;
                j["g_per_gap"] = c.report->g_per_gap;
                j["C_om"] = c.report->C_om;
                j["C_jc_per_gap"] = c.report->C_jc_per_gap;
                j["nonlinearity_warning"] = c.report->nonlinearity_warning;
            }
            arr.push_back(j);
        }
        out["couplings"] = arr;
    }
    if (!result.references.empty()) {
        json arr = json::array();
        for (const auto& r : result.references) {
            arr.push_back({{"name", r.name},
                           {"resonance", resonance_json(r.resonance)},
                           {"G", r.G},
                           {"C_om", r.C_om},
                           {"g_max", r.g_max}});
        }
        out["references"] = arr;
    }
    if (wants(kinds, OutputKind::Sweep)) {
        json arr = json::array();
        for (const auto& s : result.sweep) {
            arr.push_back({{"zeta_prime", s.zeta_prime},
                           {"order", s.order},
                           {"L", s.L},
                           {"l", s.l},
                           {"k0", s.k0},
                           {"kappa", s.kappa},
                           {"G", s.G},
                           {"G_m", s.G_m},
                           {"kappa_m", s.kappa_m},
                           {"prediction", s.prediction}});
        }
        out["sweep"] = arr;
    }
    return out;
}

std::string to_csv(const JobResult& result, OutputKind kind)
{
    std::ostringstream os;
    auto row = [&os](std::initializer_list<std::string> cells) {
        bool first = true;
        for (const auto& c : cells) {
            os << (first ? "" : ",") << c;
            first = false;
        }
        os << '\n';
    };
    switch (kind) {
    case OutputKind::Spectrum:
        row({"k", "T", "D"});
        for (const auto& s : result.spectrum) {
            row({fmt17(s.k), fmt17(s.transmission), fmt17(s.denominator)});
        }
        break;
    case OutputKind::Resonances:
        row({"k0", "transmission_peak", "kappa_curvature", "kappa_halfmax", "overlap_flag", "neighbor_spacing"});
        for (const auto& r : result.resonances) {
            row({fmt17(r.k0), fmt17(r.transmission_peak), fmt17(r.kappa_curvature),
                 r.kappa_halfmax ? fmt17(*r.kappa_halfmax) : "", to_string(r.overlap_flag),
                 fmt17(r.neighbor_spacing)});
        }
        break;
    case OutputKind::Fields:
        row({"k0", "region", "gap_index", "c_plus_re", "c_plus_im", "c_minus_re", "c_minus_im", "mean_intensity"});
        for (const auto& f : result.fields) {
            for (const auto& s : f.segments) {
                row({fmt17(f.k0), region_name(s.region), std::to_string(s.gap_index), fmt17(s.c_plus.real()),
                     fmt17(s.c_plus.imag()), fmt17(s.c_minus.real()), fmt17(s.c_minus.imag()),
                     fmt17(s.mean_intensity)});
            }
        }
        break;
    case OutputKind::Couplings: {
        os << "k0,transmission_peak,kappa,status,G,C_om";
        std::size_t gaps = 0;
        for (const auto& c : result.couplings) {
            if (c.report) {
                gaps = std::max(gaps, c.report->g_per_gap.size());
            }
        }
        for (std::size_t i = 0; i < gaps; ++i) {
            os << ",g_" << i << ",C_jc_" << i;
        }
        for (const auto& ref : result.references) {
            os << ",kappa_over_" << ref.name << ",G_over_" << ref.name << ",C_om_over_" << ref.name;
            for (std::size_t i = 0; i < gaps; ++i) {
                os << ",g_" << i << "_over_" << ref.name;
            }
        }
        os << '\n';
        auto ratio = [](double a, double b) { return b != 0.0 ? fmt17(a / b) : std::string(); };
        for (const auto& c : result.couplings) {
            const auto& r = c.resonance;
            os << fmt17(r.k0) << ',' << fmt17(r.transmission_peak) << ',' << fmt17(r.kappa_curvature) << ','
               << c.status;
            if (!c.report) {
                const std::size_t empty = 2 + 2 * gaps + result.references.size() * (3 + gaps);
                os << std::string(empty, ',') << '\n';
                continue;
            }
            os << ',' << fmt17(c.report->G) << ',' << fmt17(c.report->C_om);
            for (std::size_t i = 0; i < gaps; ++i) {
                const bool has = i < c.report->g_per_gap.size();
                os << ',' << (has ? fmt17(c.report->g_per_gap[i]) : "") << ','
                   << (has ? fmt17(c.report->C_jc_per_gap[i]) : "");
            }
            for (const auto& ref : result.references) {
                os << ',' << ratio(r.kappa_curvature, ref.resonance.kappa_curvature) << ','
                   << ratio(c.report->G, ref.G) << ',' << ratio(c.report->C_om, ref.C_om);
                for (std::size_t i = 0; i < gaps; ++i) {
                    os << ',' << (i < c.report->g_per_gap.size() ? ratio(c.report->g_per_gap[i], ref.g_max) : "");
                }
            }
            os << '\n';
        }
        break;
    }
    case OutputKind::Sweep:
        row({"zeta_prime", "order", "L", "l", "k0", "kappa", "G", "G_over_G_m", "kappa_over_kappa_m",
             "prediction_G_over_G_m"});
        for (const auto& s : result.sweep) {
            row({fmt17(s.zeta_prime), std::to_string(s.order), fmt17(s.L), fmt17(s.l), fmt17(s.k0),
                 fmt17(s.kappa), fmt17(s.G), fmt17(s.G / s.G_m), fmt17(s.kappa / s.kappa_m),
                 fmt17(s.prediction)});
        }
        break;
    }
    return os.str();
}

std::vector<std::string> write_outputs(const JobConfig& config, const JobResult& result)
{
    namespace fs = std::filesystem;
    const std::string base = config.output_path.empty() ? "multicav_output" : config.output_path;
    std::vector<std::string> written;

    auto open = [](const fs::path& path) {
        if (path.has_parent_path()) {
            fs::create_directories(path.parent_path());
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            throw std::runtime_error("cannot open output file " + path.string());
        }
        return f;
    };

    if (config.format == OutputFormat::Json) {
        const json doc = {{"tool", "multicav"},
                          {"version", version()},
                          {"config", config.resolved},
                          {"results", to_json(result, config.outputs)}};
        auto f = open(base);
        f << doc.dump(2) << '\n';
        written.push_back(base);
        return written;
    }

    const std::string header = "# tool: multicav " + version() + "\n# config: " + config.resolved.dump() + "\n";
    auto emit = [&](OutputKind kind, const fs::path& path) {
        auto f = open(path);
        f << header << to_csv(result, kind);
        written.push_back(path.string());
    };
    if (config.outputs.size() == 1) {
        emit(config.outputs.front(), base);
        return written;
    }
    const fs::path p(base);
    const auto stem = (p.parent_path() / p.stem()).string();
    for (const auto kind : config.outputs) {
        emit(kind, stem + "_" + to_string(kind) + ".csv");
    }
    return written;
}

const char* to_string(OutputKind kind)
{
    switch (kind) {
    case OutputKind::Spectrum:
        return "spectrum";
    case OutputKind::Resonances:
        return "resonances";
    case OutputKind::Fields:
        return "fields";
    case OutputKind::Couplings:
        return "couplings";
    case OutputKind::Sweep:
        return "sweep";
    }
    return "spectrum";
}

std::string version()
{
    return MULTICAV_VERSION;
}

} // namespace multicav::job
