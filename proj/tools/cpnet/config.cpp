#include "config.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace cpnet::cli {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

// Location of the entry being converted, for diagnostics.
struct Where {
    const std::string& source;
    std::size_t line;
    const std::string& section;
    const std::string& key;

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError(source + ":" + std::to_string(line) + ": " + section + "." + key + ": " + msg);
    }
};

double to_double(const std::string& s, const Where& w) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || p != end || !std::isfinite(v))
        w.fail("expected a number, got '" + s + "'");
    return v;
}

std::uint64_t to_uint(const std::string& s, const Where& w) {
    std::uint64_t v = 0;
    const char* end = s.data() + s.size();
    auto [p, ec] = std::from_chars(s.data(), end, v);
    if (s.empty() || ec != std::errc() || p != end) w.fail("expected a non-negative integer, got '" + s + "'");
    return v;
}

double positive(const std::string& s, const Where& w) {
    const double v = to_double(s, w);
    if (!(v > 0.0)) w.fail("must be positive, got '" + s + "'");
    return v;
}

std::size_t count(const std::string& s, const Where& w) {
    const auto v = to_uint(s, w);
    if (v == 0) w.fail("must be at least 1");
    return static_cast<std::size_t>(v);
}

std::string one_of(const std::string& s, std::initializer_list<const char*> options, const Where& w) {
    for (const char* o : options)
        if (s == o) return s;
    std::string list;
    for (const char* o : options) list += (list.empty() ? "" : ", ") + std::string(o);
    w.fail("expected one of {" + list + "}, got '" + s + "'");
}

std::vector<double> doubles(const std::string& s, const Where& w) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(to_double(item, w));
    return out;
}

std::vector<std::size_t> indices(const std::string& s, char sep, const Where& w) {
    std::vector<std::size_t> out;
    if (trim(s).empty()) return out;
    for (const auto& item : split(s, sep)) out.push_back(static_cast<std::size_t>(to_uint(item, w)));
    return out;
}

ShockEntry shock(const std::string& s, const Where& w) {
    const auto parts = split(s, ',');
    if (parts.size() != 3) w.fail("expected 'time, target, delta', got '" + s + "'");
    ShockEntry e;
    e.time = to_double(parts[0], w);
    if (e.time < 0.0) w.fail("shock time must be non-negative");
    const std::string& target = parts[1];
    if (target.rfind("agents:", 0) == 0) {
        e.target = "agents";
        e.agents = indices(target.substr(7), ';', w);
        if (e.agents.empty()) w.fail("agent shock lists no agents");
    } else {
        e.target = one_of(target, {"core", "periphery", "all"}, w);
    }
    e.delta = to_double(parts[2], w);
    return e;
}

FptPoint point(const std::string& s, const Where& w) {
    const auto v = doubles(s, w);
    if (v.size() != 3) w.fail("expected 'mu, sigma, theta', got '" + s + "'");
    if (!(v[1] > 0.0) || !(v[2] > 0.0)) w.fail("sigma and theta must be positive");
    return {v[0], v[1], v[2]};
}

std::vector<std::pair<std::size_t, std::size_t>> sizes(const std::string& s, const Where& w) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& item : split(s, ',')) {
        const auto pq = split(item, ':');
        if (pq.size() != 2) w.fail("expected 'n_core:n_periphery' items, got '" + item + "'");
        out.emplace_back(count(pq[0], w), count(pq[1], w));
    }
    return out;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const Where&)>;

struct KeySpec {
    Setter set;
    bool repeatable = false;
};

const std::map<std::string, std::map<std::string, KeySpec>>& keys() {
    using C = ExperimentConfig;
    using W = Where;
    using S = std::string;
    static const std::map<std::string, std::map<std::string, KeySpec>> table = {
        {"experiment",
         {
             {"kind", {[](C& c, const S& v, const W& w) {
                  auto k = parse_kind(v);
                  if (!k) w.fail("unknown experiment kind '" + v + "'");
                  c.kind = k;
              }}},
             {"out", {[](C& c, const S& v, const W& w) {
                  if (v.empty()) w.fail("must not be empty");
                  c.out = v;
              }}},
             {"formats", {[](C& c, const S& v, const W& w) {
                  c.csv = c.svg = false;
                  for (const auto& f : split(v, ',')) {
                      if (one_of(f, {"csv", "svg"}, w) == "csv")
                          c.csv = true;
                      else
                          c.svg = true;
                  }
                  if (!c.csv) w.fail("csv output cannot be disabled");
              }}},
             {"seed", {[](C& c, const S& v, const W& w) { c.seed = to_uint(v, w); }}},
             {"threads", {[](C& c, const S& v, const W& w) { c.threads = static_cast<unsigned>(to_uint(v, w)); }}},
         }},
        {"network",
         {
             {"n_core", {[](C& c, const S& v, const W& w) { c.network.n_core = count(v, w); }}},
             {"n_periphery", {[](C& c, const S& v, const W& w) { c.network.n_periphery = count(v, w); }}},
             {"epsilon", {[](C& c, const S& v, const W& w) {
                  c.network.epsilon = to_double(v, w);
                  if (!(c.network.epsilon > 0.0 && c.network.epsilon < 1.0)) w.fail("must lie in (0, 1)");
              }}},
             {"file", {[](C& c, const S& v, const W&) { c.network.file = v; }}},
         }},
        {"simulation",
         {
             {"t_end", {[](C& c, const S& v, const W& w) { c.simulation.t_end = positive(v, w); }}},
             {"dt", {[](C& c, const S& v, const W& w) { c.simulation.dt = positive(v, w); }}},
             {"paths", {[](C& c, const S& v, const W& w) {
                  c.simulation.paths = count(v, w);
                  c.paths_set = true;
              }}},
             {"theta_core", {[](C& c, const S& v, const W& w) { c.simulation.theta_core = positive(v, w); }}},
             {"theta_periphery",
              {[](C& c, const S& v, const W& w) { c.simulation.theta_periphery = positive(v, w); }}},
             {"sigma_core", {[](C& c, const S& v, const W& w) {
                  c.simulation.sigma_core = to_double(v, w);
                  if (c.simulation.sigma_core < 0.0) w.fail("must be non-negative");
              }}},
             {"sigma_periphery", {[](C& c, const S& v, const W& w) {
                  c.simulation.sigma_periphery = to_double(v, w);
                  if (c.simulation.sigma_periphery < 0.0) w.fail("must be non-negative");
              }}},
             {"initial_core", {[](C& c, const S& v, const W& w) { c.simulation.initial_core = to_double(v, w); }}},
             {"initial_periphery",
              {[](C& c, const S& v, const W& w) { c.simulation.initial_periphery = to_double(v, w); }}},
             {"shock", {[](C& c, const S& v, const W& w) { c.simulation.shocks.push_back(shock(v, w)); }, true}},
             {"record_stride", {[](C& c, const S& v, const W& w) { c.simulation.record_stride = count(v, w); }}},
             {"record_agents",
              {[](C& c, const S& v, const W& w) { c.simulation.record_agents = indices(v, ',', w); }}},
         }},
        {"driver",
         {
             {"kind", {[](C& c, const S& v, const W& w) {
                  c.driver.kind = one_of(v, {"brownian", "compound-poisson", "compound-poisson-normalized",
                                             "brownian-plus-jumps"},
                                         w);
              }}},
             {"jump_intensity", {[](C& c, const S& v, const W& w) {
                  c.driver.jump_intensity = to_double(v, w);
                  if (c.driver.jump_intensity < 0.0) w.fail("must be non-negative");
              }}},
             {"jump_size_scale", {[](C& c, const S& v, const W& w) { c.driver.jump_size_scale = positive(v, w); }}},
         }},
        {"table1",
         {
             {"theta_periphery", {[](C& c, const S& v, const W& w) {
                  c.table1.theta_periphery = doubles(v, w);
                  for (double t : c.table1.theta_periphery)
                      if (!(t > 0.0)) w.fail("rates must be positive");
              }}},
             {"shock_time", {[](C& c, const S& v, const W& w) { c.table1.shock_time = to_double(v, w); }}},
             {"shock_delta", {[](C& c, const S& v, const W& w) { c.table1.shock_delta = to_double(v, w); }}},
             {"shock_target", {[](C& c, const S& v, const W& w) {
                  c.table1.shock_target = one_of(v, {"core", "periphery", "all"}, w);
              }}},
         }},
        {"converge",
         {
             {"sizes", {[](C& c, const S& v, const W& w) { c.converge.sizes = sizes(v, w); }}},
         }},
        {"fpt",
         {
             {"point", {[](C& c, const S& v, const W& w) { c.fpt.points.push_back(point(v, w)); }, true}},
             {"start", {[](C& c, const S& v, const W& w) { c.fpt.start = to_double(v, w); }}},
             {"barrier", {[](C& c, const S& v, const W& w) { c.fpt.barrier = to_double(v, w); }}},
             {"method", {[](C& c, const S& v, const W& w) {
                  c.fpt.method = one_of(v, {"quadrature", "monte-carlo", "both"}, w);
              }}},
             {"mc_paths", {[](C& c, const S& v, const W& w) { c.fpt.mc_paths = count(v, w); }}},
             {"mc_dt", {[](C& c, const S& v, const W& w) { c.fpt.mc_dt = positive(v, w); }}},
             {"mc_t_max", {[](C& c, const S& v, const W& w) { c.fpt.mc_t_max = positive(v, w); }}},
         }},
        {"hedge",
         {
             {"mu", {[](C& c, const S& v, const W& w) { c.hedge.mu = to_double(v, w); }}},
             {"sigma_before", {[](C& c, const S& v, const W& w) { c.hedge.sigma_before = positive(v, w); }}},
             {"sigma_after", {[](C& c, const S& v, const W& w) { c.hedge.sigma_after = positive(v, w); }}},
             {"theta_before", {[](C& c, const S& v, const W& w) { c.hedge.theta_before = positive(v, w); }}},
             {"theta_lo", {[](C& c, const S& v, const W& w) { c.hedge.theta_lo = positive(v, w); }}},
             {"theta_hi", {[](C& c, const S& v, const W& w) { c.hedge.theta_hi = positive(v, w); }}},
         }},
        {"risk_curves",
         {
             {"mus", {[](C& c, const S& v, const W& w) { c.risk_curves.mus = doubles(v, w); }}},
             {"sigma", {[](C& c, const S& v, const W& w) { c.risk_curves.sigma = positive(v, w); }}},
             {"theta_min", {[](C& c, const S& v, const W& w) { c.risk_curves.theta_min = positive(v, w); }}},
             {"theta_max", {[](C& c, const S& v, const W& w) { c.risk_curves.theta_max = positive(v, w); }}},
             {"theta_points", {[](C& c, const S& v, const W& w) { c.risk_curves.theta_points = count(v, w); }}},
             {"mu_reference", {[](C& c, const S& v, const W& w) { c.risk_curves.mu_reference = to_double(v, w); }}},
             {"sigma_before", {[](C& c, const S& v, const W& w) { c.risk_curves.sigma_before = positive(v, w); }}},
             {"sigma_after", {[](C& c, const S& v, const W& w) { c.risk_curves.sigma_after = positive(v, w); }}},
             {"theta_before", {[](C& c, const S& v, const W& w) { c.risk_curves.theta_before = positive(v, w); }}},
             {"mu_min", {[](C& c, const S& v, const W& w) { c.risk_curves.mu_min = to_double(v, w); }}},
             {"mu_max", {[](C& c, const S& v, const W& w) { c.risk_curves.mu_max = to_double(v, w); }}},
             {"mu_points", {[](C& c, const S& v, const W& w) { c.risk_curves.mu_points = count(v, w); }}},
         }},
        {"paths",
         {
             {"plot_paths", {[](C& c, const S& v, const W& w) { c.paths.plot_paths = count(v, w); }}},
         }},
    };
    return table;
}

}  // namespace

std::string to_string(Kind k) {
    switch (k) {
        case Kind::Paths: return "paths";
        case Kind::Table1: return "table1";
        case Kind::Converge: return "converge";
        case Kind::Fpt: return "fpt";
        case Kind::Hedge: return "hedge";
        case Kind::RiskCurves: return "risk-curves";
        case Kind::ValidateNet: return "validate-net";
    }
    return "unknown";
}

std::optional<Kind> parse_kind(const std::string& name) {
    for (Kind k : {Kind::Paths, Kind::Table1, Kind::Converge, Kind::Fpt, Kind::Hedge, Kind::RiskCurves,
                   Kind::ValidateNet})
        if (to_string(k) == name) return k;
    return std::nullopt;
}

ExperimentConfig defaults_for(Kind kind) {
    ExperimentConfig c;
    c.kind = kind;
    if (kind == Kind::Table1) c.simulation.sigma_periphery = 0.5;
    if (kind == Kind::Converge) {
        c.simulation.sigma_periphery = 0.5;
        c.simulation.paths = 2000;
    }
    if (kind == Kind::Paths) c.simulation.paths = 100;
    return c;
}

ExperimentConfig parse_config(std::istream& in, const std::string& source, ExperimentConfig c) {
    const auto& table = keys();
    std::string section;
    std::set<std::pair<std::string, std::string>> seen;
    bool fpt_points_reset = false;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#' || line[0] == ';') continue;
        if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));
        const std::string where = source + ":" + std::to_string(line_no) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where + "malformed section header '" + line + "'");
            section = trim(line.substr(1, line.size() - 2));
            if (!table.contains(section)) throw ConfigError(where + "unknown section [" + section + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value', got '" + line + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty()) throw ConfigError(where + "key '" + key + "' appears before any [section]");
        const auto& section_keys = table.at(section);
        const auto it = section_keys.find(key);
        if (it == section_keys.end()) throw ConfigError(where + "unknown key '" + key + "' in [" + section + "]");
        if (!it->second.repeatable && !seen.emplace(section, key).second)
            throw ConfigError(where + section + "." + key + ": duplicate key");
        if (section == "fpt" && key == "point" && !fpt_points_reset) {
            c.fpt.points.clear();
            fpt_points_reset = true;
        }
        it->second.set(c, value, Where{source, line_no, section, key});
    }
    if (c.risk_curves.theta_max <= c.risk_curves.theta_min)
        throw ConfigError(source + ": risk_curves: theta_max must exceed theta_min");
    if (c.risk_curves.mu_max <= c.risk_curves.mu_min)
        throw ConfigError(source + ": risk_curves: mu_max must exceed mu_min");
    if (c.hedge.theta_hi <= c.hedge.theta_lo) throw ConfigError(source + ": hedge: theta_hi must exceed theta_lo");
    return c;
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig defaults) {
    std::ifstream f(path);
    if (!f) throw ConfigError(path + ": cannot open config file");
    return parse_config(f, path, std::move(defaults));
}

const std::map<std::string, std::vector<std::string>>& schema() {
    static const auto s = [] {
        std::map<std::string, std::vector<std::string>> out;
        for (const auto& [section, ks] : keys())
            for (const auto& [k, spec] : ks) out[section].push_back(k);
        return out;
    }();
    return s;
}

}  // namespace cpnet::cli
