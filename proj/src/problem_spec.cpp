#include "robustmd/problem_spec.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace robustmd {

using nlohmann::json;

namespace {

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
    if (!j.is_object()) throw SpecError(where + ": expected an object");
    std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, _] : j.items())
        if (!allowed.count(k)) throw SpecError(where + ": unknown key '" + k + "'");
}

double number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw SpecError(where + ": missing '" + key + "'");
    const auto& x = j.at(key);
    if (!x.is_number()) throw SpecError(where + ": '" + key + "' must be a number");
    const double d = x.get<double>();
    if (!std::isfinite(d)) throw SpecError(where + ": '" + key + "' must be finite");
    return d;
}

double number_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? number(j, key, where) : fallback;
}

std::string text(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string()) throw SpecError(where + ": '" + key + "' must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> numbers(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) return {};
    const auto& a = j.at(key);
    if (!a.is_array()) throw SpecError(where + ": '" + key + "' must be an array");
    std::vector<double> out;
    for (const auto& x : a) {
        if (!x.is_number()) throw SpecError(where + ": '" + key + "' must hold numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::pair<double, double>> pairs_of(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw SpecError(where + ": missing '" + key + "'");
    const auto& a = j.at(key);
    if (!a.is_array()) throw SpecError(where + ": '" + key + "' must be an array of pairs");
    std::vector<std::pair<double, double>> out;
    for (const auto& p : a) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            throw SpecError(where + ": '" + key + "' must be an array of [x, y] pairs");
        out.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    return out;
}

json pairs_json(const std::vector<std::pair<double, double>>& v) {
    json a = json::array();
    for (const auto& [x, y] : v) a.push_back({x, y});
    return a;
}

Objective objective_of(const std::string& s) {
    if (s == "revenue") return Objective::Revenue;
    if (s == "negRegret") return Objective::NegRegret;
    throw SpecError("value: objective must be 'revenue' or 'negRegret'");
}

const char* objective_name(Objective o) { return o == Objective::Revenue ? "revenue" : "negRegret"; }

ValueSpec parse_value(const json& j) {
    const std::string w = "value";
    ValueSpec v;
    v.type = text(j, "type", w);
    if (v.type == "postedPrice") {
        only_keys(j, {"type", "price", "objective"}, w);
        v.price = number(j, "price", w);
        if (v.price < 0.0) throw SpecError("value: negative price");
    } else if (v.type == "priceCdf") {
        only_keys(j, {"type", "atoms", "objective"}, w);
        v.price_atoms = pairs_of(j, "atoms", w);
        double total = 0.0;
        for (auto [p, m] : v.price_atoms) {
            if (p < 0.0 || m < 0.0) throw SpecError("value: price atoms must be nonnegative");
            total += m;
        }
        if (std::abs(total - 1.0) > 1e-9) throw SpecError("value: price probabilities must sum to 1");
    } else if (v.type == "bergemannSchlag") {
        only_keys(j, {"type", "thetaBar", "objective"}, w);
        v.theta_bar = number(j, "thetaBar", w);
        if (!(v.theta_bar >= 0.0 && v.theta_bar < 1.0)) throw SpecError("value: thetaBar must be in [0, 1)");
        v.objective = Objective::NegRegret;
    } else if (v.type == "persuasion") {
        only_keys(j, {"type", "alpha"}, w);
        v.alpha = number(j, "alpha", w);
        if (!(v.alpha > 0.0 && v.alpha < 0.5)) throw SpecError("value: alpha must be in (0, 1/2)");
    } else if (v.type == "table") {
        only_keys(j, {"type", "theta", "values"}, w);
        v.theta = numbers(j, "theta", w);
        v.values = numbers(j, "values", w);
        if (v.theta.empty() || v.theta.size() != v.values.size())
            throw SpecError("value: table needs matching nonempty theta and values");
        if (!std::is_sorted(v.theta.begin(), v.theta.end())) throw SpecError("value: table theta must increase");
    } else {
        throw SpecError("value: unknown type '" + v.type + "'");
    }
    if (j.contains("objective")) v.objective = objective_of(text(j, "objective", w));
    return v;
}

json value_json(const ValueSpec& v) {
    json j{{"type", v.type}};
    if (v.type == "postedPrice") {
        j["price"] = v.price;
        j["objective"] = objective_name(v.objective);
    } else if (v.type == "priceCdf") {
        j["atoms"] = pairs_json(v.price_atoms);
        j["objective"] = objective_name(v.objective);
    } else if (v.type == "bergemannSchlag") {
        j["thetaBar"] = v.theta_bar;
        j["objective"] = objective_name(v.objective);
    } else if (v.type == "persuasion") {
        j["alpha"] = v.alpha;
    } else {
        j["theta"] = v.theta;
        j["values"] = v.values;
    }
    return j;
}

MomentSpec parse_moment(const json& j) {
    const std::string w = "ambiguity.moments";
    only_keys(j, {"kind", "power", "a", "b", "lo", "hi"}, w);
    MomentSpec m;
    m.kind = text(j, "kind", w);
    if (m.kind == "power") {
        m.power = number_or(j, "power", 1.0, w);
        if (m.power <= 0.0) throw SpecError(w + ": power must be positive");
    } else if (m.kind == "indicator") {
        m.a = number(j, "a", w);
        m.b = number(j, "b", w);
        if (m.a > m.b) throw SpecError(w + ": indicator needs a <= b");
    } else {
        throw SpecError(w + ": kind must be 'power' or 'indicator'");
    }
    if (j.contains("lo")) m.lo = number(j, "lo", w);
    if (j.contains("hi")) m.hi = number(j, "hi", w);
    if (m.lo > m.hi) throw SpecError(w + ": lo exceeds hi");
    if (!std::isfinite(m.lo) && !std::isfinite(m.hi)) throw SpecError(w + ": row needs a bound");
    return m;
}

json moment_json(const MomentSpec& m) {
    json j{{"kind", m.kind}};
    if (m.kind == "power") j["power"] = m.power;
    else {
        j["a"] = m.a;
        j["b"] = m.b;
    }
    if (std::isfinite(m.lo)) j["lo"] = m.lo;
    if (std::isfinite(m.hi)) j["hi"] = m.hi;
    return j;
}

AmbiguitySpec parse_ambiguity(const json& j) {
    const std::string w = "ambiguity";
    AmbiguitySpec a;
    a.type = text(j, "type", w);
    if (a.type == "median") {
        only_keys(j, {"type", "median", "radius"}, w);
        a.median = number(j, "median", w);
    } else if (a.type == "quantile") {
        only_keys(j, {"type", "pairs", "radius"}, w);
        a.pairs = pairs_of(j, "pairs", w);
    } else if (a.type == "support") {
        only_keys(j, {"type", "lo", "hi", "radius"}, w);
        a.lo = number(j, "lo", w);
        a.hi = number(j, "hi", w);
        if (a.lo > a.hi) throw SpecError("ambiguity: support needs lo <= hi");
    } else if (a.type == "moments") {
        only_keys(j, {"type", "moments", "radius"}, w);
        if (!j.contains("moments") || !j.at("moments").is_array() || j.at("moments").empty())
            throw SpecError("ambiguity: 'moments' must be a nonempty array");
        for (const auto& m : j.at("moments")) a.moments.push_back(parse_moment(m));
    } else if (a.type == "supportMean") {
        only_keys(j, {"type", "lo", "hi", "mean", "radius"}, w);
        a.lo = number(j, "lo", w);
        a.hi = number(j, "hi", w);
        a.mean = number(j, "mean", w);
        if (!(a.lo <= a.mean && a.mean <= a.hi)) throw SpecError("ambiguity: mean outside the support");
    } else if (a.type == "halfSpace") {
        only_keys(j, {"type", "level", "radius"}, w);
        a.level = number(j, "level", w);
    } else if (a.type == "singleton") {
        only_keys(j, {"type", "atoms", "radius"}, w);
        a.atoms = pairs_of(j, "atoms", w);
    } else {
        throw SpecError("ambiguity: unknown type '" + a.type + "'");
    }
    if (j.contains("radius")) {
        a.radius = number(j, "radius", w);
        if (!(*a.radius > 0.0)) throw SpecError("ambiguity: radius must be positive");
    }
    return a;
}

json ambiguity_json(const AmbiguitySpec& a) {
    json j{{"type", a.type}};
    if (a.type == "median") j["median"] = a.median;
    else if (a.type == "quantile") j["pairs"] = pairs_json(a.pairs);
    else if (a.type == "support") {
        j["lo"] = a.lo;
        j["hi"] = a.hi;
    } else if (a.type == "moments") {
        j["moments"] = json::array();
        for (const auto& m : a.moments) j["moments"].push_back(moment_json(m));
    } else if (a.type == "supportMean") {
        j["lo"] = a.lo;
        j["hi"] = a.hi;
        j["mean"] = a.mean;
    } else if (a.type == "halfSpace") j["level"] = a.level;
    else j["atoms"] = pairs_json(a.atoms);
    if (a.radius) j["radius"] = *a.radius;
    return j;
}

} // namespace

ProblemSpec parse_problem_spec(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw SpecError(std::string("spec is not valid JSON: ") + e.what());
    }
    only_keys(j, {"command", "grid", "value", "ambiguity", "options"}, "spec");
    ProblemSpec s;
    s.command = text(j, "command", "spec");
    static const std::set<std::string> commands{"guarantee", "check-robust", "robustify", "figure"};
    if (!commands.count(s.command)) throw SpecError("spec: unknown command '" + s.command + "'");

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        only_keys(g, {"lo", "hi", "spacing", "extra"}, "grid");
        s.grid.lo = number_or(g, "lo", s.grid.lo, "grid");
        s.grid.hi = number_or(g, "hi", s.grid.hi, "grid");
        s.grid.spacing = number_or(g, "spacing", s.grid.spacing, "grid");
        s.grid.extra = numbers(g, "extra", "grid");
        if (!(s.grid.spacing > 0.0) || !(s.grid.hi > s.grid.lo) || s.grid.lo < 0.0)
            throw SpecError("grid: need 0 <= lo < hi and spacing > 0");
    }
    if (j.contains("value")) s.value = parse_value(j.at("value"));
    if (j.contains("ambiguity")) s.ambiguity = parse_ambiguity(j.at("ambiguity"));
    if (j.contains("options")) {
        const auto& o = j.at("options");
        only_keys(o, {"tol", "levels", "witnesses", "thetaBar", "radius", "figure"}, "options");
        s.options.tol = number_or(o, "tol", s.options.tol, "options");
        s.options.levels = static_cast<int>(number_or(o, "levels", s.options.levels, "options"));
        s.options.witnesses = static_cast<int>(number_or(o, "witnesses", s.options.witnesses, "options"));
        s.options.theta_bar = number_or(o, "thetaBar", s.options.theta_bar, "options");
        s.options.radius = number_or(o, "radius", s.options.radius, "options");
        if (o.contains("figure")) s.options.figure = text(o, "figure", "options");
        if (!(s.options.tol > 0.0) || s.options.levels < 1 || s.options.witnesses < 1)
            throw SpecError("options: tol must be positive, levels and witnesses at least 1");
    }
    if ((s.command == "guarantee" || s.command == "check-robust") && (!s.value || !s.ambiguity))
        throw SpecError("spec: '" + s.command + "' needs 'value' and 'ambiguity'");
    return s;
}

std::string serialize(const ProblemSpec& s) {
    json j{{"command", s.command},
           {"grid", {{"lo", s.grid.lo}, {"hi", s.grid.hi}, {"spacing", s.grid.spacing}, {"extra", s.grid.extra}}},
           {"options",
            {{"tol", s.options.tol},
             {"levels", s.options.levels},
             {"witnesses", s.options.witnesses},
             {"thetaBar", s.options.theta_bar},
             {"radius", s.options.radius}}}};
    if (!s.options.figure.empty()) j["options"]["figure"] = s.options.figure;
    if (s.value) j["value"] = value_json(*s.value);
    if (s.ambiguity) j["ambiguity"] = ambiguity_json(*s.ambiguity);
    return j.dump(2);
}

GridPtr build_grid(const ProblemSpec& s) {
    std::vector<double> extra = s.grid.extra;
    if (s.value) {
        const auto& v = *s.value;
        if (v.type == "postedPrice") extra.push_back(v.price);
        if (v.type == "bergemannSchlag") {
            extra.insert(extra.end(), {v.theta_bar, std::exp(-1.0), 1.0});
        }
        if (v.type == "persuasion") extra.push_back(v.alpha);
        for (auto [p, m] : v.price_atoms) extra.push_back(p);
        extra.insert(extra.end(), v.theta.begin(), v.theta.end());
    }
    if (s.ambiguity) {
        const auto& a = *s.ambiguity;
        if (a.type == "median") extra.push_back(a.median);
        for (auto [x, al] : a.pairs) extra.push_back(x);
        if (a.type == "support" || a.type == "supportMean") extra.insert(extra.end(), {a.lo, a.hi});
        for (auto [x, m] : a.atoms) extra.push_back(x);
        for (const auto& m : a.moments)
            if (m.kind == "indicator") extra.insert(extra.end(), {m.a, m.b});
    }
    try {
        return Grid::uniform(s.grid.lo, s.grid.hi, s.grid.spacing, extra);
    } catch (const std::invalid_argument& e) {
        throw SpecError(std::string("grid: ") + e.what());
    }
}

ValueFunction build_value(const ValueSpec& v, const GridPtr& grid) {
    if (v.type == "postedPrice") return posted_price_value(v.price, grid, v.objective);
    if (v.type == "priceCdf") {
        std::vector<double> q(grid->size(), 0.0);
        for (auto [p, m] : v.price_atoms)
            for (std::size_t i = 0; i < q.size(); ++i)
                if ((*grid)[i] >= p - 1e-12) q[i] += m;
        q.back() = 1.0;
        return cdf_value(PriceCdf(grid, std::move(q)), v.objective);
    }
    if (v.type == "bergemannSchlag") return cdf_value(bs_optimal_cdf(v.theta_bar, grid), v.objective);
    if (v.type == "persuasion") return persuasion_value(v.alpha, grid);
    return ValueFunction::from_function(grid, [&](double t) {
        auto it = std::upper_bound(v.theta.begin(), v.theta.end(), t + 1e-12);
        if (it == v.theta.begin()) return v.values.front();
        return v.values[static_cast<std::size_t>(it - v.theta.begin()) - 1];
    });
}

AmbiguitySet build_ambiguity(const AmbiguitySpec& a, const GridPtr& grid, const ValueFunction& v) {
    BaseSet base = SupportInterval{a.lo, a.hi};
    if (a.type == "median") base = median_set(a.median);
    else if (a.type == "quantile") base = QuantileSet{a.pairs};
    else if (a.type == "moments") {
        LinearSet set;
        set.continuous_moments = true;
        for (const auto& m : a.moments) {
            if (m.kind == "power") {
                set.rows.push_back(
                    {ValueFunction::from_function(grid, [p = m.power](double t) { return std::pow(t, p); }), m.lo, m.hi});
            } else {
                set.continuous_moments = false;
                set.rows.push_back({ValueFunction::from_function(
                                        grid, [&](double t) { return (t >= m.a - 1e-12 && t <= m.b + 1e-12) ? 1.0 : 0.0; }),
                                    m.lo, m.hi});
            }
        }
        base = std::move(set);
    } else if (a.type == "supportMean") base = support_mean_set(grid, a.lo, a.hi, a.mean);
    else if (a.type == "halfSpace") base = HalfSpace{v, a.level};
    else if (a.type == "singleton") {
        try {
            base = Singleton{DiscretePrior::from_atoms(grid, a.atoms)};
        } catch (const std::invalid_argument& e) {
            throw SpecError(std::string("ambiguity: ") + e.what());
        }
    }
    if (a.type == "quantile" || a.type == "median") {
        try {
            validate(std::get<QuantileSet>(base), *grid);
        } catch (const std::invalid_argument& e) {
            throw SpecError(std::string("ambiguity: ") + e.what());
        }
    }
    if (a.radius) return AmbiguitySet::ball(std::move(base), *a.radius);
    return AmbiguitySet(std::move(base));
}

} // namespace robustmd
