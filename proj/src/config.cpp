#include "biruin/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <initializer_list>

#include "biruin/error.hpp"

namespace biruin {
namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::ConfigError, msg); }

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) fail(where + " must be an object");
    for (const auto& [key, val] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) fail("unknown key '" + key + "' in " + where);
    }
}

const json& req(const json& j, const char* key, const std::string& where) {
    auto it = j.find(key);
    if (it == j.end()) fail("missing key '" + std::string(key) + "' in " + where);
    return *it;
}

std::uint64_t count(const json& v, const std::string& where) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return std::uint64_t(v.get<std::int64_t>());
    fail(where + " must be a nonnegative integer");
}

double real(const json& v, const std::string& where) {
    if (!v.is_number() && !v.is_string()) fail(where + " must be a number");
    return exact_number(v).get_d();
}

Erlang erlang(const json& j, const std::string& where) {
    check_keys(j, {"order", "rate"}, where);
    Erlang e;
    e.order = unsigned(count(req(j, "order", where), where + ".order"));
    e.rate = exact_number(req(j, "rate", where));
    return e;
}

void income(const json& j, Rational& c1, Rational& c2) {
    const json& c = req(j, "income", "model");
    if (!c.is_array() || c.size() != 2) fail("model.income must be [c1, c2]");
    c1 = exact_number(c[0]);
    c2 = exact_number(c[1]);
}

MultiPoly raw_poly(const json& terms, const std::string& where) {
    if (!terms.is_array()) fail(where + " must be a list of terms");
    MultiPoly p(3);
    for (const auto& t : terms) {
        check_keys(t, {"coef", "exp"}, where + " term");
        const json& e = req(t, "exp", where + " term");
        if (!e.is_array() || e.size() != 3) fail(where + " term exp must have three exponents");
        Monomial m{unsigned(count(e[0], where)), unsigned(count(e[1], where)), unsigned(count(e[2], where))};
        p.add_term(m, exact_number(req(t, "coef", where + " term")));
    }
    return p;
}

}  // namespace

Rational parse_decimal(std::string_view s) {
    auto bad = [&]() -> Rational { fail("not an exact number: '" + std::string(s) + "'"); };
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    if (s.empty()) return bad();
    if (auto slash = s.find('/'); slash != std::string_view::npos) {
        Rational a = parse_decimal(s.substr(0, slash)), b = parse_decimal(s.substr(slash + 1));
        if (b == 0) return bad();
        return a / b;
    }
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') neg = s[i++] == '-';
    std::string digits;
    long exp10 = 0;
    bool any = false, dot = false;
    for (; i < s.size(); ++i) {
        char ch = s[i];
        if (std::isdigit(static_cast<unsigned char>(ch))) {
            digits += ch;
            any = true;
            if (dot) --exp10;
        } else if (ch == '.' && !dot) {
            dot = true;
        } else {
            break;
        }
    }
    if (!any) return bad();
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') return bad();
        long e = 0;
        auto tail = s.substr(i + 1);
        if (!tail.empty() && tail.front() == '+') tail.remove_prefix(1);
        auto [p, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), e);
        if (ec != std::errc() || p != tail.data() + tail.size()) return bad();
        exp10 += e;
    }
    if (exp10 > 400 || exp10 < -400) return bad();
    mpz_class n(digits, 10), p10;
    mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational r = exp10 >= 0 ? Rational(n * p10) : Rational(n, p10);
    r.canonicalize();
    return neg ? Rational(-r) : r;
}

Rational exact_number(const json& v) {
    if (v.is_number_integer()) return v.is_number_unsigned() ? Rational(std::to_string(v.get<std::uint64_t>()))
                                                             : Rational(std::to_string(v.get<std::int64_t>()));
    if (v.is_number_float()) {
        char buf[64];
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v.get<double>());
        if (ec != std::errc()) fail("unrepresentable number");
        return parse_decimal(std::string_view(buf, std::size_t(p - buf)));
    }
    if (v.is_string()) return parse_decimal(v.get<std::string>());
    fail("expected a number, got " + v.dump());
}

ModelSpec parse_model(const json& j) {
    if (!j.is_object()) fail("model must be an object");
    std::string kind = req(j, "kind", "model").get<std::string>();
    try {
        if (kind == "mixture") {
            check_keys(j, {"kind", "income", "outcomes"}, "model");
            MixtureSpec m;
            income(j, m.c1, m.c2);
            for (const auto& o : req(j, "outcomes", "model")) {
                check_keys(o, {"weight", "A", "D", "B2"}, "mixture outcome");
                m.outcomes.push_back({exact_number(req(o, "weight", "outcome")), erlang(req(o, "A", "outcome"), "A"),
                                      erlang(req(o, "D", "outcome"), "D"), erlang(req(o, "B2", "outcome"), "B2")});
            }
            return build_H_mixture(m);
        }
        if (kind == "proportional") {
            check_keys(j, {"kind", "income", "alpha", "outcomes"}, "model");
            ProportionalSpec p;
            income(j, p.c1, p.c2);
            p.alpha = exact_number(req(j, "alpha", "model"));
            for (const auto& o : req(j, "outcomes", "model")) {
                check_keys(o, {"weight", "A", "B"}, "proportional outcome");
                p.outcomes.push_back({exact_number(req(o, "weight", "outcome")), erlang(req(o, "A", "outcome"), "A"),
                                      erlang(req(o, "B", "outcome"), "B")});
            }
            return build_H_proportional(p);
        }
        if (kind == "raw") {
            check_keys(j, {"kind", "income", "num", "den"}, "model");
            Rational c1, c2;
            income(j, c1, c2);
            RationalLST3 H{raw_poly(req(j, "num", "model"), "num"), raw_poly(req(j, "den", "model"), "den")};
            return model_from_raw(std::move(H), c1, c2);
        }
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail(e.what());
    }
    fail("model.kind must be mixture, proportional or raw");
}

Config parse_config(const json& j) {
    check_keys(j, {"description", "model", "models", "grid", "inversion", "simulation", "output"}, "config");
    Config c;
    try {
        if (j.contains("model") == j.contains("models")) fail("config needs exactly one of 'model' and 'models'");
        if (j.contains("model")) {
            c.models.push_back({"model", parse_model(j["model"])});
        } else {
            for (const auto& e : j["models"]) {
                check_keys(e, {"name", "model"}, "models entry");
                c.models.push_back({req(e, "name", "models entry").get<std::string>(), parse_model(req(e, "model", "models entry"))});
            }
            if (c.models.empty()) fail("'models' is empty");
        }
        if (j.contains("grid")) {
            const json& g = j["grid"];
            check_keys(g, {"M1", "M2", "delta1", "delta2"}, "grid");
            if (g.contains("M1")) c.grid.M1 = count(g["M1"], "grid.M1");
            if (g.contains("M2")) c.grid.M2 = count(g["M2"], "grid.M2");
            if (g.contains("delta1")) c.grid.delta1 = real(g["delta1"], "grid.delta1");
            if (g.contains("delta2")) c.grid.delta2 = real(g["delta2"], "grid.delta2");
        }
        if (j.contains("inversion")) {
            const json& v = j["inversion"];
            check_keys(v, {"A1", "A2", "terms1", "terms2", "accel", "contour_nudge", "workers"}, "inversion");
            InvParams& p = c.inversion;
            if (v.contains("A1")) p.A1 = real(v["A1"], "inversion.A1");
            if (v.contains("A2")) p.A2 = real(v["A2"], "inversion.A2");
            if (v.contains("terms1")) p.terms1 = count(v["terms1"], "inversion.terms1");
            if (v.contains("terms2")) p.terms2 = count(v["terms2"], "inversion.terms2");
            if (v.contains("accel")) p.accel = unsigned(count(v["accel"], "inversion.accel"));
            if (v.contains("contour_nudge")) p.contour_nudge = real(v["contour_nudge"], "inversion.contour_nudge");
            if (v.contains("workers")) p.workers = unsigned(count(v["workers"], "inversion.workers"));
        }
        if (j.contains("simulation")) {
            const json& v = j["simulation"];
            check_keys(v, {"seed", "burn_in", "steps", "replications", "workers"}, "simulation");
            SimParams& p = c.simulation;
            if (v.contains("seed")) p.seed = count(v["seed"], "simulation.seed");
            if (v.contains("burn_in")) p.burn_in = count(v["burn_in"], "simulation.burn_in");
            if (v.contains("steps")) p.steps = count(v["steps"], "simulation.steps");
            if (v.contains("replications")) p.replications = unsigned(count(v["replications"], "simulation.replications"));
            if (v.contains("workers")) p.workers = unsigned(count(v["workers"], "simulation.workers"));
        }
        c.simulation.grid = c.grid;
        if (j.contains("output")) {
            const json& v = j["output"];
            check_keys(v, {"dir", "formats", "rescale_axes", "levels", "points"}, "output");
            OutputOptions& o = c.output;
            if (v.contains("dir")) o.dir = v["dir"].get<std::string>();
            if (v.contains("formats")) {
                o.formats = v["formats"].get<std::vector<std::string>>();
                for (const auto& f : o.formats)
                    if (f != "csv" && f != "svg") fail("output.formats entries must be csv or svg");
            }
            if (v.contains("rescale_axes")) o.rescale_axes = v["rescale_axes"].get<bool>();
            if (v.contains("levels")) {
                o.levels.clear();
                for (const auto& x : v["levels"]) o.levels.push_back(real(x, "output.levels"));
            }
            if (v.contains("points")) {
                for (const auto& pt : v["points"]) {
                    if (!pt.is_array() || pt.size() != 2) fail("output.points entries must be [u1, u2]");
                    o.points.emplace_back(real(pt[0], "point"), real(pt[1], "point"));
                }
            }
        }
        c.grid.validate();
        c.inversion.validate();
        c.simulation.validate();
    } catch (const nlohmann::json::exception& e) {
        fail(e.what());
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError) throw;
        fail(e.what());
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) fail("cannot read config " + path);
    json j;
    try {
        j = json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace biruin
