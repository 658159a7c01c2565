#include "biruin/commands.hpp"

#include <chrono>
#include <filesystem>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "biruin/analysis.hpp"
#include "biruin/error.hpp"
#include "biruin/kernel.hpp"
#include "biruin/wienerhopf.hpp"

namespace biruin {
namespace {

std::string out_dir(const Config& c, const CliOptions& o) {
    std::string d = o.out_dir.empty() ? c.output.dir : o.out_dir;
    std::filesystem::create_directories(d);
    return d;
}

bool wants(const Config& c, const char* fmt) {
    for (const auto& f : c.output.formats)
        if (f == fmt) return true;
    return false;
}

std::pair<double, double> axis_scale(const ModelSpec& m, const Config& c, const CliOptions& o) {
    if (!(o.rescale_axes || c.output.rescale_axes)) return {1.0, 1.0};
    return {m.c1.get_d(), m.c2.get_d()};
}

std::string cplx(Complex z) {
    std::ostringstream s;
    s << std::setprecision(12) << z.real() << (z.imag() < 0 ? " - " : " + ") << std::abs(z.imag()) << "i";
    return s.str();
}

void print_roots(std::ostream& out, const char* label, const std::vector<Root>& roots) {
    out << "  " << label << ":";
    if (roots.empty()) out << " none";
    out << '\n';
    for (const auto& r : roots) out << "    " << cplx(r.value) << (r.multiplicity > 1 ? "  (x" + std::to_string(r.multiplicity) + ")" : "") << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TransformEvaluator evaluator(const ModelSpec& m) { return TransformEvaluator(build_kernel(m)); }

std::vector<double> axis(std::size_t M, double d) {
    std::vector<double> u(M);
    for (std::size_t i = 0; i < M; ++i) u[i] = double(i) * d;
    return u;
}

TailGrid grid_from_csv(const std::string& path) {
    ParsedGrid pg = read_grid_csv(path);
    if (pg.u1.size() < 2 || pg.u2.size() < 2) throw Error(ErrorCode::ShapeMismatch, path + ": grid too small");
    TailGrid t;
    t.values = pg.values;
    t.spec = {pg.u1.size(), pg.u2.size(), pg.u1[1] - pg.u1[0], pg.u2[1] - pg.u2[0]};
    t.model_hash = path;
    return t;
}

}  // namespace

Complex parse_complex(const std::string& s) {
    auto comma = s.find(',');
    try {
        if (comma == std::string::npos) return {std::stod(s), 0.0};
        return {std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
    } catch (const std::exception&) {
        throw Error(ErrorCode::ConfigError, "expected re,im but got '" + s + "'");
    }
}

int cmd_check(const Config& c, std::ostream& out) {
    int code = 0;
    for (const auto& nm : c.models) {
        ValidationReport rep = check_model(nm.model);
        out << "model " << nm.name << '\n' << rep.to_string();
        if (rep.moments) {
            const Moments& m = *rep.moments;
            out << std::setprecision(6) << "E A = " << m.EA.get_d() << ", E B1 = " << m.EB1.get_d() << ", E B2 = " << m.EB2.get_d()
                << ", E D = " << m.ED.get_d() << '\n'
                << "rho1 = " << m.rho1.get_d() << " (" << m.rho1.get_str() << "), rho2 = " << m.rho2.get_d() << " ("
                << m.rho2.get_str() << ")\n";
        }
        if (rep.fatal()) code = 1;
    }
    return code;
}

int cmd_kernel_roots(const Config& c, Complex s1, std::ostream& out) {
    KernelRep K = build_kernel(c.model());
    RootSplit rs = roots_in_z(K, s1);
    out << "s1 = " << cplx(s1) << '\n'
        << "deg_z g = " << rs.deg_g << ", deg_z (g-f) = " << rs.deg_gf << '\n';
    print_roots(out, "poles_neg (zeros of g, Re < 0)", rs.poles_neg);
    print_roots(out, "poles_nonneg (zeros of g, Re >= 0)", rs.poles_nonneg);
    print_roots(out, "zeros_neg (zeros of g-f, Re < 0)", rs.zeros_neg);
    print_roots(out, "zeros_nonneg (zeros of g-f, Re >= 0)", rs.zeros_nonneg);
    out << "axis_margin = " << rs.axis_margin << '\n';
    if (s1.real() > 0.0) {
        RoucheResult r = rouche_check(K, s1, true);
        out << "rouche: zeros_nonneg = " << r.zeros_nonneg << ", poles_nonneg = " << r.poles_nonneg
            << ", contour count = " << r.contour_count << (r.ok ? "  ok" : "  MISMATCH") << '\n';
        if (!r.ok) return 1;
    }
    return 0;
}

int cmd_transform_eval(const Config& c, Complex s1, Complex s2, std::ostream& out) {
    TransformEvaluator ev = evaluator(c.model());
    out << std::setprecision(12);
    out << "atom K+_pr(0) = " << ev.pf().atom << '\n';
    out << "psi(s1,s2) = " << cplx(ev.psi(s1, s2)) << '\n';
    out << "psi(s1,0) = " << cplx(ev.psi_line1(s1)) << '\n';
    out << "psi(0,s2) = " << cplx(ev.psi_line2(s2)) << '\n';
    if (s1.real() > 0.0 && s2.real() > 0.0)
        out << "tail transform = " << cplx(ev.tail(s1, s2)) << '\n';
    else
        out << "tail transform: needs Re s1 > 0 and Re s2 > 0\n";
    return 0;
}

int cmd_invert(const Config& c, const CliOptions& o, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    const ModelSpec& m = c.model();
    ValidationReport rep = check_model(m);
    if (rep.has_warning()) out << rep.to_string();
    TransformEvaluator ev = evaluator(m);
    const std::string dir = out_dir(c, o);

    std::size_t pass = 0, total = 0;
    for (Complex s : contour_nodes(c.inversion.terms1, c.grid.delta1, c.inversion.A1)) {
        ++total;
        pass += bool(rouche_check(ev.kernel(), s));
    }
    out << "rouche: " << pass << "/" << total << " contour nodes pass\n";

    TailGrid t = invert_tail_grid(ev, c.grid, c.inversion);
    std::vector<double> u1 = axis(c.grid.M1, c.grid.delta1), u2 = axis(c.grid.M2, c.grid.delta2);
    std::vector<double> m1 = marginal_tail(ev, 1, u1, c.inversion), m2 = marginal_tail(ev, 2, u2, c.inversion);
    auto [sc1, sc2] = axis_scale(m, c, o);
    emit_tail_csv(t, dir + "/tail.csv", sc1, sc2);
    {
        std::ostringstream s;
        s << "u,P(W1>u),P(W2>u)\n" << std::fixed << std::setprecision(6);
        for (std::size_t i = 0; i < std::max(u1.size(), u2.size()); ++i) {
            s << (i < u1.size() ? u1[i] * sc1 : u2[i] * sc2) << ',';
            if (i < u1.size()) s << m1[i];
            s << ',';
            if (i < u2.size()) s << m2[i];
            s << '\n';
        }
        write_text(dir + "/marginals.csv", s.str());
    }
    if (wants(c, "svg")) write_text(dir + "/tail.svg", heatmap_svg(t.values, t.spec, sc1, sc2));
    out << std::setprecision(6) << "model " << t.model_hash << ", atom P(W1=0) = " << ev.pf().atom
        << ", tail(0,0) = " << t.values(0, 0) << '\n'
        << "raw extrema: min " << t.raw_min << ", max " << t.raw_max << (t.nudged ? " (contour nudged)" : "") << '\n'
        << "wrote " << dir << "/tail.csv in " << std::setprecision(3) << seconds_since(t0) << " s\n";
    return 0;
}

int cmd_simulate(const Config& c, const CliOptions& o, std::ostream& out) {
    auto t0 = std::chrono::steady_clock::now();
    SimParams p = c.simulation;
    if (o.seed) p.seed = *o.seed;
    SimEstimate e = run_reflected(c.model(), p);
    for (const auto& w : e.warnings) out << "warning: " << w << '\n';
    const std::string dir = out_dir(c, o);
    auto [sc1, sc2] = axis_scale(c.model(), c, o);
    emit_sim_csv(e, dir + "/sim.csv", sc1, sc2);
    out << std::setprecision(6) << "steps recorded " << e.recorded_steps << '\n'
        << "P(W=(0,0)) = " << e.atom00 << " +- " << e.atom00_se << '\n'
        << "P(W1=0) = " << e.atom1 << " +- " << e.atom1_se << ", P(W2=0) = " << e.atom2 << " +- " << e.atom2_se << '\n'
        << "tail(0,0) = " << e.tail(0, 0) << " +- " << e.se(0, 0) << '\n'
        << "events W1=0<W2: " << e.null_events << ", W1<W2: " << e.order_violations << '\n'
        << "wrote " << dir << "/sim.csv in " << std::setprecision(3) << seconds_since(t0) << " s\n";
    return 0;
}

int cmd_quantile(const Config& c, const CliOptions& o, std::ostream& out) {
    TailGrid t;
    if (!o.tail_csv.empty()) {
        t = grid_from_csv(o.tail_csv);
    } else {
        TransformEvaluator ev = evaluator(c.model());
        t = invert_tail_grid(ev, c.grid, c.inversion);
    }
    const std::vector<double>& levels = o.levels ? *o.levels : c.output.levels;
    std::vector<QuantileCurve> curves;
    for (double lv : levels) curves.push_back(quantile_curve(t, lv));
    const std::string dir = out_dir(c, o);
    auto [sc1, sc2] = axis_scale(c.model(), c, o);
    emit_quantile_csv(curves, dir + "/quantiles.csv", sc1, sc2);
    write_text(dir + "/quantiles.svg", quantile_svg(curves, double(t.spec.M1 - 1) * t.spec.delta1,
                                                    double(t.spec.M2 - 1) * t.spec.delta2, sc1, sc2));
    for (const auto& cv : curves) out << "level " << cv.level << ": " << cv.vertices.size() << " vertices\n";
    out << "wrote " << dir << "/quantiles.csv and quantiles.svg\n";
    return 0;
}

int cmd_compare(const Config& c, const CliOptions& o, std::ostream& out) {
    std::vector<TailGrid> tails;
    std::vector<std::string> names;
    for (const auto& nm : c.models) {
        TransformEvaluator ev = evaluator(nm.model);
        tails.push_back(invert_tail_grid(ev, c.grid, c.inversion));
        names.push_back(nm.name);
    }
    for (const auto& path : o.with) {
        tails.push_back(grid_from_csv(path));
        names.push_back(std::filesystem::path(path).filename().string());
    }
    for (auto& t : tails) {
        // grids read from CSV carry rounded spacings
        if (std::abs(t.spec.delta1 - tails[0].spec.delta1) < 1e-6 && std::abs(t.spec.delta2 - tails[0].spec.delta2) < 1e-6) {
            t.spec.delta1 = tails[0].spec.delta1;
            t.spec.delta2 = tails[0].spec.delta2;
        }
    }
    ComparisonReport r = compare_models(tails, names, c.output.points);
    std::string text = r.to_string();
    out << text;
    write_text(out_dir(c, o) + "/compare.txt", text);
    return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Joint ruin probabilities of two insurance lines with simultaneous claims"};
    app.require_subcommand(1);
    std::string config_path, s1_text = "1,0", s2_text = "1,0", levels_text, seed_text;
    CliOptions o;

    auto add_common = [&](CLI::App* cmd) { cmd->add_option("--config", config_path, "JSON configuration")->required(); };
    auto add_out = [&](CLI::App* cmd) {
        cmd->add_option("--out", o.out_dir, "output directory");
        cmd->add_flag("--rescale-axes", o.rescale_axes, "report capital axes in original units");
    };
    CLI::App* check = app.add_subcommand("check", "validate the model and print moments");
    add_common(check);
    CLI::App* kernel = app.add_subcommand("kernel", "kernel diagnostics");
    kernel->require_subcommand(1);
    CLI::App* roots = kernel->add_subcommand("roots", "zeros and poles of the kernel in z at fixed s1");
    add_common(roots);
    roots->add_option("--s1", s1_text, "re,im")->required();
    CLI::App* transform = app.add_subcommand("transform", "transform evaluation");
    transform->require_subcommand(1);
    CLI::App* eval = transform->add_subcommand("eval", "evaluate psi and the tail transform");
    add_common(eval);
    eval->add_option("--s1", s1_text, "re,im")->required();
    eval->add_option("--s2", s2_text, "re,im")->required();
    CLI::App* invert = app.add_subcommand("invert", "invert the tail transform on the grid");
    add_common(invert);
    add_out(invert);
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo estimate of the tail on the grid");
    add_common(simulate);
    add_out(simulate);
    simulate->add_option("--seed", seed_text, "random seed");
    CLI::App* quantile = app.add_subcommand("quantile", "quantile curves of the joint tail");
    add_common(quantile);
    add_out(quantile);
    quantile->add_option("--levels", levels_text, "comma separated levels");
    quantile->add_option("--tail", o.tail_csv, "reuse a tail grid CSV instead of inverting");
    CLI::App* compare = app.add_subcommand("compare", "compare the tails of several models");
    add_common(compare);
    add_out(compare);
    compare->add_option("--with", o.with, "additional tail grid CSV files");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    Config cfg;
    try {
        cfg = load_config(config_path);
        if (!seed_text.empty()) {
            std::size_t pos = 0;
            o.seed = std::stoull(seed_text, &pos);
            if (pos != seed_text.size()) throw Error(ErrorCode::ConfigError, "bad seed");
        }
        if (!levels_text.empty()) {
            std::vector<double> lv;
            std::stringstream ss(levels_text);
            std::string cell;
            while (std::getline(ss, cell, ',')) lv.push_back(std::stod(cell));
            o.levels = lv;
        }
    } catch (const std::exception& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (check->parsed()) return cmd_check(cfg, out);
        if (roots->parsed()) return cmd_kernel_roots(cfg, parse_complex(s1_text), out);
        if (eval->parsed()) return cmd_transform_eval(cfg, parse_complex(s1_text), parse_complex(s2_text), out);
        if (invert->parsed()) return cmd_invert(cfg, o, out);
        if (simulate->parsed()) return cmd_simulate(cfg, o, out);
        if (quantile->parsed()) return cmd_quantile(cfg, o, out);
        if (compare->parsed()) return cmd_compare(cfg, o, out);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::ConfigError ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace biruin
