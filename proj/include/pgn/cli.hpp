#pragma once

#include "formulas.hpp"
#include "game.hpp"
#include "json_io.hpp"
#include "lattice.hpp"
#include "variational.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

namespace pgn::cli {

inline constexpr const char* schema = "pgn/1";

// exit codes
inline constexpr int ok = 0, domain_failure = 1, usage_failure = 2;

inline std::string num17(double x) { return fmt::format("{:.17g}", x); }

inline json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw parse_error("cannot read '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw parse_error(std::string("malformed JSON: ") + e.what());
    }
}

inline void emit(std::ostream& out, json j) {
    j["schema"] = schema;
    out << j.dump(2) << "\n";
}

inline int cmd_template_validate(const std::string& file, std::ostream& out) {
    auto tf = template_file_from_json(read_json_file(file));
    auto v = check_axioms(tf.dims, tf.path);
    if (!v.ok()) {
        emit(out, {{"valid", false}, {"violations", violations_to_json(v.violations)}});
        return domain_failure;
    }
    emit(out, {{"valid", true}, {"certificate", v.certificate}});
    return ok;
}

inline int cmd_rates(const std::string& file, std::ostream& out) {
    auto tf = template_file_from_json(read_json_file(file));
    Validation v;
    auto t = certify(tf.dims, tf.path, &v);
    if (!t) {
        emit(out, {{"valid", false}, {"violations", violations_to_json(v.violations)}});
        return domain_failure;
    }
    emit(out, analysis_to_json(*t));
    return ok;
}

inline std::vector<double> half_grid(int n) {
    std::vector<double> g;
    for (int i = 0; i < n; ++i) g.push_back(0.5 * double(i) / double(n - 1));
    return g;
}

inline int cmd_figure1(int grid, std::ostream& out) {
    if (grid < 2) throw std::domain_error("grid must be at least 2");
    auto g = half_grid(grid);
    // landmark abscissae so the transition rows are exact
    for (double t : {tau0_sing12, 0.125})
        if (std::find(g.begin(), g.end(), t) == g.end()) g.push_back(t);
    std::sort(g.begin(), g.end());
    out << "tau,f0,f1\n";
    for (double t : g) out << num17(t) << "," << num17(hd_sing12(t)) << "," << num17(pd_sing12(t)) << "\n";
    return ok;
}

inline int cmd_dim_tables(int grid, std::ostream& out) {
    if (grid < 2) throw std::domain_error("grid must be at least 2");
    out << "tau,hd_sing12,pd_sing12\n";
    for (double t : half_grid(grid)) out << num17(t) << "," << num17(hd_sing12(t)) << "," << num17(pd_sing12(t)) << "\n";
    return ok;
}

inline int cmd_traj(int m, int n, const std::string& matrix, double tmax, int steps, std::ostream& out, std::ostream& err) {
    Dimensions dims{m, n};
    check_dims(dims);
    if (m + n > 6) throw std::domain_error("m+n above 6 is not supported");
    if (!(tmax > 0) || steps < 1) throw std::domain_error("need tmax > 0 and steps >= 1");
    MatrixA A = matrix.empty() ? MatrixA::zero(dims) : MatrixA::parse(dims, matrix);
    std::vector<double> grid;
    for (int i = 0; i <= steps; ++i) grid.push_back(tmax * double(i) / double(steps));
    auto samples = sm_function(A, grid);
    out << "t";
    for (int j = 1; j <= dims.d(); ++j) out << ",h_" << j;
    out << ",sum_h,tau_hat_running\n";
    double run = std::numeric_limits<double>::infinity();
    int status = ok;
    for (auto& s : samples) {
        if (!s.ok) {
            err << "t=" << num17(s.t) << ": " << s.error << "\n";
            status = domain_failure;
        }
        out << num17(s.t);
        double sum = 0;
        for (double h : s.h) {
            out << "," << num17(h);
            sum += h;
        }
        for (std::size_t j = s.h.size(); j < static_cast<std::size_t>(dims.d()); ++j) out << ",nan";
        if (s.t > 0 && !s.h.empty()) run = std::min(run, -s.h[0] / s.t);
        out << "," << num17(sum) << "," << (std::isfinite(run) ? num17(run) : std::string("nan")) << "\n";
    }
    return status;
}

inline json search_to_json(const FamilySpec& spec, const SearchResult& r) {
    detail::Family fam(spec);
    json seq = json::array();
    for (int i : r.sequence) seq.push_back(to_json(fam.catalog()[i].slope));
    return {{"m", spec.dims.m}, {"n", spec.dims.n}, {"tau", to_string(spec.tau)},
            {"mode", spec.mode == Mode::hausdorff ? "hd" : "pd"},
            {"family", spec.kind == FamilyKind::geometric ? "geometric" : "periodic"},
            {"seed", r.seed}, {"evaluations", r.evaluations},
            {"lower_rate", to_string(r.lower_rate)}, {"upper_rate", to_string(r.upper_rate)},
            {"tau_hat", to_string(r.tau_hat)}, {"objective", r.objective()},
            {"phase_slopes", seq}, {"tau_breakpoint", r.keq}, {"knobs", r.knobs},
            {"history", r.history}, {"template", template_to_json(spec.dims, r.best_template->path())}};
}

inline int cmd_optimize(const FamilySpec& spec, long long budget, std::uint64_t seed, std::ostream& out) {
    SearchResult r;
    try {
        r = optimize(spec, budget, seed);
    } catch (const infeasible_error& e) {
        emit(out, {{"feasible", false}, {"reason", e.what()}});
        return domain_failure;
    }
    json j = search_to_json(spec, r);
    j["feasible"] = true;
    emit(out, j);
    return ok;
}

inline int cmd_game(const GameConfig& cfg, const std::string& alice, const std::string& bob, std::ostream& out) {
    AliceStrategy a = alice == "singleton" ? singleton_alice()
                    : alice == "interval"  ? interval_alice()
                    : alice == "cantor"    ? cantor_alice(cfg)
                                           : throw std::invalid_argument("unknown alice strategy '" + alice + "'");
    BobStrategy b = bob_by_name(bob);
    Transcript tr;
    try {
        tr = play(cfg, a, b, bob);
    } catch (const illegal_move& e) {
        json w = json::array();
        for (auto& p : e.violation.witnesses) w.push_back(to_json(p));
        emit(out, {{"legal", false}, {"clause", e.violation.clause}, {"detail", e.violation.detail}, {"witnesses", w}});
        return domain_failure;
    }
    json sizes = json::array(), centers = json::array();
    for (auto& A : tr.state.sets) sizes.push_back(A.size());
    for (auto& x : tr.state.centers) centers.push_back(to_json(x));
    emit(out, {{"legal", true}, {"d", cfg.d}, {"beta", to_string(cfg.beta)}, {"turns", cfg.max_turns},
               {"mode", cfg.mode == GameMode::hausdorff ? "hd" : "pd"}, {"alice", tr.alice}, {"bob", tr.bob},
               {"set_sizes", sizes}, {"terms", tr.state.terms}, {"centers", centers},
               {"lower_score", tr.scores.lower}, {"upper_score", tr.scores.upper},
               {"score", cfg.mode == GameMode::hausdorff ? tr.scores.lower : tr.scores.upper},
               {"outcome", to_json(tr.outcome)}, {"enclosure_radius", to_string(tr.enclosure)}});
    return ok;
}

inline Mode parse_mode(const std::string& s) {
    if (s == "hd") return Mode::hausdorff;
    if (s == "pd") return Mode::packing;
    throw parse_error("mode must be hd or pd");
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"pgn: templates, lattice trajectories, dimension formulas and games"};
    app.require_subcommand(1);

    std::string file;
    auto* v = app.add_subcommand("template-validate", "check a template file against the axioms");
    v->add_option("file", file, "template JSON")->required();
    auto* r = app.add_subcommand("rates", "contraction rates of a template file");
    r->add_option("file", file, "template JSON")->required();

    int grid_f = 257, grid_t = 512;
    auto* f1 = app.add_subcommand("figure1", "CSV of both Sing(1,2) dimension curves");
    f1->add_option("--grid", grid_f, "grid points on [0,1/2]");
    auto* dt = app.add_subcommand("dim-tables", "CSV table of hd_sing12 and pd_sing12");
    dt->add_option("--grid", grid_t, "grid points on [0,1/2]");

    int m = 1, n = 1, steps = 300, phases = 4, d = 1, turns = 64;
    double tmax = 30;
    std::string matrix, tau = "0", mode = "hd", family = "geometric", beta = "1/4", alice = "interval", bob = "center";
    long long budget = 2000;
    std::uint64_t seed = 1;
    auto* tj = app.add_subcommand("traj", "successive minima trajectory of g_t u_A");
    tj->add_option("--m", m)->required();
    tj->add_option("--n", n)->required();
    tj->add_option("--matrix", matrix, "row-major entries, comma separated");
    tj->add_option("--tmax", tmax);
    tj->add_option("--steps", steps);

    auto* op = app.add_subcommand("optimize", "search a template family for large contraction rates");
    op->add_option("--m", m)->required();
    op->add_option("--n", n)->required();
    op->add_option("--tau", tau, "p/q")->required();
    op->add_option("--mode", mode, "hd or pd");
    op->add_option("--phases", phases);
    op->add_option("--budget", budget);
    op->add_option("--seed", seed);
    op->add_option("--family", family, "geometric or periodic");

    auto* gm = app.add_subcommand("game", "play the dimension game");
    gm->add_option("--d", d);
    gm->add_option("--beta", beta, "p/q");
    gm->add_option("--turns", turns);
    gm->add_option("--alice", alice, "singleton, interval or cantor");
    gm->add_option("--bob", bob, "center, adversarial, first, last or random:SEED");
    gm->add_option("--mode", mode, "hd or pd");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return usage_failure;
    }

    try {
        if (v->parsed()) return cmd_template_validate(file, out);
        if (r->parsed()) return cmd_rates(file, out);
        if (f1->parsed()) return cmd_figure1(grid_f, out);
        if (dt->parsed()) return cmd_dim_tables(grid_t, out);
        if (tj->parsed()) return cmd_traj(m, n, matrix, tmax, steps, out, err);
        if (op->parsed()) {
            FamilySpec spec;
            spec.dims = {m, n};
            check_dims(spec.dims);
            spec.tau = parse_scalar(tau);
            spec.mode = parse_mode(mode);
            spec.phase_count = phases;
            if (family == "geometric") spec.kind = FamilyKind::geometric;
            else if (family == "periodic") spec.kind = FamilyKind::periodic;
            else throw parse_error("family must be geometric or periodic");
            return cmd_optimize(spec, budget, seed, out);
        }
        if (gm->parsed()) {
            GameConfig cfg{d, parse_scalar(beta), parse_mode(mode) == Mode::hausdorff ? GameMode::hausdorff : GameMode::packing, turns};
            return cmd_game(cfg, alice, bob, out);
        }
    } catch (const parse_error& e) {
        err << "parse error: " << e.what() << "\n";
        return usage_failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return domain_failure;
    }
    return usage_failure;
}

} // namespace pgn::cli
