// qhm: quantale-valued behavioural distances, the logic L(Lambda), and the
// theorem harnesses, over coalgebra descriptions in JSON.

#include <qhm/closure.hpp>
#include <qhm/engine.hpp>
#include <qhm/gen.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <string>

using namespace qhm;

namespace {

struct run_config {
    std::string in_path;
    std::string out_path;
    std::string quantale_name = "bool2";
    std::string backend_name = "lp";
    std::string format = "json";
    std::string eps = "1e-9";
    std::string grid;  // empty = per-command default
    std::size_t depth = 4;
    std::size_t width = 0;
    std::uint64_t seed = 0;
    std::uint64_t replay = 0;
    bool has_replay = false;
};

quantale quantale_by_name(const std::string& name) {
    if (name == "bool2") return quantale::bool2();
    if (name == "luk01") return quantale::luk01();
    if (name == "max01") return quantale::max01();
    if (name == "diamond4") return quantale::diamond4();
    if (name == "luk01xluk01") return quantale::product(quantale::luk01(), quantale::luk01());
    if (name == "bool2xbool2") return quantale::product(quantale::bool2(), quantale::bool2());
    if (name == "godel3") return quantale::godel_chain(2);
    if (name == "luk4") return quantale::luk_chain(3);
    if (name.size() > 5 && name.substr(name.size() - 5) == ".json") {
        std::ifstream f(name);
        if (!f) throw error("cannot open quantale file " + name);
        json j = json::parse(f);
        return quantale::from_json(j);
    }
    throw error("unknown quantale '" + name + "'");
}

coalgebra load_coalgebra(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw error("cannot open " + path);
    json j = json::parse(f);
    return coalgebra_from_json(j);
}

void emit(const run_config& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        if (text.empty() || text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) throw error("cannot write " + cfg.out_path);
        f << text;
        if (text.empty() || text.back() != '\n') f << "\n";
    }
}

void emit_json(const run_config& cfg, const json& j) { emit(cfg, j.dump(2)); }

engine_options engine_opts(const run_config& cfg) {
    engine_options o;
    o.be = backend_parse(cfg.backend_name);
    o.eps = rat::parse(cfg.eps);
    if (o.eps <= rat(0)) throw error("eps must be positive");
    if (!cfg.grid.empty()) o.grid = rat::parse(cfg.grid);
    return o;
}

ld_options ld_opts(const run_config& cfg) {
    ld_options o;
    o.depth = cfg.depth;
    o.width = cfg.width;
    if (!cfg.grid.empty()) o.grid = rat::parse(cfg.grid);
    return o;
}

int cmd_validate(const run_config& cfg) {
    coalgebra c = load_coalgebra(cfg.in_path);
    auto rep = validate_coalgebra(c);
    json j;
    j["command"] = "validate";
    j["functor"] = fkind_name(c.kind);
    j["states"] = c.base.states;
    j["base"] = validate_vcat(c.base).to_json();
    j["coalgebra"] = rep.to_json();
    j["quantale_laws"] = c.base.q.validate(rat(1, 16)).to_json();
    emit_json(cfg, j);
    return rep.ok() ? 0 : 1;
}

int cmd_bd(const run_config& cfg) {
    coalgebra c = load_coalgebra(cfg.in_path);
    auto rep = validate_coalgebra(c);
    if (!rep.ok()) throw error("coalgebra does not validate: " + rep.to_json().dump());
    auto lam = default_liftings(c);
    auto dm = bd_fixpoint(c, lam, engine_opts(cfg));
    if (cfg.format == "csv") {
        emit(cfg, dm.to_csv());
    } else {
        json j = dm.to_json();
        j["command"] = "bd";
        emit_json(cfg, j);
    }
    return 0;
}

int cmd_ld(const run_config& cfg) {
    coalgebra c = load_coalgebra(cfg.in_path);
    auto lam = default_liftings(c);
    auto res = logical_distance(c, lam, ld_opts(cfg));
    if (cfg.format == "csv") {
        emit(cfg, res.dm.to_csv());
        return 0;
    }
    json j = res.dm.to_json();
    j["command"] = "ld";
    j["saturated"] = res.saturated;
    j["width_capped"] = res.width_capped;
    j["basis_size"] = res.basis.size();
    const std::size_t cap = 500;
    json basis = json::array();
    for (std::size_t i = 0; i < res.basis.size() && i < cap; ++i)
        basis.push_back(formula_str(res.basis[i].first, c.base.q, c.labels));
    j["basis"] = basis;
    j["basis_elided"] = res.basis.size() > cap;
    emit_json(cfg, j);
    return 0;
}

int cmd_distinguish(const run_config& cfg, const std::string& x, const std::string& y,
                    std::size_t budget) {
    coalgebra c = load_coalgebra(cfg.in_path);
    auto lam = default_liftings(c);
    rat grid = cfg.grid.empty() ? rat(1, 8) : rat::parse(cfg.grid);
    auto res = distinguishing_formula(c, lam, c.base.state_index(x), c.base.state_index(y), budget,
                                      grid);
    json j;
    j["command"] = "distinguish";
    j["x"] = x;
    j["y"] = y;
    j["formula"] = formula_str(res.phi, c.base.q, c.labels);
    j["gap"] = c.base.q.value_to_json(res.gap);
    j["evaluated"] = res.evaluated;
    emit_json(cfg, j);
    return 0;
}

int cmd_gen(const run_config& cfg, const std::string& functor, std::size_t states,
            std::size_t labels) {
    coalgebra c = gen_coalgebra(fkind_parse(functor), states, labels, cfg.seed);
    emit_json(cfg, coalgebra_to_json(c));
    return 0;
}

int cmd_check_adequacy(const run_config& cfg) {
    coalgebra c = load_coalgebra(cfg.in_path);
    auto lam = default_liftings(c);
    auto rep = check_adequacy(c, lam, cfg.depth, engine_opts(cfg), ld_opts(cfg));
    json j;
    j["command"] = "check adequacy";
    j["depth"] = cfg.depth;
    j["report"] = rep.to_json();
    emit_json(cfg, j);
    return rep.pass ? 0 : 1;
}

int cmd_check_expressivity(const run_config& cfg) {
    coalgebra c = load_coalgebra(cfg.in_path);
    auto lam = default_liftings(c);
    std::vector<std::size_t> schedule;
    for (std::size_t d = 0; d <= cfg.depth; ++d) schedule.push_back(d);
    auto rep = check_expressivity(c, lam, schedule, engine_opts(cfg), ld_opts(cfg));
    json j;
    j["command"] = "check expressivity";
    j["report"] = rep.to_json();
    emit_json(cfg, j);
    return rep.monotone ? 0 : 1;
}

int cmd_check_sw(const run_config& cfg, const std::string& op_name, std::size_t size_bound,
                 std::size_t trials) {
    quantale q = quantale_by_name(cfg.quantale_name);
    closure_op op = closure_op_parse(op_name);
    sw_report rep = cfg.has_replay
                        ? check_characterizes_initiality(op, q, size_bound, 1, cfg.replay)
                        : check_characterizes_initiality(op, q, size_bound, trials, cfg.seed);
    json j;
    j["command"] = "check sw";
    j["quantale"] = cfg.quantale_name;
    j["op"] = op_name;
    j["report"] = rep.to_json();
    emit_json(cfg, j);
    return rep.pass() ? 0 : 1;
}

int cmd_check_laws(const run_config& cfg) {
    quantale q = quantale_by_name(cfg.quantale_name);
    rat grid = cfg.grid.empty() ? rat(1, 16) : rat::parse(cfg.grid);
    auto rep = q.validate(grid);
    json j;
    j["command"] = "check laws";
    j["quantale"] = cfg.quantale_name;
    j["laws"] = rep.to_json();
    if (q.finite() && q.size() <= 12) {
        auto kd = q.check_k_decomp();
        json k;
        k["holds"] = kd.holds;
        json w = json::array();
        for (const auto& u : kd.witnesses) w.push_back(q.value_to_json(u));
        k["witnesses"] = w;
        j["k_decomposition"] = k;
    }
    emit_json(cfg, j);
    return rep.all_pass() ? 0 : 1;
}

int cmd_check_invariance(const run_config& cfg) {
    coalgebra c = load_coalgebra(cfg.in_path);
    if (c.kind != fkind::lts || c.base.q.kind() != qkind::bool2)
        throw error("check invariance: bool2 lts input required");
    auto qt = quotient_by_bisimilarity(c);
    auto lam = default_liftings(c);
    ld_options lopt = ld_opts(cfg);
    lopt.depth = std::min<std::size_t>(cfg.depth, 3);
    auto rep = check_morphism_invariance(c, qt.q, qt.map, lam, engine_opts(cfg), lopt);
    json j;
    j["command"] = "check invariance";
    j["classes"] = qt.q.base.states.size();
    j["report"] = rep.to_json();
    emit_json(cfg, j);
    return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantale-valued behavioural distances and quantitative modal logic"};
    app.require_subcommand(1);
    run_config cfg;

    app.add_option("--quantale", cfg.quantale_name, "quantale name or descriptor file");
    app.add_option("--backend", cfg.backend_name, "lp|enum")->check(CLI::IsMember({"lp", "enum"}));
    app.add_option("--grid", cfg.grid, "rational grid step, e.g. 1/16");
    app.add_option("--eps", cfg.eps, "fixpoint residual target");
    app.add_option("--depth", cfg.depth, "modal depth");
    app.add_option("--width", cfg.width, "basis width cap (0 = auto)");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--format", cfg.format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", cfg.out_path, "output path (default stdout)");
    auto* replay_opt = app.add_option("--replay", cfg.replay, "replay a single harness trial seed");

    auto* validate = app.add_subcommand("validate", "validate a coalgebra file");
    validate->add_option("--in", cfg.in_path, "coalgebra JSON")->required();

    auto* bd = app.add_subcommand("bd", "behavioural distance fixpoint");
    bd->add_option("--in", cfg.in_path, "coalgebra JSON")->required();

    auto* ld = app.add_subcommand("ld", "logical distance with formula basis");
    ld->add_option("--in", cfg.in_path, "coalgebra JSON")->required();

    std::string dx, dy;
    std::size_t budget = 4096;
    auto* distinguish = app.add_subcommand("distinguish", "search a separating formula");
    distinguish->add_option("--in", cfg.in_path, "coalgebra JSON")->required();
    distinguish->add_option("--x", dx, "first state")->required();
    distinguish->add_option("--y", dy, "second state")->required();
    distinguish->add_option("--budget", budget, "formula evaluation budget");

    std::string gen_functor = "lts";
    std::size_t gen_states = 4, gen_labels = 2;
    auto* gen = app.add_subcommand("gen", "generate a seeded random coalgebra");
    gen->add_option("--functor", gen_functor,
                    "lts|metric_ts|para_powerset|dist_maybe|signed_weighted");
    gen->add_option("--states", gen_states, "state count");
    gen->add_option("--labels", gen_labels, "label count");

    auto* check = app.add_subcommand("check", "run a theorem harness");
    check->require_subcommand(1);
    auto* adequacy = check->add_subcommand("adequacy");
    adequacy->add_option("--in", cfg.in_path)->required();
    auto* expressivity = check->add_subcommand("expressivity");
    expressivity->add_option("--in", cfg.in_path)->required();
    std::string sw_op = "id";
    std::size_t sw_size = 3, sw_trials = 50;
    auto* sw = check->add_subcommand("sw", "Stone-Weierstrass / characterizes-initiality");
    sw->add_option("--op", sw_op, "id|l|cinfsup|inf|fun");
    sw->add_option("--size", sw_size, "carrier size bound");
    sw->add_option("--trials", sw_trials, "trial count");
    check->add_subcommand("laws", "quantale law suite");
    auto* invariance = check->add_subcommand("invariance");
    invariance->add_option("--in", cfg.in_path)->required();

    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands({})) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
        cfg.has_replay = replay_opt->count() > 0;
        if (*validate) return cmd_validate(cfg);
        if (*bd) return cmd_bd(cfg);
        if (*ld) return cmd_ld(cfg);
        if (*distinguish) return cmd_distinguish(cfg, dx, dy, budget);
        if (*gen) return cmd_gen(cfg, gen_functor, gen_states, gen_labels);
        if (*check) {
            if (*adequacy) return cmd_check_adequacy(cfg);
            if (*expressivity) return cmd_check_expressivity(cfg);
            if (*sw) return cmd_check_sw(cfg, sw_op, sw_size, sw_trials);
            if (*invariance) return cmd_check_invariance(cfg);
            return cmd_check_laws(cfg);
        }
        throw error("no command");
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    } catch (const std::exception& e) {
        json err;
        err["error"] = e.what();
        std::cerr << err.dump() << "\n";
        return 2;
    }
}
