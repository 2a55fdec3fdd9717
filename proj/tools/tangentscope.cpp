// tangentscope: computing approximate-identity kernels, region functionals,
// maximal operators, divergence constructions and dyadic differentiation
// bases from the command line. All outputs are CSV/JSON; identical configs
// reproduce identical bytes.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <random>
#include <sstream>
#include <fstream>
#include <iostream>

#include "tangentscope/approach_curve.hpp"
#include "tangentscope/counterexamples.hpp"
#include "tangentscope/csv_io.hpp"
#include "tangentscope/diagnostics.hpp"
#include "tangentscope/dyadic.hpp"
#include "tangentscope/kernels.hpp"
#include "tangentscope/operators.hpp"
#include "tangentscope/regions.hpp"

namespace ts = tangentscope;
using nlohmann::json;

namespace {

struct RunConfig {
    std::string subcommand;
    std::string functional = "plain";
    std::string kernel = "poisson";
    std::string curve = "nontangential:c=1";
    std::string f_spec = "preset:step";
    std::string counterexample_kind;
    std::string dyadic_kind;
    int grid = 1 << 12;
    int depth = 3;
    int rmax_exponent = 20;
    int delta_exponent = 10;
    int samples = 256;
    int l_param = 2;
    double p = 2.0;
    double shift_c = 1.0;
    unsigned long long seed = 2025;
    std::string delta_list = "2,4,6,8,10,12,14,16,18,20";
    std::string out_dir = "out";

    json to_json() const {
        return json{{"subcommand", subcommand},
                    {"functional", functional},
                    {"kernel", kernel},
                    {"curve", curve},
                    {"f", f_spec},
                    {"counterexample", counterexample_kind},
                    {"dyadic", dyadic_kind},
                    {"grid", grid},
                    {"depth", depth},
                    {"rmax_exponent", rmax_exponent},
                    {"delta_exponent", delta_exponent},
                    {"samples", samples},
                    {"L", l_param},
                    {"p", p},
                    {"shift_c", shift_c},
                    {"seed", seed},
                    {"delta_list", delta_list},
                    {"out", out_dir}};
    }
    void from_json(const json& j) {
        subcommand = j.value("subcommand", subcommand);
        functional = j.value("functional", functional);
        kernel = j.value("kernel", kernel);
        curve = j.value("curve", curve);
        f_spec = j.value("f", f_spec);
        counterexample_kind = j.value("counterexample", counterexample_kind);
        dyadic_kind = j.value("dyadic", dyadic_kind);
        grid = j.value("grid", grid);
        depth = j.value("depth", depth);
        rmax_exponent = j.value("rmax_exponent", rmax_exponent);
        delta_exponent = j.value("delta_exponent", delta_exponent);
        samples = j.value("samples", samples);
        l_param = j.value("L", l_param);
        p = j.value("p", p);
        shift_c = j.value("shift_c", shift_c);
        seed = j.value("seed", seed);
        delta_list = j.value("delta_list", delta_list);
        out_dir = j.value("out", out_dir);
    }
};

void write_text(const std::filesystem::path& p, const std::string& content) {
    std::ofstream out(p);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
}

void save_run(const RunConfig& cfg) {
    std::filesystem::create_directories(cfg.out_dir);
    write_text(std::filesystem::path(cfg.out_dir) / "run.json", cfg.to_json().dump(2) + "\n");
}

ts::GridFunction load_f(const RunConfig& cfg) {
    if (cfg.f_spec.rfind("preset:", 0) == 0)
        return ts::preset_function(cfg.f_spec.substr(7), cfg.grid);
    return ts::csv::read_grid(cfg.f_spec);
}

int run_pi(const RunConfig& cfg) {
    save_run(cfg);
    ts::Kernel kernel = ts::kernel_by_name(cfg.kernel);
    ts::ApproachCurve curve = ts::ApproachCurve::parse(cfg.curve);
    auto rs = ts::default_r_sequence(cfg.rmax_exponent);
    auto deltas = ts::default_delta_sequence(cfg.delta_exponent);
    std::ostringstream table;
    table << "delta,r,value\n";
    json summary;
    auto emit_estimate = [&](const ts::LimsupEstimate& e) {
        for (std::size_t i = 0; i < e.samples.size(); ++i)
            table << "," << ts::csv::format_double(1.0 - e.r_eps[i]) << ","
                  << ts::csv::format_double(e.samples[i]) << "\n";
        summary = {{"tail_max", e.tail_max},
                   {"tail_min", e.tail_min},
                   {"trend", ts::trend_name(e.trend)}};
    };
    if (cfg.functional == "plain") {
        emit_estimate(ts::pi_plain(kernel, curve, rs, cfg.grid));
    } else if (cfg.functional == "p") {
        emit_estimate(ts::pi_p(kernel, curve, cfg.p, rs, cfg.grid, ts::PiMode::limsup));
    } else if (cfg.functional == "tilde-p") {
        emit_estimate(ts::pi_p(kernel, curve, cfg.p, rs, cfg.grid, ts::PiMode::sup));
    } else if (cfg.functional == "carlsson") {
        emit_estimate(ts::carlsson_bound(kernel, curve, cfg.p, rs, cfg.grid));
    } else if (cfg.functional == "infty" || cfg.functional == "star") {
        ts::PiMatrix m = cfg.functional == "infty" ? ts::pi_infty(kernel, curve, deltas, rs)
                                                   : ts::pi_star(kernel, curve, deltas, rs);
        for (std::size_t j = 0; j < m.deltas.size(); ++j)
            for (std::size_t i = 0; i < m.r_eps.size(); ++i)
                table << ts::csv::format_double(m.deltas[j]) << ","
                      << ts::csv::format_double(1.0 - m.r_eps[i]) << ","
                      << ts::csv::format_double(m.cells[j][i]) << "\n";
        summary = {{"estimate", m.estimate}, {"per_delta", m.per_delta}};
    } else {
        std::cerr << "unknown functional: " << cfg.functional << "\n";
        return 1;
    }
    summary["kernel"] = cfg.kernel;
    summary["curve"] = cfg.curve;
    summary["grid"] = cfg.grid;
    summary["rmax_exponent"] = cfg.rmax_exponent;
    write_text(std::filesystem::path(cfg.out_dir) / "table.csv", table.str());
    write_text(std::filesystem::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_converge(const RunConfig& cfg) {
    save_run(cfg);
    ts::Kernel kernel = ts::kernel_by_name(cfg.kernel);
    ts::ApproachCurve curve = ts::ApproachCurve::parse(cfg.curve);
    ts::GridFunction f = load_f(cfg);
    ts::Diagnostics diag;
    auto rs = ts::default_r_sequence(std::min(cfg.rmax_exponent, 14));
    ts::RadialParam r = rs.back();
    ts::GridFunction conv = ts::convolve(kernel, r, f, &diag);
    ts::csv::write_grid(std::filesystem::path(cfg.out_dir) / "converge.csv", conv);
    // sup over the lambda-window of |Phi_r(x+theta) - f(x)| per grid point
    double lam = curve.lambda(r);
    double worst = 0.0;
    for (int i = 0; i < f.size(); i += std::max(1, f.size() / 256)) {
        double x = f.theta(i);
        for (int t = -8; t <= 8; ++t) {
            double y = x + lam * t / 8.0;
            worst = std::max(worst,
                             std::fabs(ts::convolve_point(kernel, r, f, y) - f.value_at(x)));
        }
    }
    json summary{{"r", r.r()},
                 {"lambda", lam},
                 {"sup_window_error", worst},
                 {"warnings", diag}};
    write_text(std::filesystem::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_maximal(const RunConfig& cfg) {
    save_run(cfg);
    ts::Kernel kernel = ts::kernel_by_name(cfg.kernel);
    ts::ApproachCurve curve = ts::ApproachCurve::parse(cfg.curve);
    ts::GridFunction f = load_f(cfg);
    ts::Diagnostics diag;
    auto rs = ts::default_r_sequence(std::min(cfg.rmax_exponent, 14));
    ts::MaximalReport rep = ts::lambda_maximal(kernel, curve, f, rs, &diag);
    std::vector<double> t_grid{0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0};
    double c = ts::weak_type_check(rep, f, cfg.p, t_grid);
    double ratio = ts::pointwise_domination_check(kernel, curve, f, cfg.p, rs, &diag);
    ts::csv::write_grid(std::filesystem::path(cfg.out_dir) / "maximal.csv", rep.values);
    json levels = json::object();
    for (auto& [t, m] : rep.level_set_measures) levels[ts::csv::format_double(t)] = m;
    json summary{{"best_constant", c},
                 {"witness_t", rep.witness_t},
                 {"max_ratio", ratio},
                 {"level_set_measures", levels},
                 {"warnings", diag}};
    write_text(std::filesystem::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
    return 0;
}

int run_osc(const RunConfig& cfg) {
    save_run(cfg);
    ts::Kernel kernel = ts::kernel_by_name(cfg.kernel);
    ts::ApproachCurve curve = ts::ApproachCurve::parse(cfg.curve);
    auto xs = ts::sample_points(cfg.samples, cfg.seed);
    std::vector<ts::RadialParam> window;
    for (int k = 8; k <= std::min(cfg.rmax_exponent, 14); ++k)
        window.push_back(ts::RadialParam::from_eps(std::ldexp(1.0, -k)));
    std::vector<double> osc;
    if (cfg.f_spec.rfind("arcs:", 0) == 0) {
        ts::ArcSet arcs = ts::csv::read_arcs(cfg.f_spec.substr(5));
        osc = ts::curve_oscillation(kernel, curve, arcs, xs, window);
    } else {
        osc = ts::curve_oscillation(kernel, curve, load_f(cfg), xs, window);
    }
    std::ostringstream tab;
    tab << "x,oscillation\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        tab << ts::csv::format_double(xs[i]) << "," << ts::csv::format_double(osc[i]) << "\n";
    write_text(std::filesystem::path(cfg.out_dir) / "oscillation.csv", tab.str());
    std::vector<double> sorted = osc;
    std::sort(sorted.begin(), sorted.end());
    auto quantile = [&](double q) {
        return sorted.empty() ? 0.0
                              : sorted[static_cast<std::size_t>(q * (sorted.size() - 1))];
    };
    json summary{{"q10", quantile(0.10)}, {"q50", quantile(0.50)}, {"q90", quantile(0.90)}};
    write_text(std::filesystem::path(cfg.out_dir) / "summary.json", summary.dump(2) + "\n");
    return 0;
}

json witness_json(const std::vector<std::vector<ts::WitnessPoint>>& ws) {
    json out = json::array();
    for (const auto& stage : ws) {
        json st = json::array();
        for (const auto& w : stage)
            st.push_back({{"x", w.x}, {"j0", w.j0}, {"eps_r1", w.eps_r1}, {"eps_r2", w.eps_r2}});
        out.push_back(st);
    }
    return out;
}

int run_counterexample(const RunConfig& cfg) {
    save_run(cfg);
    ts::Kernel kernel = ts::kernel_by_name(cfg.kernel);
    ts::ApproachCurve curve = ts::ApproachCurve::parse(cfg.curve);
    auto dir = std::filesystem::path(cfg.out_dir);
    json stages_json = json::array();
    if (cfg.counterexample_kind == "littlewood") {
        ts::LittlewoodBuild b =
            ts::littlewood_set(kernel, curve, cfg.depth, cfg.samples, cfg.seed);
        ts::csv::write_arcs(dir / "E.csv", b.set);
        for (const auto& st : b.stages)
            stages_json.push_back({{"delta_k", st.delta_k},
                                   {"eps_u", st.eps_u},
                                   {"eps_v", st.eps_v},
                                   {"n_k", st.n_k},
                                   {"mass", st.mass}});
        auto osc = ts::littlewood_oscillation(kernel, curve, b);
        json summary{{"pi_star_estimate", b.pi_star_estimate},
                     {"stages", stages_json},
                     {"witnesses", witness_json(b.witnesses)},
                     {"oscillation", osc}};
        write_text(dir / "stages.json", summary.dump(2) + "\n");
    } else if (cfg.counterexample_kind == "alternating") {
        ts::AlternatingBuild b = ts::alternating_set(kernel, curve, cfg.depth);
        ts::csv::write_arcs(dir / "E.csv", b.set);
        for (const auto& st : b.stages)
            stages_json.push_back({{"delta_k", st.delta_k},
                                   {"eps_k", st.eps_k},
                                   {"n_k", st.n_k},
                                   {"mass", st.mass},
                                   {"sup_norm", st.sup_norm}});
        json summary{{"pi_infty_estimate", b.pi_infty_estimate}, {"stages", stages_json}};
        write_text(dir / "stages.json", summary.dump(2) + "\n");
    } else if (cfg.counterexample_kind == "l1div") {
        ts::L1DivergentBuild b = ts::l1_divergent_function(kernel, curve, cfg.depth, cfg.grid);
        ts::csv::write_step(dir / "f.csv", b.f);
        for (const auto& st : b.stages)
            stages_json.push_back({{"eps_k", st.eps_k},
                                   {"delta_r", st.delta_r},
                                   {"n_k", st.n_k},
                                   {"x_r", st.x_r},
                                   {"delta_measure", st.delta_measure},
                                   {"witness_bound", st.witness_bound}});
        json summary{{"l1_norm", b.l1_norm}, {"stages", stages_json}};
        write_text(dir / "stages.json", summary.dump(2) + "\n");
    } else if (cfg.counterexample_kind == "blaschke") {
        ts::BlaschkeBuild b =
            ts::blaschke_product(kernel, curve, cfg.depth, cfg.grid, cfg.samples, cfg.seed);
        ts::ComplexGridFunction bound = ts::ComplexGridFunction::sample(
            cfg.grid, [&](double x) { return b.eval(x); });
        ts::csv::write_complex_grid(dir / "B.csv", bound);
        for (const auto& st : b.stages)
            stages_json.push_back({{"delta_k", st.delta_k},
                                   {"eps_u", st.eps_u},
                                   {"eps_v", st.eps_v},
                                   {"n_k", st.n_k},
                                   {"mass", st.mass},
                                   {"omega_measured", st.omega_measured},
                                   {"on_comb_max", st.on_comb_max},
                                   {"off_comb_max", st.off_comb_max}});
        json summary{{"pi_star_estimate", b.pi_star_estimate},
                     {"stages", stages_json},
                     {"witnesses", witness_json(b.witnesses)}};
        write_text(dir / "stages.json", summary.dump(2) + "\n");
    } else {
        std::cerr << "unknown counterexample: " << cfg.counterexample_kind << "\n";
        return 1;
    }
    return 0;
}

std::string rat_str(const ts::dyadic::Rat& r) {
    return numerator(r).str() + "/" + denominator(r).str();
}

int run_dyadic(const RunConfig& cfg) {
    save_run(cfg);
    auto dir = std::filesystem::path(cfg.out_dir);
    ts::dyadic::RareSequence delta;
    {
        std::stringstream ss(cfg.delta_list);
        std::string item;
        while (std::getline(ss, item, ','))
            if (!item.empty()) delta.nu.push_back(std::stoi(item));
        std::sort(delta.nu.begin(), delta.nu.end());
    }
    if (cfg.dyadic_kind == "l4") {
        ts::dyadic::L4Function f(cfg.l_param, ts::dyadic::DyadicSquare{0, 0, 0});
        std::ostringstream blocks;
        blocks << "level,count_per_parent,side_exponent\n";
        long long per_parent = (1LL << (2 * f.n())) -
                               (static_cast<long long>(f.n() + 1) << f.n());
        for (int k = 1; k <= f.m() + 1; ++k)
            blocks << k << "," << (k == 1 ? 1 : per_parent) << "," << (f.n() * (k - 1))
                   << "\n";
        write_text(dir / "f.csv", blocks.str());
        json witnesses = json::array();
        std::mt19937_64 rng(cfg.seed);
        for (int i = 0; i < cfg.samples; ++i) {
            ts::dyadic::DyadicPoint p;
            p.s = 40;
            p.xn = ts::dyadic::BigInt(static_cast<long long>(rng() & ((1ULL << 40) - 1)));
            p.yn = ts::dyadic::BigInt(static_cast<long long>(rng() & ((1ULL << 40) - 1)));
            auto w = f.witness(p);
            witnesses.push_back({{"x", rat_str(p.x())},
                                 {"y", rat_str(p.y())},
                                 {"average", rat_str(w.average)}});
        }
        json summary{{"L", f.L()},
                     {"n", f.n()},
                     {"m", f.m()},
                     {"alpha", f.alpha()},
                     {"beta", rat_str(f.beta())},
                     {"support_measure", rat_str(f.support_measure())},
                     {"l1_norm", rat_str(f.l1_norm())},
                     {"witnesses", witnesses}};
        write_text(dir / "witnesses.json", summary.dump(2) + "\n");
        return 0;
    }
    if (cfg.dyadic_kind == "saks") {
        ts::dyadic::SaksFunction f = ts::dyadic::saks_function(delta, cfg.depth);
        json stages = json::array();
        for (const auto& st : f.stages())
            stages.push_back({{"p_index", st.p_index}, {"l", st.l}, {"L", st.L}});
        json summary{{"stages", stages}, {"l1_norm", rat_str(f.l1_norm())}};
        write_text(dir / "saks.json", summary.dump(2) + "\n");
        return 0;
    }
    if (cfg.dyadic_kind == "cover") {
        ts::dyadic::DyadicRect r{1, 1, 3, 5};
        auto cover = ts::dyadic::tx2_cover(r, delta);
        json summary{{"refined", {{"i", cover.refined.i},
                                  {"j", cover.refined.j},
                                  {"m1", cover.refined.m1},
                                  {"m2", cover.refined.m2}}},
                     {"ratio", rat_str(cover.ratio)},
                     {"gamma", cover.gamma}};
        write_text(dir / "cover.json", summary.dump(2) + "\n");
        return 0;
    }
    if (cfg.dyadic_kind == "quasi") {
        ts::dyadic::DyadicRect r{1, 1, 3, 5};
        ts::dyadic::RectBasisSpec b1{ts::dyadic::RectBasisSpec::Kind::rare, delta};
        auto cover = ts::dyadic::quasi_cover_check(r, b1, ts::dyadic::Rat(4), 40);
        std::string why;
        bool valid = cover.found && ts::dyadic::validate_quasi_cover(r, cover, ts::dyadic::Rat(4), &why);
        json summary{{"found", cover.found},
                     {"valid", valid},
                     {"parts", cover.parts.size()},
                     {"reason", cover.found ? why : cover.failure_reason}};
        write_text(dir / "quasi.json", summary.dump(2) + "\n");
        return cover.found ? 0 : 2;
    }
    std::cerr << "unknown dyadic op: " << cfg.dyadic_kind << "\n";
    return 1;
}

int run_shift(const RunConfig& cfg) {
    save_run(cfg);
    ts::GridFunction f = load_f(cfg);
    std::vector<long long> ns;
    for (long long n = 16; n <= (1LL << std::min(cfg.rmax_exponent, 13)); n *= 2)
        ns.push_back(n);
    auto errors = ts::fejer_shift_check(f, ts::pi / 2, ns, cfg.shift_c);
    std::ostringstream tab;
    tab << "n,error\n";
    for (std::size_t i = 0; i < ns.size(); ++i)
        tab << ns[i] << "," << ts::csv::format_double(errors[i]) << "\n";
    write_text(std::filesystem::path(cfg.out_dir) / "shift.csv", tab.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"harmonic-analysis region functionals, maximal operators and "
                 "counterexample constructions"};
    app.require_subcommand(0, 1);
    RunConfig cfg;
    std::string config_path;
    app.add_option("--config", config_path, "replay a run.json");

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--kernel", cfg.kernel);
        sub->add_option("--curve", cfg.curve);
        sub->add_option("--grid", cfg.grid);
        sub->add_option("--depth", cfg.depth);
        sub->add_option("--rmax-exponent", cfg.rmax_exponent);
        sub->add_option("--samples", cfg.samples);
        sub->add_option("--seed", cfg.seed);
        sub->add_option("--p", cfg.p);
        sub->add_option("--out", cfg.out_dir);
        sub->add_option("--f", cfg.f_spec);
    };

    CLI::App* pi = app.add_subcommand("pi", "region functional tables");
    pi->add_option("--functional", cfg.functional);
    pi->add_option("--delta-exponent", cfg.delta_exponent);
    add_common(pi);

    CLI::App* converge = app.add_subcommand("converge", "boundary convergence runs");
    add_common(converge);

    CLI::App* maximal = app.add_subcommand("maximal", "lambda-maximal operator reports");
    add_common(maximal);

    CLI::App* osc = app.add_subcommand("osc", "oscillation along the curve");
    add_common(osc);

    CLI::App* shift = app.add_subcommand("shift", "Fejer mean shifted convergence");
    shift->add_option("--c", cfg.shift_c);
    add_common(shift);

    CLI::App* cex = app.add_subcommand("counterexample", "divergence constructions");
    cex->add_option("kind", cfg.counterexample_kind)->required();
    add_common(cex);

    CLI::App* dy = app.add_subcommand("dyadic", "exact dyadic machinery");
    dy->add_option("kind", cfg.dyadic_kind)->required();
    dy->add_option("--L", cfg.l_param);
    dy->add_option("--delta-list", cfg.delta_list);
    add_common(dy);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) {
                std::cerr << "cannot open " << config_path << "\n";
                return 1;
            }
            json j;
            in >> j;
            cfg.from_json(j);
        } else if (pi->parsed()) {
            cfg.subcommand = "pi";
        } else if (converge->parsed()) {
            cfg.subcommand = "converge";
        } else if (maximal->parsed()) {
            cfg.subcommand = "maximal";
        } else if (osc->parsed()) {
            cfg.subcommand = "osc";
        } else if (shift->parsed()) {
            cfg.subcommand = "shift";
        } else if (cex->parsed()) {
            cfg.subcommand = "counterexample";
        } else if (dy->parsed()) {
            cfg.subcommand = "dyadic";
        } else {
            std::cout << app.help() << "\n";
            return 1;
        }

        if (cfg.subcommand == "pi") return run_pi(cfg);
        if (cfg.subcommand == "converge") return run_converge(cfg);
        if (cfg.subcommand == "maximal") return run_maximal(cfg);
        if (cfg.subcommand == "osc") return run_osc(cfg);
        if (cfg.subcommand == "shift") return run_shift(cfg);
        if (cfg.subcommand == "counterexample") return run_counterexample(cfg);
        if (cfg.subcommand == "dyadic") return run_dyadic(cfg);
        std::cerr << "unknown subcommand in config: " << cfg.subcommand << "\n";
        return 1;
    } catch (const ts::construction_refused& e) {
        nlohmann::json diag{{"condition", e.condition},
                            {"estimate", e.estimate},
                            {"threshold", e.threshold},
                            {"detail", e.what()}};
        std::cerr << diag.dump(2) << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
