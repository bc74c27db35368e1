#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hawkes/concentration.hpp"
#include "hawkes/config.hpp"
#include "hawkes/errors.hpp"
#include "hawkes/estimators.hpp"
#include "hawkes/queue.hpp"
#include "hawkes/regen.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simulate.hpp"
#include "hawkes/transfer.hpp"
#include "hawkes/validate.hpp"

namespace {

using namespace hawkes;
using nlohmann::json;

template <class Fn>
void with_output(const std::string& path, Fn&& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    fn(out);
}

std::vector<double> read_lengths(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open service sample file: " + path);
    std::vector<double> lens;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            lens.push_back(std::stod(line));
        } catch (const std::exception&) {
            if (lens.empty()) continue;  // a single header line is fine
            throw ConfigError("malformed service sample line: " + line);
        }
    }
    if (lens.empty()) throw ConfigError("service sample file has no numbers: " + path);
    return lens;
}

// Shared flag state; only the subcommand actually chosen reads its fields.
struct Flags {
    double lambda = 0, A = 0, T = 0;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    std::string config_path, out, kernel = "zero", kernel_file;
    double kernel_a = 0, kernel_b = 0;
    std::vector<double> init;

    double svc_theta = 0;
    bool svc_degenerate = false;
    std::string svc_csv;

    std::vector<double> s_grid;
    bool busy = false;

    double alpha = 0, lo = 0, hi = 1, eta = 0, epsilon = 0, mean_tau_in = 0, exp_moment_in = 0;

    std::string functional = "count";
    double value = 0;
    double clamp_lo = 0, clamp_hi = 0;

    std::vector<double> thetas, xs;
    std::string cycles_csv;
    std::size_t clt_paths = 0, ident_paths = 0;
    double clt_T = 0, ident_T = 0, ergodic_T = 0;
};

ServiceCdf make_service(const Flags& fl, const CLI::App& sub, double A) {
    const int picked = (sub.count("--theta") > 0) + (fl.svc_degenerate ? 1 : 0) +
                       (sub.count("--service-csv") > 0);
    if (picked > 1) {
        throw ConfigError("choose one of --theta, --degenerate, --service-csv");
    }
    if (sub.count("--theta") > 0) return ServiceCdf::exp_dom(fl.svc_theta, A);
    if (sub.count("--service-csv") > 0) return ServiceCdf::empirical(read_lengths(fl.svc_csv), A);
    return ServiceCdf::degenerate(A);
}

WindowFunctional make_functional(const Flags& fl, const CLI::App& sub) {
    WindowFunctional f = WindowFunctional::count();
    if (fl.functional == "count") {
        // default
    } else if (fl.functional == "constant") {
        f = WindowFunctional::constant(fl.value);
    } else if (fl.functional == "indicator") {
        if (fl.value < 0) throw ConfigError("--value must be a nonnegative count threshold");
        f = WindowFunctional::count_indicator(static_cast<std::size_t>(fl.value));
    } else {
        throw ConfigError("unknown functional '" + fl.functional +
                          "' (count, constant, indicator)");
    }
    const bool has_lo = sub.count("--clamp-lo") > 0, has_hi = sub.count("--clamp-hi") > 0;
    if (has_lo != has_hi) throw ConfigError("--clamp-lo and --clamp-hi come together");
    if (has_lo) f = WindowFunctional::clamped(f, fl.clamp_lo, fl.clamp_hi);
    return f;
}

int dispatch(const CLI::App& app, Flags& fl) {
    ExperimentConfig cfg;
    if (!fl.config_path.empty()) cfg = load_config(fl.config_path);
    if (app.count("--lambda") > 0) cfg.lambda = fl.lambda;
    if (app.count("--A") > 0) cfg.A = fl.A;
    if (app.count("--T") > 0) cfg.horizon = fl.T;
    if (app.count("--seed") > 0) cfg.seed = fl.seed;
    if (app.count("--reps") > 0) cfg.replications = fl.reps;
    if (app.count("--out") > 0) cfg.out = fl.out;
    if (app.count("--init") > 0) cfg.init_points = fl.init;
    if (app.count("--kernel") > 0 || app.count("--kernel-a") > 0 ||
        app.count("--kernel-file") > 0) {
        if (fl.kernel == "zero") {
            cfg.h = TransferFunction::zero();
        } else if (fl.kernel == "exponential") {
            cfg.h = TransferFunction::exponential(fl.kernel_a, fl.kernel_b);
        } else if (fl.kernel == "uniform_box") {
            cfg.h = TransferFunction::uniform_box(fl.kernel_a, fl.kernel_b);
        } else if (fl.kernel == "tabulated") {
            cfg.h = TransferFunction::tabulated_from_csv(fl.kernel_file);
        } else {
            throw ConfigError("unknown kernel '" + fl.kernel +
                              "' (zero, exponential, uniform_box, tabulated)");
        }
        if (!(cfg.h.l1_norm() < 1.0)) throw ConfigError("kernel is not sub-critical");
    }
    // Re-check invariants that flag overrides may have broken.
    cfg = parse_config(serialize_config(cfg));

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();

    if (name == "sim") {
        auto rng = make_stream(cfg.seed, 0);
        const auto path = simulate_path(cfg.lambda, cfg.h, cfg.init_points, cfg.horizon, rng);
        with_output(cfg.out, [&](std::ostream& o) { write_events_csv(path, o); });
        return 0;
    }

    if (name == "regen") {
        auto rng = make_stream(cfg.seed, 0);
        const auto path = simulate_path(cfg.lambda, cfg.h, cfg.init_points, cfg.horizon, rng);
        const auto rep = regeneration_times(path, cfg.A);
        with_output(cfg.out, [&](std::ostream& o) { write_regen_json(rep, o); });
        return 0;
    }

    if (name == "laplace") {
        const auto F = make_service(fl, *sub, cfg.A);
        if (fl.s_grid.empty()) fl.s_grid = {0.25, 0.5, 1.0, 2.0};
        with_output(cfg.out, [&](std::ostream& o) {
            o << "s," << (fl.busy ? "busy" : "tau") << '\n' << std::setprecision(15);
            for (double s : fl.s_grid) {
                const double v = fl.busy ? laplace_busy(F, cfg.lambda, s).value
                                         : laplace_tau(F, cfg.lambda, s).value;
                o << s << ',' << v << '\n';
            }
        });
        return 0;
    }

    if (name == "moments") {
        const auto F = make_service(fl, *sub, cfg.A);
        const double mean = mean_tau(cfg.lambda, F.mean_service() - F.window(), cfg.A);
        const double m2 = second_moment_tau(F, cfg.lambda);
        json j{{"lambda", cfg.lambda},
               {"A", cfg.A},
               {"mean", mean},
               {"second_moment", m2},
               {"variance", m2 - mean * mean}};
        if (F.kind() == ServiceKind::ExpDom) {
            j["delay_mean_bound"] = delay_bound(cfg.lambda, F.theta(), cfg.A);
            if (sub->count("--alpha") > 0) {
                j["exp_moment"] = exp_moment_tau(cfg.lambda, F.theta(), cfg.A, fl.alpha);
                j["alpha"] = fl.alpha;
            }
        } else if (sub->count("--alpha") > 0) {
            throw ConfigError("--alpha needs an exponential service law (--theta)");
        }
        with_output(cfg.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        return 0;
    }

    if (name == "bound") {
        const bool has_eta = sub->count("--eta") > 0, has_eps = sub->count("--epsilon") > 0;
        if (has_eta == has_eps) throw ConfigError("pass exactly one of --eta, --epsilon");
        ConcentrationInput in;
        if (sub->count("--theta") > 0) {
            in = bound_input(cfg.lambda, fl.svc_theta, cfg.A, fl.alpha, fl.lo, fl.hi,
                             cfg.horizon);
        } else if (sub->count("--mean-tau") > 0 && sub->count("--exp-moment") > 0) {
            in = exact_input(cfg.lambda, cfg.A, fl.alpha, fl.lo, fl.hi, cfg.horizon,
                             fl.mean_tau_in, fl.exp_moment_in);
        } else {
            throw ConfigError("pass --theta, or both --mean-tau and --exp-moment");
        }
        const auto t = bound_terms(in);
        json j{{"mode", in.mode == BoundMode::Bound ? "Bound" : "Exact"},
               {"lambda", in.lambda},
               {"A", in.A},
               {"alpha", in.alpha},
               {"a", in.a},
               {"b", in.b},
               {"T", in.T},
               {"mean_tau", in.mean_tau},
               {"exp_moment", in.exp_moment},
               {"v", t.v},
               {"c", t.c}};
        if (has_eta) {
            j["eta"] = fl.eta;
            j["epsilon_eta"] = epsilon_eta(in, fl.eta);
        } else {
            j["epsilon"] = fl.epsilon;
            j["bound"] = deviation_bound(in, fl.epsilon);
            j["raw_bound"] = deviation_bound_raw(in, fl.epsilon);
        }
        with_output(cfg.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        return 0;
    }

    if (name == "estimate") {
        const auto f = make_functional(fl, *sub);
        auto rng = make_stream(cfg.seed, 0);
        const auto path = simulate_path(cfg.lambda, cfg.h, cfg.init_points, cfg.horizon, rng);
        const double direct = sliding_average(path, f, cfg.A, cfg.horizon);
        const auto rep = regeneration_times(path, cfg.A);
        const auto dec = extract_cycles(path, rep);
        const auto est = estimate_pi_cycles(dec.cycles, f, cfg.A);
        json j{{"lambda", cfg.lambda},
               {"A", cfg.A},
               {"T", cfg.horizon},
               {"seed", cfg.seed},
               {"functional", fl.functional},
               {"direct", direct},
               {"cycle_estimate", est.estimate},
               {"cycle_se", est.std_error},
               {"n_cycles", est.n_cycles}};
        with_output(cfg.out, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
        return 0;
    }

    // validate
    ReportConfig rc;
    rc.lambda = cfg.lambda;
    rc.h = cfg.h;
    rc.A = cfg.A;
    rc.seed = cfg.seed;
    rc.n_cycles = cfg.replications;
    rc.n_clusters = cfg.replications;
    if (!fl.thetas.empty()) rc.theta_grid = fl.thetas;
    if (!fl.xs.empty()) rc.x_grid = fl.xs;
    if (!fl.s_grid.empty()) rc.s_grid = fl.s_grid;
    if (sub->count("--clt-paths") > 0) rc.clt_paths = fl.clt_paths;
    if (sub->count("--clt-T") > 0) rc.clt_T = fl.clt_T;
    if (sub->count("--ergodic-T") > 0) rc.ergodic_T = fl.ergodic_T;
    if (sub->count("--ident-paths") > 0) rc.ident_paths = fl.ident_paths;
    if (sub->count("--ident-T") > 0) rc.ident_T = fl.ident_T;
    const auto report = full_report(rc);
    with_output(cfg.out, [&](std::ostream& o) { write_report_json(report, o); });
    if (!fl.cycles_csv.empty()) {
        with_output(fl.cycles_csv, [&](std::ostream& o) {
            o << "cycle_length\n" << std::setprecision(17);
            for (double len : report.moments.cycle_lengths) o << len << '\n';
        });
    }
    return report.all_pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"linear self-exciting process toolkit: simulation, regeneration structure, "
                 "cycle transforms, stationary estimators, deviation bounds"};
    app.require_subcommand(1);
    Flags fl;

    app.add_option("--config", fl.config_path, "JSON config file");
    app.add_option("--lambda", fl.lambda, "immigration rate");
    app.add_option("--A", fl.A, "observation window length");
    app.add_option("--T", fl.T, "horizon");
    app.add_option("--seed", fl.seed, "master seed");
    app.add_option("--reps", fl.reps, "replication count");
    app.add_option("--out", fl.out, "output path (default stdout)");
    app.add_option("--init", fl.init, "initial points, all <= 0");
    app.add_option("--kernel", fl.kernel, "zero | exponential | uniform_box | tabulated");
    app.add_option("--kernel-a", fl.kernel_a, "kernel amplitude (alpha or c)");
    app.add_option("--kernel-b", fl.kernel_b, "kernel decay rate or box width");
    app.add_option("--kernel-file", fl.kernel_file, "CSV t,value for a tabulated kernel");

    auto* sim = app.add_subcommand("sim", "simulate one path, emit events CSV");
    auto* regen = app.add_subcommand("regen", "regeneration report JSON for one path");
    auto* lap = app.add_subcommand("laplace", "cycle-transform CSV over an s grid");
    auto* mom = app.add_subcommand("moments", "closed-form cycle moments JSON");
    auto* bnd = app.add_subcommand("bound", "deviation bound JSON");
    auto* est = app.add_subcommand("estimate", "stationary window-average estimate JSON");
    auto* val = app.add_subcommand("validate", "Monte Carlo validation report JSON");

    for (auto* sc : {lap, mom}) {
        sc->add_option("--theta", fl.svc_theta, "exponential service rate");
        sc->add_flag("--degenerate", fl.svc_degenerate, "window-only service (default)");
        sc->add_option("--service-csv", fl.svc_csv, "empirical service lengths, one per line");
    }
    lap->add_option("--s", fl.s_grid, "transform arguments");
    lap->add_flag("--busy", fl.busy, "busy-period transform instead of the cycle one");
    mom->add_option("--alpha", fl.alpha, "also report the exponential moment at this exponent");

    bnd->add_option("--alpha", fl.alpha, "moment exponent")->required();
    bnd->add_option("--a", fl.lo, "lower clamp of the functional")->required();
    bnd->add_option("--b", fl.hi, "upper clamp of the functional")->required();
    bnd->add_option("--theta", fl.svc_theta, "closed-form mode: dominating service rate");
    bnd->add_option("--mean-tau", fl.mean_tau_in, "Monte Carlo mode: measured mean cycle");
    bnd->add_option("--exp-moment", fl.exp_moment_in, "Monte Carlo mode: measured moment");
    bnd->add_option("--eta", fl.eta, "invert the bound at this probability");
    bnd->add_option("--epsilon", fl.epsilon, "evaluate the bound at this deviation");

    est->add_option("--functional", fl.functional, "count | constant | indicator");
    est->add_option("--value", fl.value, "constant value or indicator threshold");
    est->add_option("--clamp-lo", fl.clamp_lo, "clamp range lower edge");
    est->add_option("--clamp-hi", fl.clamp_hi, "clamp range upper edge");

    val->add_option("--theta", fl.thetas, "domination rates");
    val->add_option("--x", fl.xs, "tail levels");
    val->add_option("--s", fl.s_grid, "transform arguments");
    val->add_option("--cycles-csv", fl.cycles_csv, "dump raw cycle lengths here");
    val->add_option("--clt-paths", fl.clt_paths, "paths for the normality check");
    val->add_option("--clt-T", fl.clt_T, "horizon for the normality check");
    val->add_option("--ergodic-T", fl.ergodic_T, "horizon for the ergodic cross-check");
    val->add_option("--ident-paths", fl.ident_paths, "paths for the identity check");
    val->add_option("--ident-T", fl.ident_T, "horizon for the identity check");

    for (auto* sc : {sim, regen, lap, mom, bnd, est, val}) sc->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return dispatch(app, fl);
    } catch (const ConfigError& e) {
        std::cerr << "ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const NotSubcriticalError& e) {
        std::cerr << "NotSubcritical: " << e.what() << '\n';
        return 3;
    } catch (const ZeroKernelError& e) {
        std::cerr << "ZeroKernel: " << e.what() << '\n';
        return 3;
    } catch (const OutOfDomainError& e) {
        std::cerr << "OutOfDomain: " << e.what() << '\n';
        return 3;
    } catch (const PoleError& e) {
        std::cerr << "Pole: " << e.what() << '\n';
        return 3;
    } catch (const AlphaOutOfRangeError& e) {
        std::cerr << "AlphaOutOfRange: " << e.what() << '\n';
        return 3;
    } catch (const DegenerateDenominatorError& e) {
        std::cerr << "DegenerateDenominator: " << e.what() << '\n';
        return 3;
    } catch (const InsufficientCyclesError& e) {
        std::cerr << "InsufficientCycles: " << e.what() << '\n';
        return 3;
    } catch (const HorizonExceededError& e) {
        std::cerr << "HorizonExceeded: " << e.what() << '\n';
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ConfigError: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
