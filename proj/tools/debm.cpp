// Command-line front end: covariance, compare, figure2, sample, fit, mc-validate.
//
// Exit codes: 0 success, 1 unexpected error, 2 input error,
// 3 singular / non-identifiable, 4 non-convergence (--require-converged).

#include "debm/asymptotics.hpp"
#include "debm/errors.hpp"
#include "debm/estimators.hpp"
#include "debm/fitting.hpp"
#include "debm/io.hpp"
#include "debm/models.hpp"
#include "debm/study.hpp"

#include "CLI11.hpp"

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace debm;

constexpr int kExitInput = 2;
constexpr int kExitSingular = 3;
constexpr int kExitNotConverged = 4;

struct Args {
    std::string model;
    std::string estimator = "pl";
    std::string out;
    std::string data;
    std::string csv;
    std::uint64_t seed = 1;
    int trials = 1000;
    double sigma = 1.0;
    std::size_t n = 1000;
    int m = 200;
    int max_iterations = 500;
    double grad_tol = 1e-8;
    int restarts = -1;
    std::string init = "zeros";
    bool require_converged = false;
};

std::ostream* open_output(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return &std::cout;
    file.open(path);
    if (!file) throw InputError("cannot write '" + path + "'");
    return &file;
}

void emit(const json& doc, const std::string& path) {
    std::ofstream file;
    *open_output(path, file) << doc.dump(2) << '\n';
}

FitOptions fit_options(const Args& a, const ModelSpec& spec) {
    FitOptions o;
    o.max_iterations = a.max_iterations;
    o.grad_tol = a.grad_tol;
    if (a.restarts >= 0) o.restarts = a.restarts;
    o.seed = a.seed;
    if (a.init == "zeros") {
        o.init = InitKind::zeros;
    } else if (a.init == "given") {
        o.init = InitKind::given;
        o.theta0 = spec.theta;
    } else if (a.init == "random") {
        o.init = InitKind::randomized;
    } else {
        throw InputError("--init must be zeros, given or random");
    }
    return o;
}

int cmd_covariance(const Args& a) {
    const ModelSpec spec = load_model_spec(a.model);
    const auto est = EstimatorSpec::from_selector(a.estimator, spec.model.dimension());
    emit(to_json(well_specified_report(est, spec.model, spec.theta)), a.out);
    return 0;
}

int cmd_compare(const Args& a) {
    const ModelSpec spec = load_model_spec(a.model);
    const Comparison c = compare_estimators(spec.model, spec.theta);
    json doc{{"model", to_json(spec)},
             {"reports", {{"ml", to_json(c.ml)}, {"pl", to_json(c.pl)}, {"rm", to_json(c.rm)}}},
             {"bound", to_json(c.bound)},
             {"rm_minus_pl", to_json(c.rm_vs_pl)},
             {"theorem", to_json(c.theorem)}};
    emit(doc, a.out);
    std::cerr << "Sigma_RM - Sigma_PL: " << to_string(c.rm_vs_pl.relation) << ", spectrum";
    for (Eigen::Index i = 0; i < c.rm_vs_pl.spectrum.size(); ++i) std::cerr << ' ' << c.rm_vs_pl.spectrum[i];
    std::cerr << "\nbound l = " << c.bound.l << ", h = " << c.bound.h << ": "
              << (c.theorem.pass ? "holds" : "VIOLATED") << '\n';
    return 0;
}

int cmd_figure2(const Args& a) {
    const Figure2Run run = run_figure2(a.trials, a.seed, a.sigma);
    std::ofstream file;
    write_figure2_csv(*open_output(a.out, file), run.draws);
    int violations = 0;
    for (const auto& d : run.draws) violations += !(d.row.invariants_hold() && d.theorem.pass);
    std::cerr << "draws: " << run.draws.size() << " (skipped singular: " << run.skipped << ")\n"
              << "fraction with delta_rm_pl > 0: " << run.positive_fraction << '\n'
              << "bound width: min " << run.min_bound_width << ", max " << run.max_bound_width << '\n'
              << "rows violating an invariant: " << violations << '\n';
    return 0;
}

int cmd_sample(const Args& a) {
    const ModelSpec spec = load_model_spec(a.model);
    const Dataset data = sample_dataset(spec.model, spec.theta, a.n, a.seed);
    std::ofstream file;
    std::ostream& out = *open_output(a.out, file);
    out << "# " << data.size() << " draws, model " << to_string(spec.model.kind()) << ", seed "
        << a.seed << '\n';
    write_dataset(out, data);
    return 0;
}

int cmd_fit(const Args& a) {
    const ModelSpec spec = load_model_spec(a.model);
    const Dataset data = load_dataset(a.data, spec.model.dimension());
    const auto est = EstimatorSpec::from_selector(a.estimator, spec.model.dimension());
    const FitResult r = fit(est, spec.model, data, fit_options(a, spec));
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    emit(to_json(r), a.out);
    if (a.require_converged && !r.converged) {
        std::cerr << "fit did not converge (gradient norm " << r.grad_inf_norm << ")\n";
        return kExitNotConverged;
    }
    return 0;
}

int cmd_mc_validate(const Args& a) {
    const ModelSpec spec = load_model_spec(a.model);
    const auto est = EstimatorSpec::from_selector(a.estimator, spec.model.dimension());
    const CovarianceReport analytic = well_specified_report(est, spec.model, spec.theta);
    FitOptions opts = fit_options(a, spec);
    const MonteCarloResult mc =
        monte_carlo_covariance(est, spec.model, spec.theta, a.n, a.m, a.seed, opts);
    const double distance = relative_frobenius(mc.covariance, analytic.sigma);
    json doc{{"estimator", est.name()},
             {"cases_per_trial", a.n},
             {"trials", mc.trials},
             {"converged", mc.converged},
             {"non_converged", mc.non_converged},
             {"failed", mc.failed},
             {"empirical_covariance", to_json(mc.covariance)},
             {"analytic_sigma", to_json(analytic.sigma)},
             {"mean_scaled_deviation", to_json(mc.mean_deviation)},
             {"relative_frobenius_distance", distance}};
    emit(doc, a.out);
    if (!a.csv.empty()) {
        std::ofstream file(a.csv);
        if (!file) throw InputError("cannot write '" + a.csv + "'");
        write_monte_carlo_csv(file, mc, spec.model.param_count());
    }
    std::cerr << "relative Frobenius distance to analytic Sigma: " << distance << '\n';
    if (a.require_converged && mc.non_converged > 0) return kExitNotConverged;
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Asymptotic covariance and efficiency of estimators for discrete energy-based models"};
    app.require_subcommand(1);
    Args a;

    auto add_model = [&](CLI::App* c) { c->add_option("--model", a.model, "model spec JSON")->required(); };
    auto add_estimator = [&](CLI::App* c) {
        c->add_option("--estimator", a.estimator, "ml | pl | rm | gsm")
            ->check(CLI::IsMember({"ml", "pl", "rm", "gsm"}));
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", a.out, "output path (default stdout)"); };
    auto add_fit_flags = [&](CLI::App* c) {
        c->add_option("--max-iter", a.max_iterations, "maximum ascent iterations");
        c->add_option("--grad-tol", a.grad_tol, "gradient infinity-norm tolerance");
        c->add_option("--restarts", a.restarts, "randomized restarts (default: 0 for ml/pl, 4 otherwise)");
        c->add_option("--init", a.init, "zeros | given | random (given = theta from the model spec)");
        c->add_flag("--require-converged", a.require_converged, "exit 4 unless every fit converged");
    };

    auto* covariance = app.add_subcommand("covariance", "well-specified asymptotic covariance report");
    add_model(covariance);
    add_estimator(covariance);
    add_out(covariance);

    auto* compare = app.add_subcommand("compare", "ML/PL/RM covariances and the RM-vs-PL bound");
    add_model(compare);
    add_out(compare);

    auto* figure2 = app.add_subcommand("figure2", "random-parameter efficiency study (CSV)");
    figure2->add_option("--trials", a.trials, "number of parameter draws")->check(CLI::PositiveNumber);
    figure2->add_option("--seed", a.seed, "PRNG seed");
    figure2->add_option("--sigma", a.sigma, "parameter standard deviation")->check(CLI::PositiveNumber);
    add_out(figure2);

    auto* sample = app.add_subcommand("sample", "draw an exact sample from a model");
    add_model(sample);
    sample->add_option("--n", a.n, "number of cases")->check(CLI::PositiveNumber);
    sample->add_option("--seed", a.seed, "PRNG seed");
    add_out(sample);

    auto* fitcmd = app.add_subcommand("fit", "maximize an estimation criterion on a dataset");
    add_model(fitcmd);
    add_estimator(fitcmd);
    fitcmd->add_option("--data", a.data, "dataset file")->required();
    fitcmd->add_option("--seed", a.seed, "seed for randomized starts");
    add_fit_flags(fitcmd);
    add_out(fitcmd);

    auto* mc = app.add_subcommand("mc-validate", "Monte Carlo check of the asymptotic covariance");
    add_model(mc);
    add_estimator(mc);
    mc->add_option("--n", a.n, "cases per trial")->check(CLI::PositiveNumber);
    mc->add_option("--m", a.m, "number of trials")->check(CLI::Range(2, 1 << 30));
    mc->add_option("--seed", a.seed, "PRNG seed");
    mc->add_option("--csv", a.csv, "per-trial estimates CSV");
    add_fit_flags(mc);
    add_out(mc);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*covariance) return cmd_covariance(a);
        if (*compare) return cmd_compare(a);
        if (*figure2) return cmd_figure2(a);
        if (*sample) return cmd_sample(a);
        if (*fitcmd) return cmd_fit(a);
        if (*mc) return cmd_mc_validate(a);
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const SingularMatrixError& e) {
        std::cerr << "singular: " << e.what() << '\n';
        return kExitSingular;
    } catch (const FitError& e) {
        std::cerr << "fit error: " << e.what() << '\n';
        return kExitNotConverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
