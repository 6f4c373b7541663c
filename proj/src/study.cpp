#include "debm/study.hpp"

#include "debm/errors.hpp"
#include "debm/io.hpp"
#include "debm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <ostream>
#include <thread>

namespace debm {

Comparison compare_estimators(const EnergyModel& model, const Vector& theta, double tol) {
    const int d = model.dimension();
    Comparison c;
    c.ml = well_specified_report(EstimatorSpec::maximum_likelihood(d), model, theta);
    c.pl = well_specified_report(EstimatorSpec::pseudolikelihood(d), model, theta);
    c.rm = well_specified_report(EstimatorSpec::ratio_matching(d), model, theta);
    c.bound = bound_quantities(model, theta);
    c.bound.observed_gap = c.rm.logdet_sigma - c.pl.logdet_sigma;
    c.rm_vs_pl = psd_order(c.pl.sigma, c.rm.sigma, tol);
    c.theorem = check_theorem_bound(c.pl.sigma, c.rm.sigma, c.bound, tol);
    return c;
}

double Figure2Row::scale() const {
    return std::max({1.0, std::abs(logdet_ml), std::abs(logdet_pl), std::abs(logdet_rm)});
}

bool Figure2Row::invariants_hold(double tol) const {
    const double slack = tol * scale();
    const double d_theta = static_cast<double>(theta.size());
    return delta_pl_ml >= -slack && delta_rm_ml >= -slack &&
           delta_rm_pl >= d_theta * log_l - slack && delta_rm_pl <= d_theta * log_h + slack;
}

Vector figure2_theta(std::uint64_t seed, int trial, double sigma) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    Vector theta(6);
    for (int i = 0; i < 6; ++i) theta[i] = sigma * rng.normal();
    return theta;
}

Figure2Draw figure2_draw(int trial, const Vector& theta, double tol) {
    const auto model = EnergyModel::third_order_bm();
    const Comparison c = compare_estimators(model, theta, tol);
    Figure2Draw out;
    Figure2Row& r = out.row;
    r.trial = trial;
    r.theta = theta;
    // logdet_gap re-derives each log-determinant from the spectrum and
    // rejects rank-deficient covariances.
    r.logdet_ml = c.ml.logdet_sigma;
    r.logdet_pl = c.pl.logdet_sigma;
    r.logdet_rm = c.rm.logdet_sigma;
    r.delta_pl_ml = logdet_gap(c.ml.sigma, c.pl.sigma);
    r.delta_rm_ml = logdet_gap(c.ml.sigma, c.rm.sigma);
    r.delta_rm_pl = logdet_gap(c.pl.sigma, c.rm.sigma);
    r.log_l = std::log(c.bound.l);
    r.log_h = std::log(c.bound.h);
    r.bound_width = c.bound.d_theta * (r.log_h - r.log_l);
    out.theorem = c.theorem;
    out.ml_vs_pl = psd_order(c.ml.sigma, c.pl.sigma, tol);
    out.ml_vs_rm = psd_order(c.ml.sigma, c.rm.sigma, tol);
    return out;
}

Figure2Run run_figure2(int trials, std::uint64_t seed, double sigma) {
    if (trials < 1) throw DomainError("figure2 needs at least one trial");
    if (!(sigma > 0.0)) throw DomainError("figure2 sigma must be positive");

    std::vector<std::optional<Figure2Draw>> slots(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            try {
                slots[static_cast<std::size_t>(t)] = figure2_draw(t, figure2_theta(seed, t, sigma));
            } catch (const SingularMatrixError&) {
                // counted below
            }
        }
    };
    const unsigned workers = std::max(1U, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                             static_cast<unsigned>(trials)));
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < workers; ++w) pool.emplace_back(worker);
        worker();
    }

    Figure2Run run;
    int positive = 0;
    for (auto& slot : slots) {
        if (!slot) {
            ++run.skipped;
            continue;
        }
        if (slot->row.delta_rm_pl > 0.0) ++positive;
        run.draws.push_back(std::move(*slot));
    }
    if (!run.draws.empty()) {
        run.positive_fraction = static_cast<double>(positive) / run.draws.size();
        auto [lo, hi] = std::minmax_element(run.draws.begin(), run.draws.end(),
                                            [](const auto& a, const auto& b) {
                                                return a.row.bound_width < b.row.bound_width;
                                            });
        run.min_bound_width = lo->row.bound_width;
        run.max_bound_width = hi->row.bound_width;
    }
    return run;
}

void write_figure2_csv(std::ostream& out, const std::vector<Figure2Draw>& draws) {
    out << "trial";
    for (int i = 0; i < 6; ++i) out << ",theta_" << i;
    out << ",logdet_ml,logdet_pl,logdet_rm,delta_pl_ml,delta_rm_ml,delta_rm_pl,log_l,log_h,"
           "bound_width\n";
    for (const auto& d : draws) {
        const Figure2Row& r = d.row;
        out << r.trial;
        for (Eigen::Index i = 0; i < r.theta.size(); ++i) out << ',' << format_double(r.theta[i]);
        for (double v : {r.logdet_ml, r.logdet_pl, r.logdet_rm, r.delta_pl_ml, r.delta_rm_ml,
                         r.delta_rm_pl, r.log_l, r.log_h, r.bound_width}) {
            out << ',' << format_double(v);
        }
        out << '\n';
    }
}

} // namespace debm
