#pragma once

#include "debm/asymptotics.hpp"
#include "debm/efficiency.hpp"
#include "debm/fitting.hpp"
#include "debm/models.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace debm {

using json = nlohmann::json;

/// Contents of a model spec file:
///   {"kind": "third_order_bm" | "binary_mrf" | "binary_rbm",
///    "dimension": D, "theta": [...], "filters": K (RBM only)}
struct ModelSpec {
    EnergyModel model;
    Vector theta;
};

/// All parse and validation failures raise InputError.
ModelSpec parse_model_spec(const json& doc);
ModelSpec load_model_spec(const std::filesystem::path& path);
json to_json(const ModelSpec& spec);

/// Text dataset: one configuration per line as D space-separated 0/1 tokens
/// in bit order; blank lines and lines starting with '#' are skipped. When
/// `dimension` is given every line must have that many tokens.
Dataset parse_dataset(std::istream& in, std::optional<int> dimension = std::nullopt);
Dataset load_dataset(const std::filesystem::path& path, std::optional<int> dimension = std::nullopt);
void write_dataset(std::ostream& out, const Dataset& data);

/// printf "%.17g": the CSV float format.
std::string format_double(double v);

json to_json(const Vector& v);
/// Square matrix as {"dim": n, "data": [row-major entries]}.
json to_json(const Matrix& m);
Matrix matrix_from_json(const json& doc);

json to_json(const CovarianceReport& report);
json to_json(const BoundReport& bound);
json to_json(const PsdOrdering& ordering);
json to_json(const TheoremCheck& check);
json to_json(const FitResult& result);

/// Writes `doc` indented, followed by a newline. Throws InputError on I/O failure.
void write_json(const std::filesystem::path& path, const json& doc);

/// Per-trial Monte Carlo CSV: trial,converged,theta_0..theta_{p-1}
/// (failed trials have converged = 0 and nan parameters).
void write_monte_carlo_csv(std::ostream& out, const MonteCarloResult& result, int param_count);

} // namespace debm
