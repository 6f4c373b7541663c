#include "debm/io.hpp"

#include "debm/errors.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace debm {

namespace {

template <typename T>
T required(const json& doc, const char* key) {
    if (!doc.contains(key)) throw InputError(std::string("model spec is missing \"") + key + "\"");
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw InputError(std::string("model spec field \"") + key + "\" has the wrong type: " + e.what());
    }
}

} // namespace

ModelSpec parse_model_spec(const json& doc) {
    if (!doc.is_object()) throw InputError("model spec must be a JSON object");
    const ModelKind kind = model_kind_from_string(required<std::string>(doc, "kind"));
    const int dimension = required<int>(doc, "dimension");
    const auto theta = required<std::vector<double>>(doc, "theta");

    try {
        EnergyModel model = [&] {
            switch (kind) {
            case ModelKind::third_order_bm:
                if (dimension != 3) throw InputError("third_order_bm requires dimension 3");
                return EnergyModel::third_order_bm();
            case ModelKind::binary_mrf: return EnergyModel::binary_mrf(dimension);
            case ModelKind::binary_rbm:
                return EnergyModel::binary_rbm(dimension, required<int>(doc, "filters"));
            }
            throw InputError("unknown model kind");
        }();
        Vector t = Eigen::Map<const Vector>(theta.data(), static_cast<Eigen::Index>(theta.size()));
        model.check_parameters(t);
        return {std::move(model), std::move(t)};
    } catch (const InputError&) {
        throw;
    } catch (const Error& e) {
        throw InputError(std::string("invalid model spec: ") + e.what());
    }
}

ModelSpec load_model_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model spec '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw InputError("cannot parse model spec '" + path.string() + "': " + e.what());
    }
    return parse_model_spec(doc);
}

json to_json(const ModelSpec& spec) {
    json doc{{"kind", std::string(to_string(spec.model.kind()))},
             {"dimension", spec.model.dimension()},
             {"theta", to_json(spec.theta)}};
    if (spec.model.kind() == ModelKind::binary_rbm) doc["filters"] = spec.model.filters();
    return doc;
}

Dataset parse_dataset(std::istream& in, std::optional<int> dimension) {
    std::vector<Configuration> cases;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream tokens(line);
        std::vector<int> bits;
        std::string tok;
        while (tokens >> tok) {
            if (tok != "0" && tok != "1") {
                throw InputError("dataset line " + std::to_string(line_no) + ": token '" + tok +
                                 "' is not 0 or 1");
            }
            bits.push_back(tok == "1");
        }
        if (!dimension) dimension = static_cast<int>(bits.size());
        if (static_cast<int>(bits.size()) != *dimension) {
            throw InputError("dataset line " + std::to_string(line_no) + " has " +
                             std::to_string(bits.size()) + " values, expected " +
                             std::to_string(*dimension));
        }
        try {
            cases.push_back(Configuration::from_bits(bits));
        } catch (const Error& e) {
            throw InputError("dataset line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    if (cases.empty()) throw InputError("dataset is empty");
    return Dataset(*dimension, std::move(cases));
}

Dataset load_dataset(const std::filesystem::path& path, std::optional<int> dimension) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open dataset '" + path.string() + "'");
    return parse_dataset(in, dimension);
}

void write_dataset(std::ostream& out, const Dataset& data) {
    for (const auto& c : data.cases()) {
        for (int d = 0; d < c.dimension(); ++d) out << (d ? " " : "") << c.bit(d);
        out << '\n';
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json to_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

json to_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) data.push_back(m(i, j));
    }
    return {{"dim", m.rows()}, {"data", std::move(data)}};
}

Matrix matrix_from_json(const json& doc) {
    try {
        const auto n = doc.at("dim").get<Eigen::Index>();
        const auto data = doc.at("data").get<std::vector<double>>();
        if (static_cast<Eigen::Index>(data.size()) != n * n) {
            throw InputError("matrix data length does not match dim");
        }
        Matrix m(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j < n; ++j) m(i, j) = data[static_cast<std::size_t>(i * n + j)];
        }
        return m;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed matrix: ") + e.what());
    }
}

json to_json(const CovarianceReport& report) {
    return {{"estimator", report.estimator},
            {"theta_star", to_json(report.theta_star)},
            {"H", to_json(report.H)},
            {"J", to_json(report.J)},
            {"Sigma", to_json(report.sigma)},
            {"logdet_Sigma", report.logdet_sigma},
            {"rank_deficiency", report.rank_deficiency},
            {"H_condition", report.h_condition}};
}

json to_json(const BoundReport& b) {
    json doc{{"q_min", b.q_min},
             {"q_max", b.q_max},
             {"q_mid", b.q_mid},
             {"V_min", b.v_min},
             {"V_max", b.v_max},
             {"l", b.l},
             {"h", b.h},
             {"D_theta", b.d_theta},
             {"logdet_gap_lower", b.logdet_gap_lower},
             {"logdet_gap_upper", b.logdet_gap_upper}};
    doc["observed_gap"] = b.observed_gap ? json(*b.observed_gap) : json(nullptr);
    return doc;
}

json to_json(const PsdOrdering& ordering) {
    return {{"relation", std::string(to_string(ordering.relation))},
            {"spectrum", to_json(ordering.spectrum)}};
}

json to_json(const TheoremCheck& check) {
    return {{"pass", check.pass},
            {"lower_min_eigenvalue", check.lower_min},
            {"upper_min_eigenvalue", check.upper_min},
            {"scale", check.scale},
            {"lower_spectrum", to_json(check.lower_spectrum)},
            {"upper_spectrum", to_json(check.upper_spectrum)}};
}

json to_json(const FitResult& r) {
    return {{"theta_hat", to_json(r.theta_hat)},
            {"criterion_value", r.criterion_value},
            {"grad_inf_norm", r.grad_inf_norm},
            {"iterations", r.iterations},
            {"converged", r.converged},
            {"restart_index", r.restart_index},
            {"warnings", r.warnings}};
}

void write_json(const std::filesystem::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write '" + path.string() + "'");
    out << doc.dump(2) << '\n';
    if (!out) throw InputError("failed writing '" + path.string() + "'");
}

void write_monte_carlo_csv(std::ostream& out, const MonteCarloResult& result, int param_count) {
    out << "trial,converged";
    for (int i = 0; i < param_count; ++i) out << ",theta_" << i;
    out << '\n';
    for (const auto& rec : result.records) {
        out << rec.trial << ',' << (rec.ok && rec.converged ? 1 : 0);
        for (int i = 0; i < param_count; ++i) {
            out << ',' << (rec.ok ? format_double(rec.theta_hat[i]) : std::string("nan"));
        }
        out << '\n';
    }
}

} // namespace debm
