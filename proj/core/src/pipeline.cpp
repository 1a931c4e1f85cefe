#include "deadalpha/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "csv.hpp"
#include "deadalpha/errors.hpp"
#include "deadalpha/ingest.hpp"

namespace deadalpha {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

double parse_config_double(const std::string& key, const std::string& value) {
    try {
        return csv::parse_double(value, 0);
    } catch (const ValidationError&) {
        throw ConfigError("config key '" + key + "': cannot parse number '" + value + "'");
    }
}

int parse_config_int(const std::string& key, const std::string& value) {
    const double v = parse_config_double(key, value);
    if (v != std::floor(v) || std::abs(v) > 1e9) {
        throw ConfigError("config key '" + key + "': expected integer, got '" + value + "'");
    }
    return static_cast<int>(v);
}

bool parse_config_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw ConfigError("config key '" + key + "': expected boolean, got '" + value + "'");
}

}  // namespace

const char* factor_cov_mode_name(FactorCovMode mode) {
    switch (mode) {
        case FactorCovMode::eigenvalues: return "eigenvalues";
        case FactorCovMode::identity: return "identity";
        case FactorCovMode::file: return "file";
    }
    return "eigenvalues";
}

RoundingMode parse_rounding_mode(const std::string& value) {
    if (value == "trunc" || value == "truncate") return RoundingMode::truncate;
    if (value == "round") return RoundingMode::round;
    throw ConfigError("rounding mode must be 'trunc' or 'round', got '" + value + "'");
}

void PipelineConfig::validate() const {
    if (d < 2) throw ConfigError("d must be >= 2, got " + std::to_string(d));
    if (d_vol != 0 && d_vol < 2) throw ConfigError("d_vol must be >= 2 when set");
    if (d_gram != 0 && d_gram < 1) throw ConfigError("d_gram must be >= 1 when set");
    if (eta_dead > eta_min) {
        throw ConfigError("eta_dead (" + csv::format_double(eta_dead) +
                          ") must not exceed eta_min (" + csv::format_double(eta_min) + ")");
    }
    if (s_dead > s_min) {
        throw ConfigError("s_dead (" + csv::format_double(s_dead) + ") must not exceed s_min (" +
                          csv::format_double(s_min) + ")");
    }
    if (tol_l1 <= 0.0 || tol_constraint < 0.0) {
        throw ConfigError("tolerances must be positive");
    }
    if (factor_cov_mode == FactorCovMode::file && factor_cov_path.empty()) {
        throw ConfigError("factor_cov_mode = file requires factor_cov_path");
    }
    if (specific_risk_scale <= 0.0) throw ConfigError("specific_risk_scale must be positive");
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);

    PipelineConfig cfg;
    std::set<std::string> seen;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + " line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw ConfigError(path + " line " + std::to_string(lineno) +
                              ": expected 'key = value'");
        }
        if (!seen.insert(key).second) {
            throw ConfigError(path + " line " + std::to_string(lineno) + ": duplicate key '" +
                              key + "'");
        }

        if (key == "positions") cfg.positions_path = value;
        else if (key == "returns") cfg.returns_path = value;
        else if (key == "constraints") cfg.constraints_path = value;
        else if (key == "out_dir") cfg.out_dir = value;
        else if (key == "d") cfg.d = parse_config_int(key, value);
        else if (key == "d_vol") cfg.d_vol = parse_config_int(key, value);
        else if (key == "d_gram") cfg.d_gram = parse_config_int(key, value);
        else if (key == "eta_min") cfg.eta_min = parse_config_double(key, value);
        else if (key == "eta_dead") cfg.eta_dead = parse_config_double(key, value);
        else if (key == "s_min") cfg.s_min = parse_config_double(key, value);
        else if (key == "s_dead") cfg.s_dead = parse_config_double(key, value);
        else if (key == "rounding_mode" || key == "mode") cfg.rounding_mode = parse_rounding_mode(value);
        else if (key == "seed") {
            const int s = parse_config_int(key, value);
            if (s < 0) throw ConfigError("seed must be nonnegative");
            cfg.seed = static_cast<uint64_t>(s);
        } else if (key == "risk_model") cfg.risk_model = parse_config_bool(key, value);
        else if (key == "specific_risk_scale") cfg.specific_risk_scale = parse_config_double(key, value);
        else if (key == "factor_cov_mode") {
            if (value == "eigenvalues") cfg.factor_cov_mode = FactorCovMode::eigenvalues;
            else if (value == "identity") cfg.factor_cov_mode = FactorCovMode::identity;
            else if (value == "file") cfg.factor_cov_mode = FactorCovMode::file;
            else throw ConfigError("factor_cov_mode must be eigenvalues|identity|file");
        } else if (key == "factor_cov_path") cfg.factor_cov_path = value;
        else if (key.rfind("tol_", 0) == 0) {
            const std::string name = key.substr(4);
            const double tol = parse_config_double(key, value);
            if (name == "l1") cfg.tol_l1 = tol;
            else if (name == "constraint") cfg.tol_constraint = tol;
            else throw ConfigError("unknown tolerance '" + key + "' (known: tol_l1, tol_constraint)");
            cfg.tolerance_overrides[name] = tol;
        } else {
            throw ConfigError(path + " line " + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        }
    }
    cfg.validate();
    return cfg;
}

ClassificationConfig classification_config(const PipelineConfig& cfg) {
    ClassificationConfig c;
    c.d = cfg.d;
    c.d_vol = cfg.d_vol;
    c.eta_min = cfg.eta_min;
    c.eta_dead = cfg.eta_dead;
    c.s_min = cfg.s_min;
    c.s_dead = cfg.s_dead;
    return c;
}

namespace {

nlohmann::ordered_json config_echo(const PipelineConfig& cfg) {
    nlohmann::ordered_json j;
    j["positions"] = cfg.positions_path;
    j["returns"] = cfg.returns_path;
    if (!cfg.constraints_path.empty()) j["constraints"] = cfg.constraints_path;
    j["out_dir"] = cfg.out_dir;
    j["d"] = cfg.d;
    j["d_vol"] = cfg.d_vol == 0 ? cfg.d : cfg.d_vol;
    j["d_gram"] = cfg.d_gram == 0 ? cfg.d : cfg.d_gram;
    j["eta_min"] = cfg.eta_min;
    j["eta_dead"] = cfg.eta_dead;
    j["s_min"] = cfg.s_min;
    j["s_dead"] = cfg.s_dead;
    j["rounding_mode"] = rounding_mode_name(cfg.rounding_mode);
    if (cfg.seed) j["seed"] = *cfg.seed;
    j["tol_l1"] = cfg.tol_l1;
    j["tol_constraint"] = cfg.tol_constraint;
    j["risk_model"] = cfg.risk_model;
    if (cfg.risk_model) {
        j["specific_risk_scale"] = cfg.specific_risk_scale;
        j["factor_cov_mode"] = factor_cov_mode_name(cfg.factor_cov_mode);
        if (!cfg.factor_cov_path.empty()) j["factor_cov_path"] = cfg.factor_cov_path;
    }
    return j;
}

void write_manifest(const std::filesystem::path& dir, nlohmann::ordered_json manifest) {
    std::ofstream out(dir / "manifest.json", std::ios::binary);
    if (!out) throw ValidationError("cannot open manifest.json for writing");
    out << manifest.dump(2) << "\n";
}

Eigen::MatrixXd load_factor_cov_file(const std::string& path, Eigen::Index k) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open factor covariance file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<double> row;
        size_t start = 0;
        while (true) {
            const size_t pos = line.find(',', start);
            const std::string field =
                trim(pos == std::string::npos ? line.substr(start) : line.substr(start, pos - start));
            row.push_back(csv::parse_double(field, lineno));
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        rows.push_back(std::move(row));
    }
    if (static_cast<Eigen::Index>(rows.size()) != k) {
        throw ValidationError("factor covariance file must be " + std::to_string(k) + "x" +
                              std::to_string(k) + " for K = " + std::to_string(k));
    }
    Eigen::MatrixXd phi(k, k);
    for (Eigen::Index r = 0; r < k; ++r) {
        if (static_cast<Eigen::Index>(rows[static_cast<size_t>(r)].size()) != k) {
            throw ValidationError("factor covariance file row " + std::to_string(r + 1) +
                                  " has wrong width");
        }
        for (Eigen::Index c = 0; c < k; ++c) phi(r, c) = rows[static_cast<size_t>(r)][static_cast<size_t>(c)];
    }
    return phi;
}

// Specific risk and expected stock returns for the optional risk-model
// stage, both derived from the most recent d days of the return panel
// restricted to the position universe.
struct StockMoments {
    Eigen::VectorXd mean;
    Eigen::VectorXd stddev;
};

StockMoments recent_stock_moments(const ReturnPanel& returns,
                                  const std::vector<std::string>& stocks, int d) {
    if (returns.n_days() < d) {
        throw ValidationError("risk model: need at least d = " + std::to_string(d) +
                              " return days");
    }
    StockMoments out;
    out.mean.resize(static_cast<Eigen::Index>(stocks.size()));
    out.stddev.resize(static_cast<Eigen::Index>(stocks.size()));
    for (size_t a = 0; a < stocks.size(); ++a) {
        auto it = std::lower_bound(returns.stocks.begin(), returns.stocks.end(), stocks[a]);
        if (it == returns.stocks.end() || *it != stocks[a]) {
            throw ValidationError("risk model: stock " + stocks[a] + " missing from returns");
        }
        const Eigen::Index row = it - returns.stocks.begin();
        const auto window = returns.values.row(row).head(d);
        const double mean = window.mean();
        const double var = (window.array() - mean).square().sum() / static_cast<double>(d - 1);
        out.mean(static_cast<Eigen::Index>(a)) = mean;
        out.stddev(static_cast<Eigen::Index>(a)) = std::sqrt(var);
    }
    return out;
}

}  // namespace

PipelineResult run_pipeline(const PipelineConfig& cfg) {
    cfg.validate();
    if (cfg.positions_path.empty() || cfg.returns_path.empty()) {
        throw ConfigError("run requires 'positions' and 'returns' paths");
    }
    const auto dir = std::filesystem::path(cfg.out_dir);
    std::filesystem::create_directories(dir);

    PipelineResult result;
    const PositionPanel positions = load_positions(cfg.positions_path, cfg.tol_l1);
    const ReturnPanel returns = load_returns(cfg.returns_path);

    size_t constraint_violations = 0;
    if (!cfg.constraints_path.empty()) {
        const ConstraintMatrix q = load_constraints(cfg.constraints_path);
        const ConstraintReport report = check_constraints(positions, q, cfg.tol_constraint);
        constraint_violations = report.flagged.size();
        csv::Writer out((dir / "constraint_violations.csv").string());
        out.raw_line("alpha_id,date,constraint,value");
        for (const auto& v : report.flagged) {
            out.row({positions.alphas[static_cast<size_t>(v.alpha)],
                     positions.dates[static_cast<size_t>(v.day)],
                     "c" + std::to_string(v.constraint + 1), csv::format_double(v.value)});
        }
    }

    const ClassificationConfig ccfg = classification_config(cfg);
    result.stats = compute_alpha_stats(positions, returns, ccfg);
    result.labels = classify(result.stats, ccfg);
    write_stats_csv(result.stats, result.labels, (dir / "stats.csv").string());

    // Classification for the pipeline is taken at the most recent date.
    std::vector<Eigen::Index> dead, good;
    for (Eigen::Index i = 0; i < result.labels.rows; ++i) {
        const Label label = result.labels(i, 0);
        if (label == Label::dead) dead.push_back(i);
        else if (label == Label::good) good.push_back(i);
    }
    for (Eigen::Index i : dead) result.dead_ids.push_back(positions.alphas[static_cast<size_t>(i)]);
    for (Eigen::Index i : good) result.good_ids.push_back(positions.alphas[static_cast<size_t>(i)]);

    result.counts.n_alphas = positions.n_alphas();
    result.counts.m_stocks = positions.n_stocks();
    result.counts.t_days = positions.n_days();
    result.counts.n_dead = static_cast<Eigen::Index>(dead.size());
    result.counts.n_good = static_cast<Eigen::Index>(good.size());

    if (dead.empty()) throw ValidationError("no dead alphas");
    if (good.empty()) throw ValidationError("no good alphas");

    Eigen::MatrixXd good_positions(static_cast<Eigen::Index>(good.size()), positions.n_stocks());
    for (size_t r = 0; r < good.size(); ++r) {
        good_positions.row(static_cast<Eigen::Index>(r)) = positions.values[0].row(good[r]);
    }

    const int d_gram = cfg.d_gram == 0 ? cfg.d : cfg.d_gram;
    result.output = dead_alphas_pipeline(good_positions, result.good_ids, positions, dead, 0,
                                         d_gram, cfg.rounding_mode);
    result.counts.n_excluded = static_cast<Eigen::Index>(result.output.neutralized.excluded.size());
    result.counts.k = result.output.factors.k;
    result.counts.erank = result.output.factors.erank;

    write_neutralized_csv(result.output.neutralized, (dir / "neutralized.csv").string(),
                          (dir / "gammas.csv").string(), (dir / "excluded.csv").string());
    write_factors_csv(result.output.factors, (dir / "factors.csv").string(),
                      (dir / "factor_meta.csv").string());

    std::vector<std::string> outputs = {"stats.csv",   "neutralized.csv", "gammas.csv",
                                        "excluded.csv", "factors.csv",     "factor_meta.csv"};
    if (!cfg.constraints_path.empty()) outputs.insert(outputs.begin(), "constraint_violations.csv");

    if (cfg.risk_model) {
        const auto& factors = result.output.factors;
        const StockMoments moments = recent_stock_moments(returns, positions.stocks, cfg.d);
        const Eigen::VectorXd xi = cfg.specific_risk_scale * moments.stddev;

        Eigen::MatrixXd phi;
        switch (cfg.factor_cov_mode) {
            case FactorCovMode::eigenvalues:
                phi = factors.eigenvalues.asDiagonal();
                break;
            case FactorCovMode::identity:
                phi = Eigen::MatrixXd::Identity(factors.k, factors.k);
                break;
            case FactorCovMode::file:
                phi = load_factor_cov_file(cfg.factor_cov_path, factors.k);
                break;
        }

        const AugmentedLoadings loadings =
            augment_loadings(Eigen::MatrixXd(positions.n_stocks(), 0), factors);
        RiskModel model = assemble_covariance(xi, loadings.loadings, phi);
        model.stocks = positions.stocks;

        const Eigen::VectorXd weights = mean_variance_weights(model, moments.mean);
        result.weights = weights;
        result.factor_exposures = factors.components.transpose() * weights;

        csv::Writer wout((dir / "weights.csv").string());
        wout.raw_line("symbol,weight");
        for (Eigen::Index a = 0; a < weights.size(); ++a) {
            wout.row({positions.stocks[static_cast<size_t>(a)], csv::format_double(weights(a))});
        }
        csv::Writer eout((dir / "exposures.csv").string());
        eout.raw_line("factor,exposure");
        for (Eigen::Index a = 0; a < result.factor_exposures->size(); ++a) {
            eout.row({"v" + std::to_string(a + 1),
                      csv::format_double((*result.factor_exposures)(a))});
        }
        outputs.push_back("weights.csv");
        outputs.push_back("exposures.csv");
    }

    nlohmann::ordered_json manifest;
    manifest["command"] = "run";
    manifest["config"] = config_echo(cfg);
    manifest["counts"] = {
        {"n_alphas", result.counts.n_alphas},
        {"n_dead", result.counts.n_dead},
        {"n_good", result.counts.n_good},
        {"n_excluded", result.counts.n_excluded},
        {"m_stocks", result.counts.m_stocks},
        {"t_days", result.counts.t_days},
        {"k", result.counts.k},
        {"erank", result.counts.erank},
    };
    manifest["missing_return_cells_filled"] = returns.missing_filled;
    if (!cfg.constraints_path.empty()) manifest["constraint_violations"] = constraint_violations;
    manifest["outputs"] = outputs;
    write_manifest(dir, std::move(manifest));
    return result;
}

PipelineResult run_classify(const PipelineConfig& cfg) {
    cfg.validate();
    if (cfg.positions_path.empty() || cfg.returns_path.empty()) {
        throw ConfigError("classify requires 'positions' and 'returns' paths");
    }
    const auto dir = std::filesystem::path(cfg.out_dir);
    std::filesystem::create_directories(dir);

    PipelineResult result;
    const PositionPanel positions = load_positions(cfg.positions_path, cfg.tol_l1);
    const ReturnPanel returns = load_returns(cfg.returns_path);
    const ClassificationConfig ccfg = classification_config(cfg);
    result.stats = compute_alpha_stats(positions, returns, ccfg);
    result.labels = classify(result.stats, ccfg);
    write_stats_csv(result.stats, result.labels, (dir / "stats.csv").string());

    result.counts.n_alphas = positions.n_alphas();
    result.counts.m_stocks = positions.n_stocks();
    result.counts.t_days = positions.n_days();
    for (Eigen::Index i = 0; i < result.labels.rows; ++i) {
        const Label label = result.labels(i, 0);
        if (label == Label::dead) {
            result.dead_ids.push_back(positions.alphas[static_cast<size_t>(i)]);
        } else if (label == Label::good) {
            result.good_ids.push_back(positions.alphas[static_cast<size_t>(i)]);
        }
    }
    result.counts.n_dead = static_cast<Eigen::Index>(result.dead_ids.size());
    result.counts.n_good = static_cast<Eigen::Index>(result.good_ids.size());

    nlohmann::ordered_json manifest;
    manifest["command"] = "classify";
    manifest["config"] = config_echo(cfg);
    manifest["counts"] = {
        {"n_alphas", result.counts.n_alphas}, {"n_dead", result.counts.n_dead},
        {"n_good", result.counts.n_good},     {"m_stocks", result.counts.m_stocks},
        {"t_days", result.counts.t_days},
    };
    manifest["missing_return_cells_filled"] = returns.missing_filled;
    manifest["outputs"] = {"stats.csv"};
    write_manifest(dir, std::move(manifest));
    return result;
}

FactorSet run_extract(const std::string& positions_path, int d, RoundingMode mode,
                      const std::string& out_dir, double tol_l1) {
    if (d < 1) throw ConfigError("extract: d must be >= 1");
    const auto dir = std::filesystem::path(out_dir);
    std::filesystem::create_directories(dir);

    const PositionPanel positions = load_positions(positions_path, tol_l1);
    std::vector<Eigen::Index> all(static_cast<size_t>(positions.n_alphas()));
    for (Eigen::Index i = 0; i < positions.n_alphas(); ++i) all[static_cast<size_t>(i)] = i;

    const FactorSet factors = extract_factors(positions, all, 0, d, mode);
    write_factors_csv(factors, (dir / "factors.csv").string(),
                      (dir / "factor_meta.csv").string());

    nlohmann::ordered_json manifest;
    manifest["command"] = "extract";
    manifest["config"] = {{"positions", positions_path},
                          {"d", d},
                          {"rounding_mode", rounding_mode_name(mode)},
                          {"out_dir", out_dir}};
    manifest["counts"] = {{"n_dead", positions.n_alphas()},
                          {"m_stocks", positions.n_stocks()},
                          {"t_days", positions.n_days()},
                          {"k", factors.k},
                          {"erank", factors.erank}};
    manifest["outputs"] = {"factors.csv", "factor_meta.csv"};
    write_manifest(dir, std::move(manifest));
    return factors;
}

}  // namespace deadalpha
