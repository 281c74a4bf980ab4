#include "llab/pipeline/config.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "llab/core/csv.hpp"

namespace llab::pipeline {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

std::vector<int> parse_portfolio_list(const std::string& v) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        out.push_back(static_cast<int>(parse_i64(tok)));
    }
    if (out.empty()) throw std::invalid_argument("config: empty portfolio list");
    return out;
}

}  // namespace

backtest::BacktestConfig RunConfig::backtest_config() const {
    backtest::BacktestConfig bc;
    bc.window_days = window_days;
    bc.portfolios = portfolios;
    bc.seed = seed;
    bc.beta_cap = beta_cap;
    bc.lambda_min = lambda_min;
    bc.annualization = annualization;
    bc.p_max = p_max;
    bc.q_max = q_max;
    bc.refit_every = refit_every;
    bc.cov_mode = cov_mode;
    bc.forecast_mode = forecast_mode;
    bc.market_weights_use_treated = market_weights_use_treated;
    bc.date_start = date_start;
    bc.date_end = date_end;
    bc.jobs = jobs;
    return bc;
}

void RunConfig::validate() const {
    if (!seed_set) throw std::invalid_argument("config: seed is mandatory");
    if (assets.empty()) throw std::invalid_argument("config: no [asset ...] sections");
    if (out_dir.empty()) throw std::invalid_argument("config: out_dir empty");
    for (const auto& a : assets) {
        if (a.ticks_path.empty()) {
            throw std::invalid_argument("config: asset " + a.name + " has no ticks path");
        }
        if (!std::filesystem::exists(a.ticks_path)) {
            throw std::invalid_argument("config: ticks file not found: " + a.ticks_path);
        }
    }
    wash.validate();
    backtest_config().validate();
}

std::string RunConfig::canonical_string() const {
    std::ostringstream os;
    os << "annualization=" << format_double(annualization) << "\n";
    os << "beta_cap=" << format_double(beta_cap) << "\n";
    os << "cov_mode=" << (cov_mode == backtest::CovMode::kIntradayCovariance ? "intraday"
                                                                             : "daily_outer")
       << "\n";
    if (date_end) os << "date_end=" << format_date(*date_end) << "\n";
    if (date_start) os << "date_start=" << format_date(*date_start) << "\n";
    os << "forecast_mode="
       << (forecast_mode == backtest::ForecastMode::kModel ? "model" : "foresight") << "\n";
    os << "lambda_min=" << format_double(lambda_min) << "\n";
    os << "market_weights=" << (market_weights_use_treated ? "treated" : "raw") << "\n";
    os << "p_max=" << p_max << "\n";
    os << "portfolios=";
    for (std::size_t i = 0; i < portfolios.size(); ++i) os << (i ? "," : "") << portfolios[i];
    os << "\n";
    os << "q_max=" << q_max << "\n";
    os << "refit_every=" << refit_every << "\n";
    os << "seed=" << seed << "\n";
    os << "wash=" << (wash.enabled ? "on" : "off") << "\n";
    os << "wash_q3=" << format_double(wash.q3_factor) << "\n";
    os << "wash_q4=" << format_double(wash.q4_factor) << "\n";
    os << "wash_scope="
       << (wash.scope == market_data::QuantileScope::kFullSample ? "full" : "day") << "\n";
    os << "window_days=" << window_days << "\n";
    for (const auto& a : assets) os << "asset." << a.name << ".ticks=" << a.ticks_path << "\n";
    return os.str();
}

namespace {

// Extracts the lines whose key starts with one of the given prefixes.
std::string filter_lines(const std::string& canonical, const std::vector<std::string>& keys) {
    std::istringstream is(canonical);
    std::ostringstream os;
    std::string line;
    while (std::getline(is, line)) {
        for (const auto& k : keys) {
            if (line.rfind(k, 0) == 0) {
                os << line << "\n";
                break;
            }
        }
    }
    return os.str();
}

}  // namespace

std::string fnv1a_hex(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string RunConfig::hash_market_data() const {
    return fnv1a_hex(filter_lines(canonical_string(),
                                  {"asset.", "wash", "date_start", "date_end"}));
}

std::string RunConfig::hash_liquidity() const {
    return fnv1a_hex(filter_lines(canonical_string(), {"asset.", "wash", "date_start", "date_end",
                                                       "seed", "beta_cap"}));
}

std::string RunConfig::hash_backtest() const { return fnv1a_hex(canonical_string()); }

RunConfig parse_config_text(const std::string& text, const std::string& origin) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    AssetConfig* current_asset = nullptr;

    while (std::getline(is, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        auto err = [&](const std::string& msg) {
            throw std::invalid_argument(origin + ":" + std::to_string(lineno) + ": " + msg);
        };

        if (t.front() == '[') {
            if (t.back() != ']') err("unterminated section header");
            std::string inner = trim(t.substr(1, t.size() - 2));
            if (inner.rfind("asset", 0) != 0) err("unknown section: " + inner);
            std::string name = trim(inner.substr(5));
            if (name.empty()) err("asset section needs a name");
            cfg.assets.push_back({name, ""});
            current_asset = &cfg.assets.back();
            continue;
        }

        std::size_t eq = t.find('=');
        if (eq == std::string::npos) err("expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        // strip trailing comment
        std::size_t hash_pos = value.find(" #");
        if (hash_pos != std::string::npos) value = trim(value.substr(0, hash_pos));
        if (value.empty()) err("empty value for " + key);

        if (current_asset) {
            if (key == "ticks") {
                current_asset->ticks_path = value;
            } else {
                err("unknown asset key: " + key);
            }
            continue;
        }

        try {
            if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(parse_i64(value));
                cfg.seed_set = true;
            } else if (key == "out_dir") {
                cfg.out_dir = value;
            } else if (key == "wash") {
                cfg.wash.enabled = parse_bool(value, key);
            } else if (key == "q3_factor") {
                cfg.wash.q3_factor = parse_double(value);
            } else if (key == "q4_factor") {
                cfg.wash.q4_factor = parse_double(value);
            } else if (key == "quantile_scope") {
                if (value == "full") cfg.wash.scope = market_data::QuantileScope::kFullSample;
                else if (value == "day") cfg.wash.scope = market_data::QuantileScope::kPerDay;
                else err("quantile_scope must be full|day");
            } else if (key == "beta_cap") {
                cfg.beta_cap = parse_double(value);
            } else if (key == "window_days") {
                cfg.window_days = static_cast<int>(parse_i64(value));
            } else if (key == "p_max") {
                cfg.p_max = static_cast<int>(parse_i64(value));
            } else if (key == "q_max") {
                cfg.q_max = static_cast<int>(parse_i64(value));
            } else if (key == "lambda_min") {
                cfg.lambda_min = parse_double(value);
            } else if (key == "annualization") {
                cfg.annualization = parse_double(value);
            } else if (key == "portfolios") {
                cfg.portfolios = parse_portfolio_list(value);
            } else if (key == "cov_mode") {
                if (value == "intraday") cfg.cov_mode = backtest::CovMode::kIntradayCovariance;
                else if (value == "daily_outer") cfg.cov_mode = backtest::CovMode::kDailyOuterProduct;
                else err("cov_mode must be intraday|daily_outer");
            } else if (key == "forecast_mode") {
                if (value == "model") cfg.forecast_mode = backtest::ForecastMode::kModel;
                else if (value == "foresight") cfg.forecast_mode = backtest::ForecastMode::kPerfectForesight;
                else err("forecast_mode must be model|foresight");
            } else if (key == "refit_every") {
                cfg.refit_every = static_cast<int>(parse_i64(value));
            } else if (key == "market_weights") {
                if (value == "treated") cfg.market_weights_use_treated = true;
                else if (value == "raw") cfg.market_weights_use_treated = false;
                else err("market_weights must be treated|raw");
            } else if (key == "date_start") {
                cfg.date_start = parse_date(value);
            } else if (key == "date_end") {
                cfg.date_end = parse_date(value);
            } else if (key == "jobs") {
                cfg.jobs = static_cast<unsigned>(parse_i64(value));
            } else {
                err("unknown key: " + key);
            }
        } catch (const std::invalid_argument& e) {
            if (std::string(e.what()).rfind(origin, 0) == 0) throw;
            err(e.what());
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

}  // namespace llab::pipeline
