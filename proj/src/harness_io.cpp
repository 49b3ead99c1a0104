#include <cctype>
#include <fstream>
#include <sstream>

#include "afl/harness.hpp"
#include "afl/io_util.hpp"

namespace afl {

void ExperimentConfig::validate() const {
    data.validate();
    model.validate();
    optimizer.validate();
    if (model.d != data.d) throw ConfigError("model.d must equal data.d");
    if (batch_size < 1 || batch_size > data.n) {
        throw ConfigError("batch_size must satisfy 1 <= B <= n");
    }
    if (epochs < 1) throw ConfigError("epochs must be >= 1");
    if (test_size < 1) throw ConfigError("test_size must be >= 1");
    if (metric_period < 1) throw ConfigError("metric_period must be >= 1");
}

static const char* kCsvHeader =
    "epoch,train_err,test_err,test_err_halfwidth,mean_loss,feat_pos,feat_neg,"
    "noise_min_pos,noise_min_neg,noise_max_pos,noise_max_neg,moment_ratio,sign_agree";

void write_metrics_csv(std::ostream& out, const RunResult& result) {
    out << kCsvHeader << '\n';
    for (const auto& r : result.records) {
        out << r.epoch << ',' << fmt17(r.train_err) << ',' << fmt17(r.test_err) << ','
            << fmt17(r.test_err_halfwidth) << ',' << fmt17(r.mean_loss) << ','
            << fmt17(r.feat_pos) << ',' << fmt17(r.feat_neg) << ',' << fmt17(r.noise_min_pos)
            << ',' << fmt17(r.noise_min_neg) << ',' << fmt17(r.noise_max_pos) << ','
            << fmt17(r.noise_max_neg) << ',' << fmt17(r.moment_ratio) << ','
            << fmt17(r.sign_agree) << '\n';
    }
    if (!out) throw IoError("metrics write failed");
}

void write_metrics_csv(const std::string& path, const RunResult& result) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    write_metrics_csv(out, result);
}

std::vector<MetricsRecord> read_metrics_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open: " + path);
    std::string line;
    if (!std::getline(in, line)) throw IoError("empty CSV: " + path);
    if (line != kCsvHeader) throw IoError("unexpected CSV header in: " + path);
    std::vector<MetricsRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != 13) throw IoError("bad CSV row: " + line);
        MetricsRecord r;
        r.epoch = std::stol(fields[0]);
        double* cols[] = {&r.train_err,      &r.test_err,     &r.test_err_halfwidth,
                          &r.mean_loss,      &r.feat_pos,     &r.feat_neg,
                          &r.noise_min_pos,  &r.noise_min_neg, &r.noise_max_pos,
                          &r.noise_max_neg,  &r.moment_ratio, &r.sign_agree};
        for (std::size_t i = 0; i < 12; ++i) *cols[i] = std::strtod(fields[i + 1].c_str(), nullptr);
        out.push_back(r);
    }
    return out;
}

void write_summary_json(const std::string& path, const PresetReport& report) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << "{\n  \"preset\": \"" << report.name << "\",\n";
    out << "  \"final_train_err\": " << fmt17(report.run.final_train_err) << ",\n";
    out << "  \"final_test_err\": " << fmt17(report.run.final_test_err) << ",\n";
    out << "  \"pass\": {";
    bool first = true;
    for (const auto& [name, ok] : report.pass) {
        if (!first) out << ',';
        out << "\n    \"" << name << "\": " << (ok ? "true" : "false");
        first = false;
    }
    out << (report.pass.empty() ? "}" : "\n  }") << "\n}\n";
    if (!out) throw IoError("write failed: " + path);
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("bad boolean for " + key + ": " + v);
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    bool model_d_set = false;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty() || val.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": empty key or value");
        }
        if (key == "data.d") cfg.data.d = std::stoi(val);
        else if (key == "data.n") cfg.data.n = std::stoi(val);
        else if (key == "data.s") cfg.data.s = std::stoi(val);
        else if (key == "data.sigma_p") cfg.data.sigma_p = std::stod(val);
        else if (key == "data.alpha") cfg.data.alpha = std::stod(val);
        else if (key == "data.seed") cfg.data.seed = std::stoull(val);
        else if (key == "data.balanced") cfg.data.balanced = parse_bool(val, key);
        else if (key == "model.m") cfg.model.m = std::stoi(val);
        else if (key == "model.q") cfg.model.q = std::stoi(val);
        else if (key == "model.sigma_0") cfg.model.sigma_0 = std::stod(val);
        else if (key == "model.d") { cfg.model.d = std::stoi(val); model_d_set = true; }
        else if (key == "model.seed") cfg.model.seed = std::stoull(val);
        else if (key == "optimizer.kind") cfg.optimizer.kind = opt_kind_from_name(val);
        else if (key == "optimizer.eta") cfg.optimizer.eta = std::stod(val);
        else if (key == "optimizer.lambda") cfg.optimizer.lambda = std::stod(val);
        else if (key == "optimizer.beta1") cfg.optimizer.beta1 = std::stod(val);
        else if (key == "optimizer.beta2") cfg.optimizer.beta2 = std::stod(val);
        else if (key == "optimizer.epsilon") cfg.optimizer.epsilon = std::stod(val);
        else if (key == "optimizer.bias_correction") cfg.optimizer.bias_correction = parse_bool(val, key);
        else if (key == "optimizer.delayed_update") cfg.optimizer.delayed_update = parse_bool(val, key);
        else if (key == "batch_size") cfg.batch_size = std::stoi(val);
        else if (key == "epochs") cfg.epochs = std::stol(val);
        else if (key == "test_size") cfg.test_size = std::stoi(val);
        else if (key == "metric_period") cfg.metric_period = std::stoi(val);
        else if (key == "shuffle_seed") cfg.shuffle_seed = std::stoull(val);
        else if (key == "output_path") cfg.output_path = val;
        else throw ConfigError("unknown config key: " + key);
    }
    if (!model_d_set) cfg.model.d = cfg.data.d;
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace afl
