#include "relplane/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "relplane/errors.hpp"

namespace relplane {

std::string metric_name(MetricKind m) {
  return m == MetricKind::Micro ? "micro" : "macro";
}

MetricKind metric_from(const std::string& name) {
  if (name == "micro") return MetricKind::Micro;
  if (name == "macro") return MetricKind::Macro;
  throw ConfigError("unknown metric '" + name + "'");
}

std::uint64_t fnv1a_hash(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[i] = digits[value & 0xf];
    value >>= 4;
  }
  return out;
}

void ModelConfig::validate() const {
  if (d < 2 || d % 2 != 0)
    throw ConfigError("config: d must be even and at least 2");
  if (heads < 1 || d % heads != 0)
    throw ConfigError("config: heads must divide d");
  if (d_prime < 1 || d_prime >= d)
    throw ConfigError("config: d_prime must satisfy 1 <= d_prime < d");
  if (hdc_rates.empty()) throw ConfigError("config: hdc_rates must be non-empty");
  for (int r : hdc_rates)
    if (r < 1) throw ConfigError("config: dilation rates must be positive");
  if (dropout < 0.0 || dropout >= 1.0)
    throw ConfigError("config: dropout must lie in [0, 1)");
  if (!(lr > 0.0)) throw ConfigError("config: lr must be positive");
  if (warmup < 0.0 || warmup > 1.0)
    throw ConfigError("config: warmup must lie in [0, 1]");
  if (batch < 1) throw ConfigError("config: batch must be positive");
  if (epochs < 0) throw ConfigError("config: epochs must be non-negative");
  if (!use_cfa && !(use_cfa_linear && use_cfa_attention && use_cfa_feature_query &&
                    use_cfa_marked_entities))
    throw ConfigError(
        "config: use_cfa=false conflicts with disabled CFA sub-components "
        "(use_cfa_linear / use_cfa_attention / use_cfa_feature_query / "
        "use_cfa_marked_entities)");
  if (!use_plane && !use_hdc)
    throw ConfigError(
        "config: use_hdc=false conflicts with use_plane=false (the convolution "
        "stack is a sub-component of the interaction module)");
}

namespace {

std::string join_rates(const std::vector<int>& rates) {
  std::string out;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(rates[i]);
  }
  return out;
}

std::vector<int> parse_rates(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    out.push_back(std::stoi(part));
  }
  return out;
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: bad boolean '" + v + "' for key '" + key + "'");
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string ModelConfig::canonical() const {
  std::ostringstream os;
  os << "d = " << d << "\n";
  os << "d_prime = " << d_prime << "\n";
  os << "hdc_rates = " << join_rates(hdc_rates) << "\n";
  os << "heads = " << heads << "\n";
  os << "dropout = " << fmt_double(dropout) << "\n";
  os << "lr = " << fmt_double(lr) << "\n";
  os << "warmup = " << fmt_double(warmup) << "\n";
  os << "batch = " << batch << "\n";
  os << "epochs = " << epochs << "\n";
  os << "seed = " << seed << "\n";
  os << "injection_mode = " << injection_mode_name(injection_mode) << "\n";
  os << "cfa_mode = " << cfa_mode_name(cfa_mode) << "\n";
  os << "use_bilstm = " << (use_bilstm ? "true" : "false") << "\n";
  os << "use_plane = " << (use_plane ? "true" : "false") << "\n";
  os << "use_hdc = " << (use_hdc ? "true" : "false") << "\n";
  os << "use_cfa = " << (use_cfa ? "true" : "false") << "\n";
  os << "use_cfa_linear = " << (use_cfa_linear ? "true" : "false") << "\n";
  os << "use_cfa_attention = " << (use_cfa_attention ? "true" : "false") << "\n";
  os << "use_cfa_feature_query = " << (use_cfa_feature_query ? "true" : "false")
     << "\n";
  os << "use_cfa_marked_entities = "
     << (use_cfa_marked_entities ? "true" : "false") << "\n";
  os << "use_complex_features = " << (use_complex_features ? "true" : "false")
     << "\n";
  os << "use_feature_engineering = "
     << (use_feature_engineering ? "true" : "false") << "\n";
  os << "metric = " << metric_name(metric) << "\n";
  return os.str();
}

std::string ModelConfig::fingerprint() const { return hex64(fnv1a_hash(canonical())); }

ModelConfig ModelConfig::parse(const std::string& text) {
  ModelConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    try {
      if (key == "d") cfg.d = std::stoi(value);
      else if (key == "d_prime") cfg.d_prime = std::stoi(value);
      else if (key == "hdc_rates") cfg.hdc_rates = parse_rates(value);
      else if (key == "heads") cfg.heads = std::stoi(value);
      else if (key == "dropout") cfg.dropout = std::stod(value);
      else if (key == "lr") cfg.lr = std::stod(value);
      else if (key == "warmup") cfg.warmup = std::stod(value);
      else if (key == "batch") cfg.batch = std::stoi(value);
      else if (key == "epochs") cfg.epochs = std::stoi(value);
      else if (key == "seed") cfg.seed = std::stoull(value);
      else if (key == "injection_mode") cfg.injection_mode = injection_mode_from(value);
      else if (key == "cfa_mode") cfg.cfa_mode = cfa_mode_from(value);
      else if (key == "use_bilstm") cfg.use_bilstm = parse_bool(value, key);
      else if (key == "use_plane") cfg.use_plane = parse_bool(value, key);
      else if (key == "use_hdc") cfg.use_hdc = parse_bool(value, key);
      else if (key == "use_cfa") cfg.use_cfa = parse_bool(value, key);
      else if (key == "use_cfa_linear") cfg.use_cfa_linear = parse_bool(value, key);
      else if (key == "use_cfa_attention")
        cfg.use_cfa_attention = parse_bool(value, key);
      else if (key == "use_cfa_feature_query")
        cfg.use_cfa_feature_query = parse_bool(value, key);
      else if (key == "use_cfa_marked_entities")
        cfg.use_cfa_marked_entities = parse_bool(value, key);
      else if (key == "use_complex_features")
        cfg.use_complex_features = parse_bool(value, key);
      else if (key == "use_feature_engineering")
        cfg.use_feature_engineering = parse_bool(value, key);
      else if (key == "metric") cfg.metric = metric_from(value);
      else throw ConfigError("config: unknown key '" + key + "'");
    } catch (const std::invalid_argument&) {
      throw ConfigError("config: line " + std::to_string(lineno) +
                        ": bad value '" + value + "' for key '" + key + "'");
    } catch (const std::out_of_range&) {
      throw ConfigError("config: line " + std::to_string(lineno) +
                        ": value out of range for key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

ModelConfig ModelConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config: cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str());
}

void ModelConfig::save(const std::string& path) const {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("config: cannot write '" + path + "'");
  f << canonical();
}

}  // namespace relplane
