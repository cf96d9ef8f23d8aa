#include "arqshare/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "arqshare/error.hpp"
#include "arqshare/pdp.hpp"

namespace arqshare {
namespace {

using nlohmann::json;

// Quotients such as 0.01 / (0.0006 + 0.0004) land just below the integer in
// binary floating point.
constexpr double kBudgetSlack = 1e-9;

const std::set<std::string> kKnownKeys = {
    "hops",     "los",       "snr_db", "snr_offset_db", "rate",    "q_sum",  "tau_total",
    "tau_p",    "tau_d",     "scheme", "schemes",       "method",  "methods", "trials",
    "seed",     "channel_mode", "allocation"};

class Reader {
 public:
  explicit Reader(const json& doc) : doc_(doc) {}

  std::vector<std::string> errors;

  bool has(const char* key) const { return doc_.contains(key); }

  template <class T>
  std::optional<T> scalar(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (!matches<T>(v)) {
      errors.push_back(std::string(key) + ": expected " + type_name<T>());
      return std::nullopt;
    }
    return v.get<T>();
  }

  // Accepts a single value or a non-empty list of values.
  template <class T>
  std::optional<std::vector<T>> list(const char* key) {
    if (!has(key)) return std::nullopt;
    const json& v = doc_.at(key);
    if (matches<T>(v)) return std::vector<T>{v.get<T>()};
    if (!v.is_array() || v.empty()) {
      errors.push_back(std::string(key) + ": expected " + type_name<T>() + " or non-empty list");
      return std::nullopt;
    }
    std::vector<T> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!matches<T>(v[i])) {
        errors.push_back(std::string(key) + "[" + std::to_string(i) + "]: expected " + type_name<T>());
        return std::nullopt;
      }
      out.push_back(v[i].get<T>());
    }
    return out;
  }

 private:
  template <class T>
  static bool matches(const json& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      return v.is_string();
    } else if constexpr (std::is_same_v<T, double>) {
      return v.is_number();
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
      return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
    } else {
      return v.is_number_integer();
    }
  }

  template <class T>
  static const char* type_name() {
    if constexpr (std::is_same_v<T, std::string>) return "string";
    else if constexpr (std::is_same_v<T, double>) return "number";
    else if constexpr (std::is_same_v<T, std::uint64_t>) return "non-negative integer";
    else return "integer";
  }

  const json& doc_;
};

template <class T, class Parse>
std::vector<T> parse_names(Reader& r, const char* one, const char* many, Parse parse,
                           std::vector<T> fallback) {
  if (r.has(one) && r.has(many)) {
    r.errors.push_back(std::string(one) + ": give either '" + one + "' or '" + many + "'");
    return fallback;
  }
  const char* key = r.has(one) ? one : many;
  auto names = r.list<std::string>(key);
  if (!names) return fallback;
  std::vector<T> out;
  for (const auto& n : *names) {
    try {
      const T v = parse(n);
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    } catch (const ConfigError& e) {
      r.errors.push_back(std::string(key) + ": " + e.what());
    }
  }
  return out;
}

std::string field_of(const std::string& message) {
  return message.substr(0, message.find_first_of(":["));
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) {
    if (!s.empty()) s += '\n';
    s += l;
  }
  return s;
}

}  // namespace

int budget(const LatencyBudget& lb) {
  if (!(lb.tau_total > 0.0 && lb.tau_p > 0.0 && lb.tau_d > 0.0) || !std::isfinite(lb.tau_total) ||
      !std::isfinite(lb.tau_p) || !std::isfinite(lb.tau_d)) {
    throw DomainError("latency budget: tau_total, tau_p and tau_d must be positive and finite");
  }
  const double n = lb.tau_total / (lb.tau_p + lb.tau_d) * (1.0 + kBudgetSlack);
  if (n < 1.0) {
    throw DomainError("latency budget: tau_total is shorter than tau_p + tau_d, no transmission fits");
  }
  if (n > 1e9) throw DomainError("latency budget: ARQ budget too large");
  return static_cast<int>(std::floor(n));
}

std::vector<std::string> validation_errors(const ExperimentConfig& cfg) {
  std::vector<std::string> err;
  if (cfg.hops < 1) err.push_back("hops: must be at least 1");
  if (cfg.hops > kMaxHops) err.push_back("hops: at most " + std::to_string(kMaxHops) + " supported");
  if (cfg.hops >= 1 && cfg.los.size() != static_cast<std::size_t>(cfg.hops)) {
    err.push_back("los: expected " + std::to_string(cfg.hops) + " entries, got " +
                  std::to_string(cfg.los.size()));
  }
  for (std::size_t i = 0; i < cfg.los.size(); ++i) {
    if (!(cfg.los[i] >= 0.0 && cfg.los[i] < 1.0)) {
      err.push_back("los[" + std::to_string(i) + "]: must lie in [0, 1)");
    }
  }
  if (cfg.snr_db.empty()) err.push_back("snr_db: missing");
  for (double s : cfg.snr_db) {
    if (!std::isfinite(s)) err.push_back("snr_db: values must be finite");
  }
  if (!cfg.snr_offset_db.empty() && cfg.snr_offset_db.size() != cfg.los.size()) {
    err.push_back("snr_offset_db: expected one entry per hop");
  }
  for (double s : cfg.snr_offset_db) {
    if (!std::isfinite(s)) err.push_back("snr_offset_db: values must be finite");
  }
  if (!(cfg.rate > 0.0) || !std::isfinite(cfg.rate)) err.push_back("rate: must be positive");
  if (cfg.q_sum.empty()) err.push_back("q_sum: missing (give q_sum or tau_total, tau_p, tau_d)");
  for (int q : cfg.q_sum) {
    if (q < 1) err.push_back("q_sum: values must be at least 1");
  }
  if (cfg.latency) {
    try {
      const int q = budget(*cfg.latency);
      if (cfg.q_sum != std::vector<int>{q}) err.push_back("q_sum: disagrees with the latency budget");
    } catch (const DomainError& e) {
      err.push_back(std::string("tau_total: ") + e.what());
    }
  }
  if (cfg.schemes.empty()) err.push_back("schemes: at least one scheme required");
  if (cfg.methods.empty()) err.push_back("methods: at least one method required");
  if (!cfg.allocation.empty()) {
    if (cfg.hops >= 1 && cfg.allocation.size() != static_cast<std::size_t>(cfg.hops)) {
      err.push_back("allocation: expected " + std::to_string(cfg.hops) + " entries");
    } else if (!satisfies_adjacency(cfg.allocation)) {
      err.push_back("allocation: violates q_1 >= 1 or the adjacency rule");
    }
  }
  return err;
}

void validate(const ExperimentConfig& cfg) {
  const auto err = validation_errors(cfg);
  if (!err.empty()) throw ConfigError(join_lines(err));
}

ExperimentConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  Reader r(doc);
  for (const auto& item : doc.items()) {
    if (!kKnownKeys.count(item.key())) r.errors.push_back(item.key() + ": unknown key");
  }

  ExperimentConfig cfg;
  auto los = r.list<double>("los");
  auto hops = r.scalar<int>("hops");
  if (hops) {
    cfg.hops = *hops;
  } else if (los && doc.at("los").is_array()) {
    cfg.hops = static_cast<int>(los->size());
  } else {
    r.errors.push_back("hops: missing");
  }
  if (!los) {
    if (!r.has("los")) r.errors.push_back("los: missing");
  } else if (los->size() == 1 && !doc.at("los").is_array() && cfg.hops > 0) {
    cfg.los.assign(cfg.hops, los->front());
  } else {
    cfg.los = *los;
  }

  if (auto snr = r.list<double>("snr_db")) cfg.snr_db = *snr;
  else if (!r.has("snr_db")) r.errors.push_back("snr_db: missing");
  if (r.has("snr_offset_db")) {
    if (!doc.at("snr_offset_db").is_array()) {
      r.errors.push_back("snr_offset_db: expected a list with one entry per hop");
    } else if (auto off = r.list<double>("snr_offset_db")) {
      cfg.snr_offset_db = *off;
    }
  }
  if (auto rate = r.scalar<double>("rate")) cfg.rate = *rate;

  const bool any_tau = r.has("tau_total") || r.has("tau_p") || r.has("tau_d");
  const bool all_tau = r.has("tau_total") && r.has("tau_p") && r.has("tau_d");
  if (r.has("q_sum") && any_tau) {
    r.errors.push_back("q_sum: give either q_sum or the latency triple, not both");
  } else if (r.has("q_sum")) {
    if (auto q = r.list<int>("q_sum")) cfg.q_sum = *q;
  } else if (all_tau) {
    LatencyBudget lb;
    auto t = r.scalar<double>("tau_total");
    auto p = r.scalar<double>("tau_p");
    auto d = r.scalar<double>("tau_d");
    if (t && p && d) {
      lb = {*t, *p, *d};
      cfg.latency = lb;
      try {
        cfg.q_sum = {budget(lb)};
      } catch (const DomainError& e) {
        r.errors.push_back(std::string("tau_total: ") + e.what());
        cfg.latency.reset();
      }
    }
  } else if (any_tau) {
    r.errors.push_back("tau_total: the latency triple needs tau_total, tau_p and tau_d");
  } else {
    r.errors.push_back("q_sum: missing (give q_sum or tau_total, tau_p, tau_d)");
  }

  cfg.schemes = parse_names<Scheme>(r, "scheme", "schemes", parse_scheme, cfg.schemes);
  cfg.methods = parse_names<Method>(r, "method", "methods", parse_method, cfg.methods);
  if (auto t = r.scalar<std::uint64_t>("trials")) cfg.trials = *t;
  if (auto s = r.scalar<std::uint64_t>("seed")) cfg.seed = *s;
  if (auto m = r.scalar<std::string>("channel_mode")) {
    try {
      cfg.channel_mode = parse_channel_mode(*m);
    } catch (const ConfigError& e) {
      r.errors.push_back(std::string("channel_mode: ") + e.what());
    }
  }
  if (r.has("allocation")) {
    if (!doc.at("allocation").is_array()) r.errors.push_back("allocation: expected a list of integers");
    else if (auto a = r.list<int>("allocation")) cfg.allocation = *a;
  }

  // invariant checks, minus fields that already failed to parse
  std::set<std::string> failed;
  for (const auto& e : r.errors) failed.insert(field_of(e));
  for (auto& e : validation_errors(cfg)) {
    if (!failed.count(field_of(e))) r.errors.push_back(std::move(e));
  }
  if (!r.errors.empty()) throw ConfigError(join_lines(r.errors));
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<LinkParams> links_at(const ExperimentConfig& cfg, double snr_db) {
  std::vector<LinkParams> links(cfg.los.size());
  for (std::size_t i = 0; i < links.size(); ++i) {
    const double db = snr_db + (cfg.snr_offset_db.empty() ? 0.0 : cfg.snr_offset_db[i]);
    links[i] = {cfg.los[i], db_to_linear(db), cfg.rate};
  }
  return links;
}

std::string describe(const ExperimentConfig& cfg, int indent) {
  json out;
  out["hops"] = cfg.hops;
  out["los"] = cfg.los;
  out["snr_db"] = cfg.snr_db;
  if (!cfg.snr_offset_db.empty()) out["snr_offset_db"] = cfg.snr_offset_db;
  out["rate"] = cfg.rate;
  out["q_sum"] = cfg.q_sum;
  if (cfg.latency) {
    out["tau_total"] = cfg.latency->tau_total;
    out["tau_p"] = cfg.latency->tau_p;
    out["tau_d"] = cfg.latency->tau_d;
  }
  out["schemes"] = json::array();
  for (auto s : cfg.schemes) out["schemes"].push_back(std::string(to_string(s)));
  out["methods"] = json::array();
  for (auto m : cfg.methods) out["methods"].push_back(std::string(to_string(m)));
  out["trials"] = cfg.trials;
  out["seed"] = cfg.seed;
  out["channel_mode"] = std::string(to_string(cfg.channel_mode));
  if (!cfg.allocation.empty()) out["allocation"] = cfg.allocation;

  json derived = json::array();
  for (double s : cfg.snr_db) {
    const auto links = links_at(cfg, s);
    const OutageVector p = outage_vector(links);
    json point;
    point["snr_db"] = s;
    point["snr_linear"] = db_to_linear(s);
    point["outage"] = std::vector<double>(p.begin(), p.end());
    derived.push_back(point);
  }
  out["outage"] = derived;
  return out.dump(indent);
}

}  // namespace arqshare
