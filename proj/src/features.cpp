#include "rfmatch/features.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "rfmatch/stats.hpp"

namespace rfmatch {

namespace {

void check_bank(const FeatureBank& bank) {
  if (bank.k < 1) throw ConfigError("feature bank needs k >= 1");
  if (bank.arity != 1 && bank.arity != 2)
    throw ConfigError("feature bank arity must be 1 or 2");
  if (bank.frequencies.rows() != bank.k || bank.frequencies.cols() != bank.arity)
    throw ConfigError("feature bank frequency matrix must be k x arity");
  if (bank.phases.size() != bank.k)
    throw ConfigError("feature bank needs one phase per feature");
}

}  // namespace

FeatureBank draw_bank(int k, int arity, double freq_scale, Stream& stream) {
  if (k < 1) throw ConfigError("draw_bank: k must be >= 1");
  if (arity != 1 && arity != 2) throw ConfigError("draw_bank: arity must be 1 or 2");
  if (!(freq_scale > 0.0)) throw ConfigError("draw_bank: freq_scale must be positive");

  FeatureBank bank;
  bank.k = k;
  bank.arity = arity;
  bank.frequencies.resize(k, arity);
  bank.phases.resize(k);
  // Per feature: its frequencies, then its phase, so longer banks extend
  // shorter ones drawn from the same stream state.
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < arity; ++j)
      bank.frequencies(i, j) = freq_scale * normal_quantile(stream.next_double());
    double phase = (2.0 * stream.next_double() - 1.0) * M_PI;
    if (phase <= -M_PI) phase = std::nextafter(-M_PI, 0.0);
    bank.phases(i) = phase;
  }
  return bank;
}

Eigen::VectorXd eval_univariate(const FeatureBank& bank,
                                const Eigen::Ref<const Eigen::VectorXd>& series) {
  check_bank(bank);
  if (bank.arity != 1) throw ConfigError("eval_univariate needs an arity-1 bank");
  if (series.size() < 1) throw InputError("eval_univariate: empty series");
  Eigen::VectorXd out(bank.k);
  for (int i = 0; i < bank.k; ++i)
    out(i) = (bank.frequencies(i, 0) * series.array() + bank.phases(i)).cos().mean();
  return out;
}

Eigen::VectorXd eval_bivariate(const FeatureBank& bank,
                               const Eigen::Ref<const Eigen::VectorXd>& series) {
  check_bank(bank);
  if (bank.arity != 2) throw ConfigError("eval_bivariate needs an arity-2 bank");
  const auto n = series.size();
  if (n < 2) throw InputError("eval_bivariate: series must have length >= 2");
  const auto heads = series.head(n - 1).array();
  const auto tails = series.tail(n - 1).array();
  Eigen::VectorXd out(bank.k);
  for (int i = 0; i < bank.k; ++i)
    out(i) = (bank.frequencies(i, 0) * heads + bank.frequencies(i, 1) * tails +
              bank.phases(i))
                 .cos()
                 .mean();
  return out;
}

Eigen::VectorXd eval_features(const FeatureBank& bank,
                              const Eigen::Ref<const Eigen::VectorXd>& series) {
  return bank.arity == 1 ? eval_univariate(bank, series)
                         : eval_bivariate(bank, series);
}

bool same_bank(const FeatureBank& a, const FeatureBank& b) {
  return a.k == b.k && a.arity == b.arity && a.frequencies == b.frequencies &&
         a.phases == b.phases;
}

std::string bank_fingerprint(const FeatureBank& bank) {
  // FNV-1a over the raw contents.
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto eat = [&h](const void* p, std::size_t len) {
    const auto* bytes = static_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ull;
    }
  };
  eat(&bank.k, sizeof bank.k);
  eat(&bank.arity, sizeof bank.arity);
  eat(bank.frequencies.data(), sizeof(double) * bank.frequencies.size());
  eat(bank.phases.data(), sizeof(double) * bank.phases.size());
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

nlohmann::json bank_to_json(const FeatureBank& bank) {
  nlohmann::json freqs = nlohmann::json::array();
  for (int i = 0; i < bank.k; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (int j = 0; j < bank.arity; ++j) row.push_back(bank.frequencies(i, j));
    freqs.push_back(row);
  }
  nlohmann::json phases = nlohmann::json::array();
  for (int i = 0; i < bank.k; ++i) phases.push_back(bank.phases(i));
  return {{"k", bank.k},
          {"arity", bank.arity},
          {"frequencies", freqs},
          {"phases", phases},
          {"fingerprint", bank_fingerprint(bank)}};
}

FeatureBank bank_from_json(const nlohmann::json& j) {
  FeatureBank bank;
  bank.k = j.at("k").get<int>();
  bank.arity = j.at("arity").get<int>();
  if (bank.k < 1) throw ConfigError("bank json: k must be >= 1");
  if (bank.arity != 1 && bank.arity != 2)
    throw ConfigError("bank json: arity must be 1 or 2");
  const auto& freqs = j.at("frequencies");
  const auto& phases = j.at("phases");
  if (static_cast<int>(freqs.size()) != bank.k ||
      static_cast<int>(phases.size()) != bank.k)
    throw ConfigError("bank json: frequency/phase sizes disagree with k");
  bank.frequencies.resize(bank.k, bank.arity);
  bank.phases.resize(bank.k);
  for (int i = 0; i < bank.k; ++i) {
    if (static_cast<int>(freqs[i].size()) != bank.arity)
      throw ConfigError("bank json: frequency row width disagrees with arity");
    for (int j2 = 0; j2 < bank.arity; ++j2)
      bank.frequencies(i, j2) = freqs[i][j2].get<double>();
    bank.phases(i) = phases[i].get<double>();
  }
  return bank;
}

}  // namespace rfmatch
