#include "fairsim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

namespace fairsim {

double position_weight(int rank) { return 1.0 / std::log2(1.0 + rank); }

std::vector<double> round_exposure(const RankedLists& lists, int list_length,
                                   int item_count) {
  std::vector<double> exposure(item_count, 0.0);
  for (const RankedList& list : lists) {
    const int len = std::min<int>(static_cast<int>(list.size()), list_length);
    for (int k = 1; k <= len; ++k) {
      exposure[list[k - 1]] += position_weight(k);
    }
  }
  return exposure;
}

ExposureLedger::ExposureLedger(int item_count)
    : item_count_(item_count),
      cumulative_(item_count, 0.0),
      seen_(item_count, 0) {
  if (item_count <= 0) throw std::invalid_argument("ledger needs a positive item count");
}

bool ExposureLedger::has_round(int round) const {
  for (const auto& [r, _] : rounds_)
    if (r == round) return true;
  return false;
}

void ExposureLedger::accumulate(const std::vector<double>& exposure, int round) {
  if (static_cast<int>(exposure.size()) != item_count_)
    throw std::invalid_argument("exposure vector size does not match catalog");
  if (has_round(round))
    throw std::invalid_argument("round " + std::to_string(round) + " already recorded");
  rounds_.emplace_back(round, exposure);
  for (int i = 0; i < item_count_; ++i) {
    cumulative_[i] += exposure[i];
    if (exposure[i] > 0.0 && !seen_[i]) {
      seen_[i] = 1;
      ++seen_count_;
    }
  }
}

const std::vector<double>& ExposureLedger::round_exposure(int round) const {
  for (const auto& [r, exposure] : rounds_)
    if (r == round) return exposure;
  throw std::out_of_range("round " + std::to_string(round) + " not recorded");
}

std::vector<double> ExposureLedger::cumulative_through(int round) const {
  std::vector<double> total(item_count_, 0.0);
  for (const auto& [r, exposure] : rounds_) {
    if (r > round) continue;
    for (int i = 0; i < item_count_; ++i) total[i] += exposure[i];
  }
  return total;
}

namespace {
constexpr char kLedgerMagic[4] = {'F', 'S', 'L', 'G'};
}

void ExposureLedger::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write ledger: " + path.string());
  out.write(kLedgerMagic, 4);
  const std::uint32_t version = 1;
  const std::uint32_t items = static_cast<std::uint32_t>(item_count_);
  const std::uint32_t rounds = static_cast<std::uint32_t>(rounds_.size());
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(&items), sizeof(items));
  out.write(reinterpret_cast<const char*>(&rounds), sizeof(rounds));
  for (const auto& [round, exposure] : rounds_) {
    const std::int32_t r = round;
    out.write(reinterpret_cast<const char*>(&r), sizeof(r));
    out.write(reinterpret_cast<const char*>(exposure.data()),
              static_cast<std::streamsize>(exposure.size() * sizeof(double)));
  }
  if (!out) throw std::runtime_error("short write to ledger: " + path.string());
}

ExposureLedger ExposureLedger::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read ledger: " + path.string());
  char magic[4];
  std::uint32_t version = 0, items = 0, rounds = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(&items), sizeof(items));
  in.read(reinterpret_cast<char*>(&rounds), sizeof(rounds));
  if (!in || std::memcmp(magic, kLedgerMagic, 4) != 0 || version != 1)
    throw std::runtime_error("not a ledger file: " + path.string());
  ExposureLedger ledger(static_cast<int>(items));
  for (std::uint32_t r = 0; r < rounds; ++r) {
    std::int32_t round = 0;
    std::vector<double> exposure(items);
    in.read(reinterpret_cast<char*>(&round), sizeof(round));
    in.read(reinterpret_cast<char*>(exposure.data()),
            static_cast<std::streamsize>(exposure.size() * sizeof(double)));
    if (!in) throw std::runtime_error("truncated ledger file: " + path.string());
    ledger.accumulate(exposure, round);
  }
  return ledger;
}

double ndcg(const RankedLists& lists, const InteractionStore& test, int list_length) {
  double sum = 0.0;
  int eligible = 0;
  for (int user = 0; user < test.user_count(); ++user) {
    const auto& test_profile = test.profile(user);
    if (test_profile.empty()) continue;
    std::unordered_set<int> relevant;
    relevant.reserve(test_profile.size());
    for (const Interaction& interaction : test_profile) relevant.insert(interaction.item);

    double dcg = 0.0;
    if (user < static_cast<int>(lists.size())) {
      const RankedList& list = lists[user];
      const int len = std::min<int>(static_cast<int>(list.size()), list_length);
      for (int k = 1; k <= len; ++k) {
        if (relevant.count(list[k - 1])) dcg += position_weight(k);
      }
    }
    double idcg = 0.0;
    const int ideal = std::min<int>(list_length, static_cast<int>(relevant.size()));
    for (int k = 1; k <= ideal; ++k) idcg += position_weight(k);

    sum += dcg / idcg;
    ++eligible;
  }
  if (eligible == 0) {
    std::cerr << "warning: ndcg has no eligible users (empty test split); reporting 0\n";
    return 0.0;
  }
  return sum / eligible;
}

double aggregate_diversity(const RankedLists& lists, int item_count) {
  if (item_count < 1) throw std::invalid_argument("item count must be positive");
  std::vector<std::uint8_t> seen(item_count, 0);
  std::size_t distinct = 0;
  for (const RankedList& list : lists) {
    for (int item : list) {
      if (!seen[item]) {
        seen[item] = 1;
        ++distinct;
      }
    }
  }
  return static_cast<double>(distinct) / static_cast<double>(item_count);
}

double cumulative_aggregate_diversity(const ExposureLedger& ledger, int item_count) {
  if (item_count < 1) throw std::invalid_argument("item count must be positive");
  if (item_count != ledger.item_count())
    throw std::invalid_argument("item count does not match ledger catalog");
  return static_cast<double>(ledger.seen_count()) / static_cast<double>(item_count);
}

double equality_of_exposure(std::span<const double> exposure) {
  const std::size_t m = exposure.size();
  if (m < 2) throw std::invalid_argument("equality of exposure needs at least 2 items");
  std::vector<double> sorted(exposure.begin(), exposure.end());
  std::sort(sorted.begin(), sorted.end());
  const double total = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  if (total <= 0.0)
    throw std::runtime_error("equality of exposure undefined: no exposure recorded");
  double gini = 0.0;
  for (std::size_t j = 1; j <= m; ++j) {
    gini += (2.0 * static_cast<double>(j) - static_cast<double>(m) - 1.0) * sorted[j - 1];
  }
  gini /= static_cast<double>(m - 1) * total;
  return 1.0 - gini;
}

namespace {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.10g", value);
  return buffer;
}

}  // namespace

std::string to_csv_row(const RoundReport& report) {
  std::ostringstream out;
  out << report.round << ',' << format_double(report.ndcg) << ','
      << format_double(report.agg_div) << ',' << format_double(report.cum_agg_div) << ','
      << format_double(report.ee) << ',' << format_double(report.cum_ee) << ','
      << format_double(report.discrepancy) << ',' << report.clicks;
  return out.str();
}

RoundReport round_report_from_csv_row(const std::string& row) {
  std::vector<std::string> fields;
  std::stringstream stream(row);
  std::string field;
  while (std::getline(stream, field, ',')) fields.push_back(field);
  if (fields.size() != 8) throw std::runtime_error("malformed round report row: " + row);
  RoundReport report;
  report.round = std::stoi(fields[0]);
  report.ndcg = std::stod(fields[1]);
  report.agg_div = std::stod(fields[2]);
  report.cum_agg_div = std::stod(fields[3]);
  report.ee = std::stod(fields[4]);
  report.cum_ee = std::stod(fields[5]);
  report.discrepancy = std::stod(fields[6]);
  report.clicks = std::stoll(fields[7]);
  return report;
}

std::string to_json_line(const RoundReport& report) {
  nlohmann::json j;
  j["round"] = report.round;
  j["ndcg"] = report.ndcg;
  j["agg_div"] = report.agg_div;
  j["cum_agg_div"] = report.cum_agg_div;
  j["ee"] = report.ee;
  j["cum_ee"] = report.cum_ee;
  j["discrepancy"] = report.discrepancy;
  j["clicks"] = report.clicks;
  return j.dump();
}

}  // namespace fairsim
