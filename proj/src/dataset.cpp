#include "fairsim/dataset.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fairsim/rng.hpp"

namespace fairsim {

InteractionStore::InteractionStore(int user_count, int item_count)
    : user_count_(user_count),
      item_count_(item_count),
      profiles_(user_count),
      position_(user_count) {
  if (user_count <= 0 || item_count <= 0)
    throw std::invalid_argument("interaction store needs positive user and item counts");
}

void InteractionStore::check_indices(int user, int item) const {
  if (user < 0 || user >= user_count_) throw std::out_of_range("user id out of range");
  if (item < 0 || item >= item_count_) throw std::out_of_range("item id out of range");
}

const std::vector<Interaction>& InteractionStore::profile(int user) const {
  if (user < 0 || user >= user_count_) throw std::out_of_range("user id out of range");
  return profiles_[user];
}

bool InteractionStore::contains(int user, int item) const {
  check_indices(user, item);
  return position_[user].count(item) > 0;
}

bool InteractionStore::upsert(const Interaction& interaction) {
  check_indices(interaction.user, interaction.item);
  if (interaction.value <= 0) throw std::invalid_argument("interaction value must be positive");
  const bool is_click = interaction.source == InteractionSource::kClick;
  if (is_click != (interaction.round_added >= 1))
    throw std::invalid_argument("click interactions and only click interactions have round_added >= 1");
  auto& slots = position_[interaction.user];
  auto it = slots.find(interaction.item);
  if (it != slots.end()) {
    profiles_[interaction.user][it->second] = interaction;
    return true;
  }
  slots.emplace(interaction.item, profiles_[interaction.user].size());
  profiles_[interaction.user].push_back(interaction);
  ++size_;
  return false;
}

std::size_t InteractionStore::apply_clicks(const std::vector<std::pair<int, int>>& clicks,
                                           int round) {
  if (round < 1) throw std::invalid_argument("clicks can only be applied from round 1");
  std::size_t skipped = 0;
  for (const auto& [user, item] : clicks) {
    check_indices(user, item);
    if (position_[user].count(item) > 0) {
      ++skipped;
      continue;
    }
    position_[user].emplace(item, profiles_[user].size());
    profiles_[user].push_back(
        {user, item, 1.0, round, InteractionSource::kClick});
    ++size_;
  }
  return skipped;
}

DatasetFormat dataset_format_from_string(const std::string& name) {
  if (name == "movielens-delimited") return DatasetFormat::kMovielensDelimited;
  if (name == "csv") return DatasetFormat::kCsv;
  throw std::invalid_argument("unknown dataset format: " + name);
}

std::string to_string(DatasetFormat format) {
  return format == DatasetFormat::kMovielensDelimited ? "movielens-delimited" : "csv";
}

std::string LoadReport::to_json() const {
  nlohmann::json j;
  j["users"] = users;
  j["items"] = items;
  j["interactions"] = interactions;
  j["duplicates_dropped"] = duplicates_dropped;
  return j.dump();
}

namespace {

std::vector<std::string> split_fields(const std::string& line, const std::string& separator) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(separator, start);
    if (pos == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, pos - start));
    start = pos + separator.size();
  }
  return fields;
}

struct RawRecord {
  int user;
  int item;
  double value;
};

}  // namespace

LoadResult load_dataset(const std::filesystem::path& path, DatasetFormat format,
                        const std::string& separator) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  const std::string sep = format == DatasetFormat::kCsv ? "," : separator;
  if (sep.empty()) throw std::invalid_argument("dataset separator must be nonempty");

  LoadResult result;
  std::unordered_map<std::string, int> user_index;
  std::unordered_map<std::string, int> item_index;
  std::vector<RawRecord> records;
  // (user, item) -> index into records, for keep-last duplicate handling
  std::unordered_map<long long, std::size_t> seen;

  std::string line;
  std::size_t line_number = 0;
  bool header_skipped = false;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (format == DatasetFormat::kCsv && !header_skipped) {
      header_skipped = true;
      continue;
    }
    const std::vector<std::string> fields = split_fields(line, sep);
    if (fields.size() < 3)
      throw std::runtime_error("malformed dataset line " + std::to_string(line_number) +
                               ": expected at least 3 fields");
    double value = 0;
    try {
      std::size_t consumed = 0;
      value = std::stod(fields[2], &consumed);
      if (consumed != fields[2].size()) throw std::invalid_argument("trailing junk");
    } catch (const std::exception&) {
      throw std::runtime_error("malformed dataset line " + std::to_string(line_number) +
                               ": bad value field");
    }
    if (fields[0].empty() || fields[1].empty() || value <= 0)
      throw std::runtime_error("malformed dataset line " + std::to_string(line_number) +
                               ": empty id or nonpositive value");

    auto user_it = user_index.find(fields[0]);
    if (user_it == user_index.end()) {
      user_it = user_index.emplace(fields[0], static_cast<int>(result.user_ids.size())).first;
      result.user_ids.push_back(fields[0]);
    }
    auto item_it = item_index.find(fields[1]);
    if (item_it == item_index.end()) {
      item_it = item_index.emplace(fields[1], static_cast<int>(result.item_ids.size())).first;
      result.item_ids.push_back(fields[1]);
    }
    const int user = user_it->second;
    const int item = item_it->second;
    const long long key = static_cast<long long>(user) * (1LL << 32) + item;
    auto seen_it = seen.find(key);
    if (seen_it != seen.end()) {
      records[seen_it->second].value = value;  // keep last occurrence
      ++result.report.duplicates_dropped;
    } else {
      seen.emplace(key, records.size());
      records.push_back({user, item, value});
    }
  }

  if (records.empty()) throw std::runtime_error("no interactions in dataset file");

  result.store = InteractionStore(static_cast<int>(result.user_ids.size()),
                                  static_cast<int>(result.item_ids.size()));
  for (const RawRecord& record : records) {
    result.store.upsert({record.user, record.item, record.value, 0,
                         InteractionSource::kOriginal});
  }
  result.report.users = result.store.user_count();
  result.report.items = result.store.item_count();
  result.report.interactions = result.store.size();
  return result;
}

SplitPair split(const InteractionStore& store, double ratio, std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0))
    throw std::invalid_argument("split ratio must be in (0, 1)");

  SplitPair pair{InteractionStore(store.user_count(), store.item_count()),
                 InteractionStore(store.user_count(), store.item_count())};
  for (int user = 0; user < store.user_count(); ++user) {
    const auto& profile = store.profile(user);
    const std::size_t size = profile.size();
    if (size == 0) throw std::invalid_argument("split requires every user to have an interaction");
    std::vector<std::size_t> order(size);
    for (std::size_t i = 0; i < size; ++i) order[i] = i;
    std::mt19937_64 rng(derive_seed(seed, static_cast<std::uint64_t>(user), "split-user"));
    stable_shuffle(order, rng);

    std::size_t train_count = 1;
    if (size >= 2) {
      train_count = static_cast<std::size_t>(
          std::floor(ratio * static_cast<double>(size)));
      train_count = std::min(std::max<std::size_t>(train_count, 1), size - 1);
    }
    for (std::size_t i = 0; i < size; ++i) {
      (i < train_count ? pair.train : pair.test).upsert(profile[order[i]]);
    }
  }
  return pair;
}

std::string dataset_fingerprint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path.string());
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buffer[i]);
      h *= 0x100000001b3ULL;
    }
    if (!in) break;
  }
  std::ostringstream out;
  out << std::hex;
  for (int shift = 60; shift >= 0; shift -= 4) out << ((h >> shift) & 0xf);
  return out.str();
}

}  // namespace fairsim
