#include "fairsim/mf.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>

#include "fairsim/rng.hpp"

namespace fairsim {

double FactorModel::score(int user, int item) const {
  if (user < 0 || user >= user_count) throw std::out_of_range("user id out of range");
  if (item < 0 || item >= item_count) throw std::out_of_range("item id out of range");
  const double* pu = user_factors.data() + static_cast<std::size_t>(user) * factors;
  const double* qi = item_factors.data() + static_cast<std::size_t>(item) * factors;
  double dot = 0.0;
  for (int f = 0; f < factors; ++f) dot += pu[f] * qi[f];
  return global_bias + user_bias[user] + item_bias[item] + dot;
}

namespace {
constexpr char kModelMagic[4] = {'F', 'S', 'M', 'F'};

void write_block(std::ofstream& out, const std::vector<double>& data) {
  out.write(reinterpret_cast<const char*>(data.data()),
            static_cast<std::streamsize>(data.size() * sizeof(double)));
}

void read_block(std::ifstream& in, std::vector<double>& data) {
  in.read(reinterpret_cast<char*>(data.data()),
          static_cast<std::streamsize>(data.size() * sizeof(double)));
}
}  // namespace

void FactorModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write model: " + path.string());
  out.write(kModelMagic, 4);
  const std::uint32_t version = 1;
  const std::int32_t shape[3] = {user_count, item_count, factors};
  out.write(reinterpret_cast<const char*>(&version), sizeof(version));
  out.write(reinterpret_cast<const char*>(shape), sizeof(shape));
  write_block(out, user_factors);
  write_block(out, item_factors);
  write_block(out, user_bias);
  write_block(out, item_bias);
  out.write(reinterpret_cast<const char*>(&global_bias), sizeof(global_bias));
  if (!out) throw std::runtime_error("short write to model: " + path.string());
}

FactorModel FactorModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read model: " + path.string());
  char magic[4];
  std::uint32_t version = 0;
  std::int32_t shape[3] = {0, 0, 0};
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  in.read(reinterpret_cast<char*>(shape), sizeof(shape));
  if (!in || std::memcmp(magic, kModelMagic, 4) != 0 || version != 1)
    throw std::runtime_error("not a model file: " + path.string());
  FactorModel model;
  model.user_count = shape[0];
  model.item_count = shape[1];
  model.factors = shape[2];
  model.user_factors.resize(static_cast<std::size_t>(model.user_count) * model.factors);
  model.item_factors.resize(static_cast<std::size_t>(model.item_count) * model.factors);
  model.user_bias.resize(model.user_count);
  model.item_bias.resize(model.item_count);
  read_block(in, model.user_factors);
  read_block(in, model.item_factors);
  read_block(in, model.user_bias);
  read_block(in, model.item_bias);
  in.read(reinterpret_cast<char*>(&model.global_bias), sizeof(model.global_bias));
  if (!in) throw std::runtime_error("truncated model file: " + path.string());
  return model;
}

TrainingDivergedError::TrainingDivergedError(int epoch)
    : std::runtime_error("training diverged at epoch " + std::to_string(epoch)),
      epoch_(epoch) {}

namespace {

bool all_finite(const FactorModel& model) {
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return std::isfinite(model.global_bias) && finite(model.user_factors) &&
         finite(model.item_factors) && finite(model.user_bias) && finite(model.item_bias);
}

}  // namespace

FactorModel train(const InteractionStore& train_store, const MfHyperparams& hp,
                  const FactorModel* warm_start, TrainStats* stats) {
  if (train_store.size() == 0) throw std::invalid_argument("training store is empty");
  if (hp.factors < 1 || hp.learning_rate <= 0 || hp.regularization < 0 || hp.epochs < 1 ||
      hp.negatives_per_positive < 1)
    throw std::invalid_argument("invalid matrix factorization hyperparameters");

  const int n = train_store.user_count();
  const int m = train_store.item_count();
  const int d = hp.factors;

  std::mt19937_64 rng(hp.seed);

  FactorModel model;
  if (warm_start) {
    if (warm_start->user_count != n || warm_start->item_count != m ||
        warm_start->factors != d)
      throw std::invalid_argument("warm start model shape mismatch");
    model = *warm_start;
  } else {
    model.user_count = n;
    model.item_count = m;
    model.factors = d;
    model.user_factors.resize(static_cast<std::size_t>(n) * d);
    model.item_factors.resize(static_cast<std::size_t>(m) * d);
    model.user_bias.assign(n, 0.0);
    model.item_bias.assign(m, 0.0);
    for (double& w : model.user_factors) w = (uniform_unit(rng) - 0.5) * 0.2;
    for (double& w : model.item_factors) w = (uniform_unit(rng) - 0.5) * 0.2;
  }

  std::vector<std::pair<int, int>> positives;
  positives.reserve(train_store.size());
  for (int user = 0; user < n; ++user) {
    for (const Interaction& interaction : train_store.profile(user)) {
      positives.emplace_back(user, interaction.item);
    }
  }

  const double lr = hp.learning_rate;
  const double reg = hp.regularization;
  std::vector<double> scratch(d);

  auto sgd_step = [&](int user, int item, double target) -> double {
    double* pu = model.user_factors.data() + static_cast<std::size_t>(user) * d;
    double* qi = model.item_factors.data() + static_cast<std::size_t>(item) * d;
    double pred = model.global_bias + model.user_bias[user] + model.item_bias[item];
    for (int f = 0; f < d; ++f) pred += pu[f] * qi[f];
    const double err = pred - target;
    model.global_bias -= lr * err;
    model.user_bias[user] -= lr * (err + reg * model.user_bias[user]);
    model.item_bias[item] -= lr * (err + reg * model.item_bias[item]);
    for (int f = 0; f < d; ++f) scratch[f] = pu[f];
    for (int f = 0; f < d; ++f) pu[f] -= lr * (err * qi[f] + reg * pu[f]);
    for (int f = 0; f < d; ++f) qi[f] -= lr * (err * scratch[f] + reg * qi[f]);
    return err * err;
  };

  TrainStats local_stats;
  TrainStats& out_stats = stats ? *stats : local_stats;
  out_stats.epoch_loss.clear();
  out_stats.monotonicity_violations = 0;

  for (int epoch = 1; epoch <= hp.epochs; ++epoch) {
    stable_shuffle(positives, rng);
    double loss_sum = 0.0;
    std::size_t steps = 0;
    for (const auto& [user, item] : positives) {
      loss_sum += sgd_step(user, item, 1.0);
      ++steps;
      const std::size_t profile_size = train_store.profile(user).size();
      if (profile_size >= static_cast<std::size_t>(m)) continue;  // no negatives exist
      for (int j = 0; j < hp.negatives_per_positive; ++j) {
        int negative = -1;
        for (int attempt = 0; attempt < 64; ++attempt) {
          const int candidate = static_cast<int>(uniform_below(rng, m));
          if (!train_store.contains(user, candidate)) {
            negative = candidate;
            break;
          }
        }
        if (negative < 0) continue;
        loss_sum += sgd_step(user, negative, 0.0);
        ++steps;
      }
    }
    const double epoch_loss = loss_sum / static_cast<double>(steps);
    if (!std::isfinite(epoch_loss) || !all_finite(model)) throw TrainingDivergedError(epoch);
    if (!out_stats.epoch_loss.empty() &&
        epoch_loss > out_stats.epoch_loss.back() + kLossMonotonicityTolerance) {
      ++out_stats.monotonicity_violations;
    }
    out_stats.epoch_loss.push_back(epoch_loss);
  }

  return model;
}

RankedLists long_lists(const FactorModel& model, const InteractionStore& full_store,
                       int list_length) {
  if (list_length < 0) throw std::invalid_argument("list length must be nonnegative");
  if (model.user_count != full_store.user_count() ||
      model.item_count != full_store.item_count())
    throw std::invalid_argument("model shape does not match store");

  const int n = model.user_count;
  const int m = model.item_count;
  RankedLists lists(n);
  std::vector<std::pair<double, int>> candidates;
  candidates.reserve(m);
  for (int user = 0; user < n; ++user) {
    candidates.clear();
    for (int item = 0; item < m; ++item) {
      if (full_store.contains(user, item)) continue;
      candidates.emplace_back(model.score(user, item), item);
    }
    const std::size_t take = std::min<std::size_t>(list_length, candidates.size());
    auto by_score_then_id = [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first > b.first;
      return a.second < b.second;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + take, candidates.end(),
                      by_score_then_id);
    lists[user].reserve(take);
    for (std::size_t k = 0; k < take; ++k) lists[user].push_back(candidates[k].second);
  }
  return lists;
}

}  // namespace fairsim
