#include "beamlearn/offline_db.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "beamlearn/channel.hpp"
#include "beamlearn/metrics.hpp"
#include "beamlearn/scenario.hpp"

namespace beamlearn {

ObservationRow make_row(std::span<const double> strengths) {
  ObservationRow row;
  row.entries.reserve(strengths.size());
  for (std::size_t i = 0; i < strengths.size(); ++i) row.entries.push_back({i, strengths[i]});
  std::stable_sort(row.entries.begin(), row.entries.end(),
                   [](const PairStrength& a, const PairStrength& b) { return a.strength > b.strength; });
  return row;
}

OfflineDatabase build_database(std::span<const std::vector<double>> measurements, int location_bin) {
  if (measurements.empty()) throw std::invalid_argument("database needs at least one observation");
  OfflineDatabase db;
  db.location_bin = location_bin;
  for (const auto& m : measurements) {
    if (m.size() != measurements.front().size()) {
      throw std::invalid_argument("observations must cover the same pair universe");
    }
    if (m.empty()) throw std::invalid_argument("empty observation");
    db.rows.push_back(make_row(m));
  }
  return db;
}

OfflineDatabase build_database(const ScenarioGenerator& scenario, const Codebook& tx,
                               const Codebook& rx, std::size_t n, std::uint64_t first_draw) {
  std::vector<std::vector<double>> measurements;
  measurements.reserve(n);
  const double period = scenario.config().symbol_period_s();
  for (std::size_t k = 0; k < n; ++k) {
    ChannelModel model(scenario.draw(first_draw + k), tx.geometry, rx.geometry, period);
    measurements.push_back(model.all_pair_strengths(tx, rx));
  }
  return build_database(measurements);
}

std::vector<PairIndex> screen_candidates(const OfflineDatabase& db, std::size_t c) {
  const std::size_t universe = db.universe_size();
  if (c > universe) throw std::invalid_argument("screening depth exceeds the pair universe");
  std::vector<char> seen(universe, 0);
  for (const auto& row : db.rows) {
    for (std::size_t k = 0; k < c; ++k) seen[row.entries[k].pair] = 1;
  }
  std::vector<PairIndex> out;
  for (std::size_t i = 0; i < universe; ++i) {
    if (seen[i]) out.push_back(i);
  }
  return out;
}

std::vector<double> average_strengths(const OfflineDatabase& db) {
  std::vector<double> avg(db.universe_size(), 0.0);
  if (db.rows.empty()) return avg;
  for (const auto& row : db.rows) {
    for (const auto& e : row.entries) avg[e.pair] += e.strength;
  }
  for (double& v : avg) v /= static_cast<double>(db.rows.size());
  return avg;
}

double estimate_p_opt(const OfflineDatabase& db, PairIndex pair) {
  std::vector<PairIndex> winners;
  winners.reserve(db.rows.size());
  for (const auto& row : db.rows) winners.push_back(row.winner());
  return estimate_p_opt(winners, pair);
}

std::vector<double> p_opt_estimates(const OfflineDatabase& db) {
  std::vector<double> p(db.universe_size(), 0.0);
  if (db.rows.empty()) return p;
  for (const auto& row : db.rows) p[row.winner()] += 1.0;
  for (double& v : p) v /= static_cast<double>(db.rows.size());
  return p;
}

std::vector<PairIndex> select_avg_pow(std::span<const double> averages, std::size_t m) {
  if (m > averages.size()) throw std::invalid_argument("selection size exceeds the universe");
  std::vector<PairIndex> order(averages.size());
  std::iota(order.begin(), order.end(), PairIndex{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](PairIndex a, PairIndex b) { return averages[a] > averages[b]; });
  order.resize(m);
  return order;
}

std::vector<PairIndex> select_avg_pow(const OfflineDatabase& db, std::size_t m) {
  return select_avg_pow(average_strengths(db), m);
}

std::vector<PairIndex> select_min_mis_prob(const OfflineDatabase& db, std::size_t m) {
  const auto p = p_opt_estimates(db);
  if (m > p.size()) throw std::invalid_argument("selection size exceeds the universe");
  const auto avg = average_strengths(db);
  std::vector<PairIndex> order(p.size());
  std::iota(order.begin(), order.end(), PairIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](PairIndex a, PairIndex b) {
    if (p[a] != p[b]) return p[a] > p[b];
    return avg[a] > avg[b];
  });
  order.resize(m);
  return order;
}

void write_database_csv(std::ostream& os, const OfflineDatabase& db, std::size_t max_columns) {
  const std::size_t cols =
      max_columns == 0 ? db.universe_size() : std::min(max_columns, db.universe_size());
  const auto old_precision = os.precision(8);
  os << "observation";
  for (std::size_t k = 1; k <= cols; ++k) os << ",I" << k << ",gamma" << k << "_db";
  os << '\n';
  for (std::size_t r = 0; r < db.rows.size(); ++r) {
    os << (r + 1);
    for (std::size_t k = 0; k < cols; ++k) {
      const auto& e = db.rows[r].entries[k];
      os << ',' << e.pair << ',' << to_db(e.strength);
    }
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace beamlearn
