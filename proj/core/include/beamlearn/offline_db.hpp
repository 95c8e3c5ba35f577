// Offline observation database, candidate screening and the offline selectors.
#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "beamlearn/array_codebook.hpp"

namespace beamlearn {

class ScenarioGenerator;

struct PairStrength {
  PairIndex pair = 0;
  double strength = 0.0;
};

// One exhaustive measurement sorted by descending strength, ties by ascending index.
struct ObservationRow {
  std::vector<PairStrength> entries;

  PairIndex winner() const { return entries.front().pair; }
};

ObservationRow make_row(std::span<const double> strengths);

struct OfflineDatabase {
  std::vector<ObservationRow> rows;
  int location_bin = 0;

  std::size_t universe_size() const { return rows.empty() ? 0 : rows.front().entries.size(); }
};

// One row per measurement vector; all vectors must have the same length.
OfflineDatabase build_database(std::span<const std::vector<double>> measurements, int location_bin = 0);

// N exhaustive measurements from draws [first_draw, first_draw + n) of the scenario.
OfflineDatabase build_database(const ScenarioGenerator& scenario, const Codebook& tx,
                               const Codebook& rx, std::size_t n, std::uint64_t first_draw = 0);

// Union of the pairs in the first c columns of every row, ascending.
std::vector<PairIndex> screen_candidates(const OfflineDatabase& db, std::size_t c);

// Per-pair sample average over the rows, indexed by pair.
std::vector<double> average_strengths(const OfflineDatabase& db);

double estimate_p_opt(const OfflineDatabase& db, PairIndex pair);

// Per-pair fraction of rows won, indexed by pair.
std::vector<double> p_opt_estimates(const OfflineDatabase& db);

// Top-m pairs by average strength, ties by ascending index; returned in rank order.
std::vector<PairIndex> select_avg_pow(std::span<const double> averages, std::size_t m);
std::vector<PairIndex> select_avg_pow(const OfflineDatabase& db, std::size_t m);

// Top-m pairs by P_opt estimate, ties by higher average strength then ascending index.
std::vector<PairIndex> select_min_mis_prob(const OfflineDatabase& db, std::size_t m);

// Observation number followed by alternating index / strength-dB columns (first
// max_columns entries per row; 0 writes full rows).
void write_database_csv(std::ostream& os, const OfflineDatabase& db, std::size_t max_columns = 0);

}  // namespace beamlearn
