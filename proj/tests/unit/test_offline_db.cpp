#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "beamlearn/offline_db.hpp"

using namespace beamlearn;

namespace {

std::vector<std::vector<double>> random_observations(std::mt19937_64& rng, std::size_t rows, std::size_t pairs) {
  std::exponential_distribution<double> strength(1.0);
  std::vector<std::vector<double>> obs(rows, std::vector<double>(pairs));
  for (auto& row : obs) {
    for (auto& s : row) s = strength(rng);
  }
  return obs;
}

// Rows whose winner lies in the subset encoded by `mask`.
std::size_t covered(const OfflineDatabase& db, unsigned mask) {
  std::size_t n = 0;
  for (const auto& row : db.rows) {
    if (mask & (1u << row.winner())) ++n;
  }
  return n;
}

}  // namespace

TEST_SUITE("offline_db") {

TEST_CASE("rows are sorted by descending strength") {
  const std::vector<double> s{5.0, 2.0, 9.0};
  const ObservationRow row = make_row(s);
  REQUIRE(row.entries.size() == 3);
  CHECK(row.entries[0].pair == 2);
  CHECK(row.entries[0].strength == 9.0);
  CHECK(row.entries[1].pair == 0);
  CHECK(row.entries[2].pair == 1);
  CHECK(row.winner() == 2);
}

TEST_CASE("equal strengths keep ascending pair order") {
  const std::vector<double> s{1.0, 3.0, 3.0, 0.0, 3.0};
  const ObservationRow row = make_row(s);
  CHECK(row.entries[0].pair == 1);
  CHECK(row.entries[1].pair == 2);
  CHECK(row.entries[2].pair == 4);
  CHECK(row.entries[3].pair == 0);
  CHECK(row.entries[4].pair == 3);
}

TEST_CASE("database construction rejects ragged input") {
  const std::vector<std::vector<double>> ragged{{1.0, 2.0}, {1.0}};
  CHECK_THROWS(build_database(ragged));
  CHECK_THROWS(build_database(std::vector<std::vector<double>>{}));
}

TEST_CASE("screening collects the top columns of every row") {
  const std::vector<std::vector<double>> obs{{5.0, 4.0, 1.0, 0.0}, {0.0, 1.0, 2.0, 3.0}};
  const OfflineDatabase db = build_database(obs);
  CHECK(screen_candidates(db, 1) == std::vector<PairIndex>{0, 3});
  CHECK(screen_candidates(db, 2) == std::vector<PairIndex>{0, 1, 2, 3});
  CHECK(screen_candidates(db, 0).empty());
  CHECK_THROWS(screen_candidates(db, 5));
}

TEST_CASE("screened sets grow with the screening depth") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const OfflineDatabase db = build_database(random_observations(rng, 8, 30));
    std::vector<PairIndex> prev;
    for (std::size_t c = 0; c <= 30; ++c) {
      const auto cur = screen_candidates(db, c);
      CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      CHECK(cur.size() <= std::min<std::size_t>(30, c * db.rows.size()));
      prev = cur;
    }
    CHECK(prev.size() == 30);
  }
}

TEST_CASE("average-power selection") {
  const std::vector<double> avg{3.0, 1.0, 2.0};
  CHECK(select_avg_pow(avg, 2) == std::vector<PairIndex>{0, 2});
  CHECK(select_avg_pow(avg, 3) == std::vector<PairIndex>{0, 2, 1});
  CHECK_THROWS(select_avg_pow(avg, 4));
  const std::vector<double> tied{1.0, 2.0, 2.0};
  CHECK(select_avg_pow(tied, 2) == std::vector<PairIndex>{1, 2});

  std::mt19937_64 rng(42);
  const OfflineDatabase db = build_database(random_observations(rng, 50, 20));
  const auto mean = average_strengths(db);
  std::vector<std::pair<double, PairIndex>> ref;
  for (PairIndex p = 0; p < mean.size(); ++p) ref.push_back({-mean[p], p});
  std::sort(ref.begin(), ref.end());
  const auto sel = select_avg_pow(db, 7);
  for (std::size_t k = 0; k < 7; ++k) CHECK(sel[k] == ref[k].second);
}

TEST_CASE("minimum misalignment selection counts winners") {
  // Winners A, A, B, C, A with A = 0, B = 1, C = 2.
  const std::vector<std::vector<double>> obs{
      {9.0, 1.0, 1.0, 0.0}, {9.0, 1.0, 1.0, 0.0}, {1.0, 9.0, 1.0, 0.0},
      {1.0, 1.0, 10.0, 0.0}, {9.0, 1.0, 1.0, 0.0}};
  const OfflineDatabase db = build_database(obs);
  CHECK(estimate_p_opt(db, 0) == doctest::Approx(0.6));
  CHECK(estimate_p_opt(db, 1) == doctest::Approx(0.2));
  CHECK(estimate_p_opt(db, 3) == 0.0);
  const auto p = p_opt_estimates(db);
  CHECK(p[2] == doctest::Approx(0.2));
  CHECK(select_min_mis_prob(db, 1) == std::vector<PairIndex>{0});
  // B and C tie on P_opt; C has the larger average strength.
  CHECK(select_min_mis_prob(db, 3) == std::vector<PairIndex>{0, 2, 1});
}

TEST_CASE("greedy minimum misalignment matches brute force on small universes") {
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<std::size_t> universe(3, 12);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = universe(rng);
    const OfflineDatabase db = build_database(random_observations(rng, 25, n));
    for (std::size_t m = 1; m <= n; ++m) {
      std::size_t best = 0;
      for (unsigned mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) == m) best = std::max(best, covered(db, mask));
      }
      unsigned greedy = 0;
      for (PairIndex p : select_min_mis_prob(db, m)) greedy |= 1u << p;
      CHECK(covered(db, greedy) == best);
    }
  }
}

TEST_CASE("database csv layout") {
  const std::vector<std::vector<double>> obs{{1.0, 10.0}, {100.0, 1.0}};
  const OfflineDatabase db = build_database(obs);
  std::ostringstream os;
  write_database_csv(os, db, 1);
  CHECK(os.str() == "observation,I1,gamma1_db\n1,1,10\n2,0,20\n");
}

}  // TEST_SUITE
