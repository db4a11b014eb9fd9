#include <gtest/gtest.h>

#include <cmath>

#include "rvbubble/datestamp.hpp"
#include "support.hpp"

using namespace rvbubble;

namespace {

DetectorTrace synthetic(std::size_t n, double tau0, double cv, double lo, double hi) {
  DetectorTrace tr;
  tr.n = n;
  tr.tau0 = tau0;
  for (std::size_t k = first_endpoint(n, tau0); k <= n; ++k) {
    const double f = static_cast<double>(k) / static_cast<double>(n);
    tr.endpoints.push_back(k);
    tr.stats.push_back(f >= lo && f < hi ? cv + 1 : cv - 1);
  }
  return tr;
}

}  // namespace

TEST(DateStamp, NoCrossingNoEpisode) {
  const auto tr = synthetic(100, 0.1, 0.0, 2.0, 2.0);
  EXPECT_TRUE(date_stamp(tr, 0.0, 0.05).empty());
}

TEST(DateStamp, ConstructedEpisode) {
  const auto tr = synthetic(100, 0.1, 0.0, 0.5, 0.7);
  const auto list = date_stamp(tr, 0.0, 0.1);
  ASSERT_EQ(list.episodes.size(), 1u);
  EXPECT_DOUBLE_EQ(list.episodes[0].start, 0.5);
  ASSERT_FALSE(list.episodes[0].open());
  EXPECT_DOUBLE_EQ(*list.episodes[0].end, 0.7);
  EXPECT_EQ(list.cv_used, 0.0);
}

TEST(DateStamp, MinimumDurationDelaysConclusion) {
  const auto tr = synthetic(100, 0.1, 0.0, 0.5, 0.52);
  const auto list = date_stamp(tr, 0.0, 0.1);
  ASSERT_EQ(list.episodes.size(), 1u);
  EXPECT_DOUBLE_EQ(*list.episodes[0].end, 0.6);
}

TEST(DateStamp, MultipleAndOpenEpisodes) {
  DetectorTrace tr = synthetic(100, 0.1, 0.0, 0.2, 0.3);
  for (std::size_t m = 0; m < tr.size(); ++m) {
    if (tr.fraction(m) >= 0.8) tr.stats[m] = 1.0;
  }
  const auto list = date_stamp(tr, 0.0, 0.05);
  ASSERT_EQ(list.episodes.size(), 2u);
  EXPECT_DOUBLE_EQ(list.episodes[0].start, 0.2);
  EXPECT_DOUBLE_EQ(*list.episodes[0].end, 0.3);
  EXPECT_DOUBLE_EQ(list.episodes[1].start, 0.8);
  EXPECT_TRUE(list.episodes[1].open());
}

TEST(DateStamp, TiesDoNotTrigger) {
  DetectorTrace tr = synthetic(50, 0.1, 0.0, 2.0, 2.0);
  std::fill(tr.stats.begin(), tr.stats.end(), 0.0);
  EXPECT_TRUE(date_stamp(tr, 0.0, 0.0).empty());
}

TEST(DateStamp, DefaultMinimumDuration) {
  EXPECT_DOUBLE_EQ(default_min_duration(252), std::log(252.0) / 252.0);
  const auto tr = synthetic(252, 0.1, 0.0, 0.5, 0.7);
  EXPECT_DOUBLE_EQ(date_stamp(tr, 0.0).min_duration, std::log(252.0) / 252.0);
}

TEST(DateStamp, EpisodesOrderedAndSeparated) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto x = oracle::random_walk(200, 300 + s);
    const auto tr = detector_trace(x, 0.1, TraceKind::DF);
    const auto list = date_stamp(tr, -0.5);
    double last_end = 0;
    for (const auto& e : list.episodes) {
      EXPECT_GE(e.start, tr.tau0 - 1e-12);
      EXPECT_GE(e.start, last_end);
      if (e.end) {
        EXPECT_GE(*e.end, e.start + list.min_duration - 1e-9);
        EXPECT_LE(*e.end, 1.0);
        last_end = *e.end;
      }
    }
  }
}

TEST(DateStamp, RaisingCvNeverMovesOriginationEarlier) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto x = oracle::random_walk(200, 700 + s);
    const auto tr = detector_trace(x, 0.1, TraceKind::DF);
    std::optional<double> prev;
    for (double cv = -1.5; cv <= 1.5; cv += 0.25) {
      const auto list = date_stamp(tr, cv);
      if (list.empty()) {
        prev = 2.0;
        continue;
      }
      if (prev) {
        EXPECT_GE(list.episodes.front().start, *prev);
      }
      prev = list.episodes.front().start;
    }
  }
}

TEST(DateStamp, FilterKeepsOpenEpisodes) {
  DetectorTrace tr = synthetic(100, 0.1, 0.0, 0.2, 0.22);
  for (std::size_t m = 0; m < tr.size(); ++m) {
    if (tr.fraction(m) >= 0.95) tr.stats[m] = 1.0;
  }
  const auto list = date_stamp(tr, 0.0, 0.0);
  ASSERT_EQ(list.episodes.size(), 2u);
  const auto kept = filter_episodes(list, 0.1);
  ASSERT_EQ(kept.episodes.size(), 1u);
  EXPECT_TRUE(kept.episodes[0].open());
}

TEST(DateStamp, Validation) {
  DetectorTrace empty;
  EXPECT_THROW(date_stamp(empty, 0.0, 0.1), InvalidArgument);
  const auto tr = synthetic(100, 0.1, 0.0, 0.5, 0.7);
  EXPECT_THROW(date_stamp(tr, 0.0, -0.1), InvalidArgument);
}
