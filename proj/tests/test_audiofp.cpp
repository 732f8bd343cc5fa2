#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "cibnet/analysis.hpp"
#include "cibnet/audiofp.hpp"
#include "cibnet/synthbench.hpp"

using namespace cibnet;

namespace {

// Ester et al. DBSCAN written out literally: visited flags, region queries, seed list.
std::vector<int> reference_dbscan(const std::vector<std::vector<double>>& pts, double eps, std::size_t min_pts) {
  const std::size_t n = pts.size();
  auto region = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0;
      for (std::size_t d = 0; d < pts[i].size(); ++d) s += (pts[i][d] - pts[j][d]) * (pts[i][d] - pts[j][d]);
      if (std::sqrt(s) <= eps) out.push_back(j);
    }
    return out;
  };
  std::vector<bool> visited(n, false);
  std::vector<int> label(n, -1);
  int c = -1;
  for (std::size_t p = 0; p < n; ++p) {
    if (visited[p]) continue;
    visited[p] = true;
    auto seeds = region(p);
    if (seeds.size() < min_pts) continue;
    label[p] = ++c;
    for (std::size_t k = 0; k < seeds.size(); ++k) {
      const std::size_t q = seeds[k];
      if (!visited[q]) {
        visited[q] = true;
        auto more = region(q);
        if (more.size() >= min_pts) seeds.insert(seeds.end(), more.begin(), more.end());
      }
      if (label[q] == -1) label[q] = c;
    }
  }
  return label;
}

std::vector<std::vector<double>> blobs(std::mt19937_64& rng, int groups, int per_group, double spread, int noise) {
  std::normal_distribution<double> jitter(0, spread);
  std::uniform_real_distribution<double> anywhere(-40, 40);
  std::vector<std::vector<double>> pts;
  for (int g = 0; g < groups; ++g) {
    for (int i = 0; i < per_group; ++i) pts.push_back({10.0 * g + jitter(rng), 5.0 * (g % 2) + jitter(rng)});
  }
  for (int i = 0; i < noise; ++i) pts.push_back({anywhere(rng), anywhere(rng)});
  std::shuffle(pts.begin(), pts.end(), rng);
  return pts;
}

std::vector<float> tone(double hz, std::size_t n, double amp = 0.5, double rate = 16000.0) {
  std::vector<float> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = static_cast<float>(amp * std::sin(2 * std::numbers::pi * hz * i / rate));
  return s;
}

}  // namespace

TEST(Fft, MatchesNaiveDft) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 1);
  std::vector<std::complex<double>> x(64);
  for (auto& v : x) v = {n(rng), n(rng)};
  auto fast = x;
  fft(fast);
  for (std::size_t k = 0; k < x.size(); ++k) {
    std::complex<double> acc = 0;
    for (std::size_t t = 0; t < x.size(); ++t) acc += x[t] * std::polar(1.0, -2 * std::numbers::pi * k * t / x.size());
    EXPECT_NEAR(std::abs(fast[k] - acc), 0.0, 1e-9);
  }
}

TEST(Hann, PeriodicShape) {
  auto w = hann_window(8);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
  EXPECT_NEAR(w[4], 1.0, 1e-15);
  EXPECT_NEAR(w[2], 0.5, 1e-15);
  EXPECT_NEAR(w[1], w[7], 1e-15);
}

TEST(Mel, ScaleRoundTripAndKnownPoint) {
  EXPECT_NEAR(hz_to_mel(1000.0), 999.99, 0.01);
  for (double hz : {0.0, 50.0, 440.0, 7999.0}) EXPECT_NEAR(mel_to_hz(hz_to_mel(hz)), hz, 1e-9);
}

TEST(Mel, FilterbankShape) {
  MelParams p;
  auto fb = mel_filterbank(p);
  ASSERT_EQ(fb.size(), 128u);
  ASSERT_EQ(fb[0].size(), 1025u);
  for (const auto& row : fb) {
    double peak = 0;
    for (double v : row) {
      EXPECT_GE(v, 0.0);
      peak = std::max(peak, v);
    }
    EXPECT_LE(peak, 1.0);
  }
  p.frame_size = 1000;
  EXPECT_THROW(mel_filterbank(p), ConfigError);
}

TEST(Mel, SpectrogramFrameCountAndPeakBand) {
  auto s = tone(1000.0, 16000);
  auto m = mel_spectrogram(s);
  EXPECT_EQ(m.bands, 128u);
  EXPECT_EQ(m.frames, 1 + (16000 - 2048) / 512);
  const std::size_t f = m.frames / 2;
  std::size_t best = 0;
  for (std::size_t b = 1; b < m.bands; ++b)
    if (m.at(b, f) > m.at(best, f)) best = b;
  // Band centres are evenly spaced on the mel scale between 0 and 8 kHz.
  const double centre = mel_to_hz(hz_to_mel(8000.0) * static_cast<double>(best + 1) / 129.0);
  EXPECT_NEAR(centre, 1000.0, 60.0);
  EXPECT_THROW(mel_spectrogram(tone(100, 100)), DataError);
}

TEST(Voiceprint, LoudnessShiftsMeansOnly) {
  // Scaling by g multiplies mel power by g^2, so band means move by 2*log10(g) and the
  // spreads stay put. Bands far from the tone sit on the 1e-10 floor and are skipped.
  auto s = tone(440.0, 24000, 0.2);
  auto scaled = s;
  for (auto& x : scaled) x *= 2.0f;
  auto a = voiceprint(mel_spectrogram(s)), b = voiceprint(mel_spectrogram(scaled));
  const std::size_t bands = a.size() / 2;
  std::size_t checked = 0;
  for (std::size_t i = 0; i < bands; ++i) {
    if (a[i] < -4.0) continue;
    ++checked;
    EXPECT_NEAR(b[i] - a[i], 2.0 * std::log10(2.0), 1e-6);
    EXPECT_NEAR(b[bands + i], a[bands + i], 1e-6);
  }
  EXPECT_GE(checked, 3u);
}

TEST(Voiceprint, NeedsTwoFrames) {
  EXPECT_THROW(voiceprint(mel_spectrogram(tone(300, 2048))), DataError);
}

TEST(Resample, LinearInterpolation) {
  std::vector<float> in{0, 1, 2, 3};
  auto up = resample_linear(in, 1.0, 2.0);
  ASSERT_EQ(up.size(), 8u);
  EXPECT_FLOAT_EQ(up[1], 0.5f);
  EXPECT_FLOAT_EQ(up[7], 3.0f);
  EXPECT_EQ(resample_linear(in, 16000, 16000), in);
}

TEST(Distance, EuclideanAndCosine) {
  EXPECT_DOUBLE_EQ(distance({0, 0}, {3, 4}, Metric::Euclidean), 5.0);
  EXPECT_NEAR(distance({1, 0}, {0, 1}, Metric::Cosine), 1.0, 1e-15);
  EXPECT_NEAR(distance({1, 1}, {2, 2}, Metric::Cosine), 0.0, 1e-15);
  EXPECT_THROW(distance({1}, {1, 2}, Metric::Euclidean), DataError);
}

TEST(KDistance, CurveAndElbow) {
  std::vector<std::vector<double>> pts{{0}, {1}, {3}, {10}};
  auto curve = k_distance_curve(pts, 1);
  EXPECT_EQ(curve, (std::vector<double>{7, 2, 1, 1}));
  // Second differences: 7-4+1 = 4 at index 1, 2-2+1 = 1 at index 2.
  EXPECT_DOUBLE_EQ(elbow_of(curve), 2.0);
  EXPECT_THROW(k_distance_curve(pts, 4), DataError);
  EXPECT_THROW(k_distance_curve(pts, 0), ConfigError);
  std::ostringstream out;
  write_k_distance_csv(out, curve);
  EXPECT_EQ(out.str(), "rank,k_distance\n0,7\n1,2\n2,1\n3,1\n");
}

TEST(Dbscan, MatchesReferenceImplementation) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 30; ++trial) {
    auto pts = blobs(rng, 4, 15, 0.8 + 0.1 * (trial % 5), 12);
    for (double eps : {0.7, 1.2, 2.0}) {
      for (std::size_t min_pts : {3u, 5u}) {
        EXPECT_EQ(dbscan(pts, eps, min_pts), reference_dbscan(pts, eps, min_pts));
      }
    }
  }
}

TEST(Dbscan, ThreadCountDoesNotChangeLabels) {
  std::mt19937_64 rng(2);
  auto pts = blobs(rng, 5, 20, 1.0, 10);
  EXPECT_EQ(dbscan(pts, 1.5, 5, Metric::Euclidean, 1), dbscan(pts, 1.5, 5, Metric::Euclidean, 4));
}

TEST(Dbscan, RejectsBadParameters) {
  EXPECT_THROW(dbscan({{0}}, -1.0, 3), ConfigError);
  EXPECT_THROW(dbscan({{0}}, 1.0, 0), ConfigError);
  VoiceClusterOptions opts;
  opts.min_pts = 1;
  EXPECT_THROW(cluster_voiceprints({{0}, {1}}, opts), ConfigError);
}

TEST(Voices, PaletteSeparatesIntoNineClusters) {
  const auto palette = voice_palette();
  ASSERT_EQ(palette.size(), 9u);
  std::vector<std::vector<double>> prints;
  std::vector<int> truth;
  for (std::size_t v = 0; v < palette.size(); ++v) {
    for (int clip = 0; clip < 8; ++clip) {
      prints.push_back(voiceprint(mel_spectrogram(synthesize_voice(palette[v], 100 * v + clip, 3.0))));
      truth.push_back(static_cast<int>(v));
    }
  }
  auto result = cluster_voiceprints(prints);
  EXPECT_EQ(result.cluster_count(), 9u);
  EXPECT_EQ(std::count(result.labels.begin(), result.labels.end(), kNoise), 0);
  EXPECT_NEAR(nmi_labels(result.labels, truth), 1.0, 1e-12);
}

TEST(Voices, SynthesisIsDeterministicAndBounded) {
  const auto v = voice_palette()[4];
  auto a = synthesize_voice(v, 9, 1.0), b = synthesize_voice(v, 9, 1.0);
  EXPECT_EQ(a, b);
  ASSERT_EQ(a.size(), 16000u);
  double sq = 0;
  for (float x : a) {
    EXPECT_LE(std::abs(x), 1.0f);
    sq += x * x;
  }
  EXPECT_NEAR(std::sqrt(sq / a.size()), 0.1, 0.01);
  EXPECT_NE(a, synthesize_voice(v, 10, 1.0));
}
