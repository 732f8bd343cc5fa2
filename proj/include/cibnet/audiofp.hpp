#pragma once

// Voiceover fingerprints: log-mel spectrograms, mean/std voiceprints, k-distance
// radius selection and DBSCAN.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "cibnet/detail/parallel.hpp"
#include "cibnet/error.hpp"
#include "cibnet/graph_io.hpp"

namespace cibnet {

struct MelParams {
  double sample_rate = 16000.0;
  std::size_t frame_size = 2048;
  std::size_t hop = 512;
  std::size_t mel_bands = 128;
  double fmin = 0.0;
  double fmax = 0.0;  // 0: sample_rate / 2

  double upper() const { return fmax > 0.0 ? fmax : sample_rate / 2.0; }

  void validate() const {
    if (frame_size < 2 || (frame_size & (frame_size - 1)) != 0) throw ConfigError("frame size must be a power of two");
    if (hop == 0 || hop > frame_size) throw ConfigError("hop must lie in [1, frame size]");
    if (mel_bands < 8) throw ConfigError("at least 8 mel bands are required");
    if (!(sample_rate > 0.0)) throw ConfigError("sample rate must be positive");
    if (!(fmin >= 0.0 && fmin < upper() && upper() <= sample_rate / 2.0)) throw ConfigError("invalid mel frequency range");
  }
};

inline double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
inline double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

/// In-place iterative radix-2 FFT; size must be a power of two.
inline void fft(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

/// Periodic Hann window.
inline std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
  return w;
}

/// Triangular filters on the HTK mel scale, one row per band over frame_size/2 + 1 bins.
inline std::vector<std::vector<double>> mel_filterbank(const MelParams& p) {
  p.validate();
  const std::size_t bins = p.frame_size / 2 + 1;
  const double lo = hz_to_mel(p.fmin), hi = hz_to_mel(p.upper());
  std::vector<double> edges(p.mel_bands + 2);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    edges[i] = mel_to_hz(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(p.mel_bands + 1));
  }
  std::vector<std::vector<double>> fb(p.mel_bands, std::vector<double>(bins, 0.0));
  for (std::size_t m = 0; m < p.mel_bands; ++m) {
    const double left = edges[m], centre = edges[m + 1], right = edges[m + 2];
    for (std::size_t k = 0; k < bins; ++k) {
      const double f = static_cast<double>(k) * p.sample_rate / static_cast<double>(p.frame_size);
      const double up = (f - left) / (centre - left);
      const double down = (right - f) / (right - centre);
      fb[m][k] = std::max(0.0, std::min(up, down));
    }
  }
  return fb;
}

/// Band-major log-power matrix.
struct MelSpectrogram {
  std::size_t bands = 0;
  std::size_t frames = 0;
  std::vector<double> data;  // data[band * frames + frame]

  double at(std::size_t band, std::size_t frame) const { return data[band * frames + frame]; }
};

/// log10(mel power + 1e-10) of the Hann-windowed STFT. Frames start at multiples of the
/// hop with no padding, so the input must hold at least one full frame.
inline MelSpectrogram mel_spectrogram(const std::vector<float>& samples, const MelParams& p = {}) {
  p.validate();
  if (samples.size() < p.frame_size) {
    throw DataError("audio too short: need at least " + std::to_string(p.frame_size) + " samples, got " +
                    std::to_string(samples.size()));
  }
  const auto fb = mel_filterbank(p);
  const auto window = hann_window(p.frame_size);
  const std::size_t bins = p.frame_size / 2 + 1;
  MelSpectrogram out;
  out.bands = p.mel_bands;
  out.frames = 1 + (samples.size() - p.frame_size) / p.hop;
  out.data.assign(out.bands * out.frames, 0.0);
  std::vector<std::complex<double>> buf(p.frame_size);
  std::vector<double> power(bins);
  for (std::size_t f = 0; f < out.frames; ++f) {
    const std::size_t start = f * p.hop;
    for (std::size_t i = 0; i < p.frame_size; ++i) buf[i] = {samples[start + i] * window[i], 0.0};
    fft(buf);
    for (std::size_t k = 0; k < bins; ++k) power[k] = std::norm(buf[k]);
    for (std::size_t m = 0; m < out.bands; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < bins; ++k) e += fb[m][k] * power[k];
      out.data[m * out.frames + f] = std::log10(e + 1e-10);
    }
  }
  return out;
}

/// Linear-interpolation resampler.
inline std::vector<float> resample_linear(const std::vector<float>& in, double from_rate, double to_rate) {
  if (!(from_rate > 0.0 && to_rate > 0.0)) throw ConfigError("sample rates must be positive");
  if (in.empty() || from_rate == to_rate) return in;
  const auto n_out = static_cast<std::size_t>(std::floor(static_cast<double>(in.size()) * to_rate / from_rate));
  std::vector<float> out(n_out);
  for (std::size_t i = 0; i < n_out; ++i) {
    const double pos = static_cast<double>(i) * from_rate / to_rate;
    const auto j = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(j);
    const double a = in[std::min(j, in.size() - 1)];
    const double b = in[std::min(j + 1, in.size() - 1)];
    out[i] = static_cast<float>(a + (b - a) * frac);
  }
  return out;
}

/// Per-band mean followed by per-band population standard deviation over frames.
inline std::vector<double> voiceprint(const MelSpectrogram& m) {
  if (m.frames < 2) throw DataError("voiceprint needs at least two frames");
  std::vector<double> v(2 * m.bands);
  for (std::size_t b = 0; b < m.bands; ++b) {
    double mean = 0.0;
    for (std::size_t f = 0; f < m.frames; ++f) mean += m.at(b, f);
    mean /= static_cast<double>(m.frames);
    double var = 0.0;
    for (std::size_t f = 0; f < m.frames; ++f) var += (m.at(b, f) - mean) * (m.at(b, f) - mean);
    v[b] = mean;
    v[m.bands + b] = std::sqrt(var / static_cast<double>(m.frames));
  }
  return v;
}

enum class Metric { Euclidean, Cosine };

inline double distance(const std::vector<double>& a, const std::vector<double>& b, Metric metric) {
  if (a.size() != b.size()) throw DataError("vector dimension mismatch");
  if (metric == Metric::Euclidean) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 1.0;
  return std::max(0.0, 1.0 - dot / std::sqrt(na * nb));
}

/// Pairwise distance matrix, row-major.
inline std::vector<double> distance_matrix(const std::vector<std::vector<double>>& pts, Metric metric,
                                           std::size_t threads = 1) {
  const std::size_t n = pts.size();
  std::vector<double> d(n * n, 0.0);
  detail::parallel_chunks(n, detail::resolve_threads(threads), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j) d[i * n + j] = distance(pts[std::min(i, j)], pts[std::max(i, j)], metric);
      }
    }
  });
  return d;
}

/// Distance from each point to its k-th nearest other point, sorted descending.
inline std::vector<double> k_distance_curve(const std::vector<std::vector<double>>& pts, std::size_t k,
                                            Metric metric = Metric::Euclidean, std::size_t threads = 1) {
  if (k == 0) throw ConfigError("k must be positive");
  if (pts.size() < k + 1) {
    throw DataError("k-distance needs at least " + std::to_string(k + 1) + " points, got " + std::to_string(pts.size()));
  }
  const std::size_t n = pts.size();
  const auto d = distance_matrix(pts, metric, threads);
  std::vector<double> curve(n);
  std::vector<double> row;
  for (std::size_t i = 0; i < n; ++i) {
    row.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) row.push_back(d[i * n + j]);
    }
    std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k - 1), row.end());
    curve[i] = row[k - 1];
  }
  std::sort(curve.begin(), curve.end(), std::greater<>());
  return curve;
}

/// Elbow of the descending k-distance curve: the point with the largest discrete
/// second difference (first one on ties).
inline double elbow_of(const std::vector<double>& curve) {
  if (curve.empty()) throw ContractViolation("empty k-distance curve");
  if (curve.size() < 3) return curve.back();
  std::size_t best = 1;
  double best_d2 = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
    const double d2 = curve[i - 1] - 2.0 * curve[i] + curve[i + 1];
    if (d2 > best_d2) {
      best_d2 = d2;
      best = i;
    }
  }
  return curve[best];
}

inline double select_eps(const std::vector<std::vector<double>>& pts, std::size_t k, Metric metric = Metric::Euclidean) {
  return elbow_of(k_distance_curve(pts, k, metric));
}

inline void write_k_distance_csv(std::ostream& out, const std::vector<double>& curve) {
  out << "rank,k_distance\n";
  for (std::size_t i = 0; i < curve.size(); ++i) out << i << ',' << detail::format_double(curve[i]) << '\n';
}

inline constexpr int kNoise = -1;

/// Labels per input point (kNoise for noise). Clusters are numbered in discovery order
/// and border points join the first cluster that reaches them.
inline std::vector<int> dbscan(const std::vector<std::vector<double>>& pts, double eps, std::size_t min_pts,
                               Metric metric = Metric::Euclidean, std::size_t threads = 1) {
  if (!(eps >= 0.0)) throw ConfigError("eps must be nonnegative");
  if (min_pts < 1) throw ConfigError("min_pts must be at least 1");
  const std::size_t n = pts.size();
  const auto d = distance_matrix(pts, metric, threads);
  std::vector<std::vector<std::size_t>> neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (d[i * n + j] <= eps) neighbors[i].push_back(j);
    }
  }
  constexpr int kUnvisited = -2;
  std::vector<int> labels(n, kUnvisited);
  int next = 0;
  std::vector<std::size_t> frontier;
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] != kUnvisited) continue;
    if (neighbors[i].size() < min_pts) {
      labels[i] = kNoise;
      continue;
    }
    const int id = next++;
    labels[i] = id;
    frontier.assign(neighbors[i].begin(), neighbors[i].end());
    for (std::size_t q = 0; q < frontier.size(); ++q) {
      const std::size_t j = frontier[q];
      if (labels[j] == kNoise) labels[j] = id;
      if (labels[j] != kUnvisited) continue;
      labels[j] = id;
      if (neighbors[j].size() >= min_pts) frontier.insert(frontier.end(), neighbors[j].begin(), neighbors[j].end());
    }
  }
  return labels;
}

struct VoiceClustering {
  double eps = 0.0;
  std::vector<double> k_distances;
  std::vector<int> labels;

  std::size_t cluster_count() const {
    int top = -1;
    for (int l : labels) top = std::max(top, l);
    return static_cast<std::size_t>(top + 1);
  }
};

struct VoiceClusterOptions {
  std::size_t min_pts = 5;
  double eps = -1.0;  // negative: choose from the k-distance elbow with k = min_pts - 1
  Metric metric = Metric::Euclidean;
  std::size_t threads = 1;
};

inline VoiceClustering cluster_voiceprints(const std::vector<std::vector<double>>& prints, const VoiceClusterOptions& opts = {}) {
  VoiceClustering out;
  if (opts.min_pts < 2 && opts.eps < 0.0) throw ConfigError("automatic eps needs min_pts >= 2");
  if (opts.eps < 0.0) {
    out.k_distances = k_distance_curve(prints, opts.min_pts - 1, opts.metric, opts.threads);
    out.eps = elbow_of(out.k_distances);
  } else {
    out.eps = opts.eps;
  }
  out.labels = dbscan(prints, out.eps, opts.min_pts, opts.metric, opts.threads);
  return out;
}

}  // namespace cibnet
