#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

#include "entrain/corpus/feature_cache.hpp"
#include "entrain/corpus/impute.hpp"
#include "entrain/corpus/load.hpp"
#include "entrain/dsp/mfcc.hpp"
#include "entrain/features/ems.hpp"
#include "entrain/features/intensity.hpp"
#include "entrain/features/ltas.hpp"
#include "entrain/features/mfcc_stats.hpp"
#include "entrain/features/names.hpp"
#include "entrain/features/phonation.hpp"

namespace entrain::features {

struct UtteranceFeatures {
  std::vector<double> values;  // 418 slots, NaN where missing
  std::vector<bool> missing;
};

inline UtteranceFeatures extract_utterance(std::span<const double> samples) {
  UtteranceFeatures f;
  f.values.reserve(kFeatureDims);
  const auto m = mfcc_statistics(dsp::mfcc(samples));
  f.values.insert(f.values.end(), m.values.begin(), m.values.end());
  const auto e = ems(samples);
  f.values.insert(f.values.end(), e.begin(), e.end());
  const auto l = ltas(samples);
  f.values.insert(f.values.end(), l.begin(), l.end());
  const auto p = phonation(samples);
  f.values.insert(f.values.end(), p.values.begin(), p.values.end());
  f.values.push_back(mean_intensity(samples));
  if (f.values.size() != kFeatureDims) throw NumericError("feature vector has the wrong length");
  f.missing.resize(kFeatureDims);
  for (std::size_t i = 0; i < kFeatureDims; ++i) f.missing[i] = !std::isfinite(f.values[i]);
  return f;
}

/// Runs `fn(i)` for i in [0, n) on up to `workers` threads. The first
/// exception thrown is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Raw (unimputed) features for every utterance, rows in utterance order.
inline Eigen::MatrixXd extract_raw(const corpus::LoadedConversation& conv, std::size_t workers = 1) {
  const auto& utts = conv.record.utterances;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(utts.size()), static_cast<Eigen::Index>(kFeatureDims));
  parallel_for(utts.size(), workers, [&](std::size_t i) {
    const auto samples = corpus::utterance_samples(conv.track_for(utts[i].speaker_id), utts[i]);
    const auto f = extract_utterance(samples);
    for (std::size_t j = 0; j < kFeatureDims; ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = f.values[j];
    }
  });
  return out;
}

/// Feature table for a conversation with missing slots imputed by the
/// conversation's column medians.
inline corpus::FeatureTable extract_all(const corpus::LoadedConversation& conv, std::size_t workers = 1) {
  corpus::FeatureTable t;
  t.names = feature_names();
  t.utterances = conv.record.utterances;
  t.values = corpus::impute_missing(extract_raw(conv, workers));
  return t;
}

}  // namespace entrain::features
