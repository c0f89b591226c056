// cstk/synthetic.hpp
//
// Copyright (c)  2026  The cstk authors
//
// Desk-scale synthetic transcription task: every label id owns a fixed
// seeded prototype of L frames; an utterance is the concatenation of its
// labels' prototypes plus i.i.d. Gaussian noise.  With zero noise the task
// is learnable to zero error by construction.
#pragma once

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "cstk/common.hpp"
#include "cstk/features.hpp"
#include "cstk/rng.hpp"
#include "cstk/vocab.hpp"

namespace cstk {

struct SyntheticTaskSpec {
  int vocab_size = 8;       // V
  int frames_per_label = 8; // L
  int feature_dim = 16;     // D
  double noise_stddev = 0.05;
  std::uint64_t seed = 1234;

  void validate() const {
    if (vocab_size < 2) throw UsageError("synthetic task needs V >= 2");
    if (frames_per_label < 2) throw UsageError("synthetic task needs L >= 2");
    if (feature_dim < 1) throw UsageError("synthetic task needs D >= 1");
    if (noise_stddev < 0) throw UsageError("noise stddev must be >= 0");
  }
};

struct Utterance {
  std::string id;
  FeatureSequence features;
  LabelSequence labels;
};

struct Corpus {
  Vocabulary vocab;
  std::vector<Utterance> utterances;
};

namespace detail {
inline constexpr std::uint64_t kPrototypeSalt = 0x70726f746fULL;  // "proto"
inline constexpr std::uint64_t kUtteranceSalt = 0x757474ULL;      // "utt"
}  // namespace detail

// The fixed L x D prototype for one label id; a function of the task seed only.
inline Tensor<float> label_prototype(const SyntheticTaskSpec& spec, int label) {
  spec.validate();
  if (label < 1 || label > spec.vocab_size)
    throw UsageError("prototype label out of range");
  Rng rng = Rng(spec.seed).fork(detail::kPrototypeSalt + static_cast<std::uint64_t>(label));
  Tensor<float> proto({spec.frames_per_label, spec.feature_dim});
  for (std::size_t i = 0; i < proto.numel(); ++i)
    proto.data()[i] = static_cast<float>(rng.normal());
  return proto;
}

// Concatenated prototypes plus noise drawn from the supplied stream.
inline FeatureSequence features_for_labels(const SyntheticTaskSpec& spec,
                                           const LabelSequence& labels,
                                           Rng& noise_rng) {
  spec.validate();
  if (labels.empty()) throw UsageError("cannot synthesize an empty utterance");
  validate_labels(labels, spec.vocab_size);
  const int l = spec.frames_per_label, d = spec.feature_dim;
  FeatureSequence fs;
  fs.frames = Tensor<float>({static_cast<int>(labels.size()) * l, d});
  int row = 0;
  for (int label : labels) {
    Tensor<float> proto = label_prototype(spec, label);
    for (int i = 0; i < l; ++i, ++row)
      for (int j = 0; j < d; ++j)
        fs.frames.at(row, j) =
            proto.at(i, j) +
            static_cast<float>(noise_rng.normal(0.0, spec.noise_stddev));
  }
  return fs;
}

inline Vocabulary synthetic_vocabulary(const SyntheticTaskSpec& spec) {
  std::vector<std::string> tokens;
  for (int i = 1; i <= spec.vocab_size; ++i) tokens.push_back("t" + std::to_string(i));
  return Vocabulary(tokens);
}

// Deterministic given spec.seed: utterance u draws from an independent
// forked stream, so corpora are stable under changes to num_utts.
inline Corpus generate_synthetic(const SyntheticTaskSpec& spec, int num_utts,
                                 int min_len, int max_len) {
  spec.validate();
  if (num_utts < 1) throw UsageError("need at least one utterance");
  if (!(1 <= min_len && min_len <= max_len))
    throw UsageError("need 1 <= min_len <= max_len");
  Corpus corpus;
  corpus.vocab = synthetic_vocabulary(spec);
  Rng master(spec.seed);
  for (int u = 0; u < num_utts; ++u) {
    Rng rng = master.fork(detail::kUtteranceSalt + static_cast<std::uint64_t>(u));
    const int len = static_cast<int>(rng.uniform_int(min_len, max_len));
    LabelSequence labels;
    for (int i = 0; i < len; ++i)
      labels.push_back(static_cast<int>(rng.uniform_int(1, spec.vocab_size)));
    Utterance utt;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "utt_%06d", u);
    utt.id = buf;
    utt.labels = labels;
    utt.features = features_for_labels(spec, labels, rng);
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

// On-disk corpus layout: DIR/vocab.txt, DIR/labels.txt, DIR/feats/<id>.feat.
inline void save_corpus(const Corpus& corpus, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "feats");
  corpus.vocab.save((fs::path(dir) / "vocab.txt").string());
  std::vector<LabelSequence> labels;
  for (const auto& u : corpus.utterances) {
    labels.push_back(u.labels);
    write_features((fs::path(dir) / "feats" / (u.id + ".feat")).string(),
                   u.features);
  }
  write_label_file((fs::path(dir) / "labels.txt").string(), labels, corpus.vocab);
}

inline Corpus load_corpus(const std::string& dir) {
  namespace fs = std::filesystem;
  Corpus corpus;
  corpus.vocab = Vocabulary::load((fs::path(dir) / "vocab.txt").string());
  auto labels = read_label_file((fs::path(dir) / "labels.txt").string(), corpus.vocab);
  for (std::size_t u = 0; u < labels.size(); ++u) {
    Utterance utt;
    char buf[32];
    std::snprintf(buf, sizeof(buf), "utt_%06zu", u);
    utt.id = buf;
    utt.labels = labels[u];
    utt.features =
        read_features((fs::path(dir) / "feats" / (utt.id + ".feat")).string());
    corpus.utterances.push_back(std::move(utt));
  }
  return corpus;
}

// Deterministic shuffled batching: the epoch permutation is a pure function
// of (shuffle_seed, epoch).
class BatchIterator {
 public:
  BatchIterator(std::size_t corpus_size, int batch_size, std::uint64_t shuffle_seed)
      : corpus_size_(corpus_size), batch_size_(batch_size), seed_(shuffle_seed) {
    if (batch_size < 1) throw UsageError("batch size must be >= 1");
    if (corpus_size == 0) throw UsageError("empty corpus");
    reshuffle();
  }

  // Indices of the next batch; rolls into a freshly shuffled epoch when
  // the current one is exhausted.
  std::vector<std::size_t> next() {
    std::vector<std::size_t> batch;
    while (static_cast<int>(batch.size()) < batch_size_) {
      if (cursor_ == perm_.size()) {
        ++epoch_;
        reshuffle();
      }
      batch.push_back(perm_[cursor_++]);
    }
    return batch;
  }

  std::size_t epoch() const { return epoch_; }

 private:
  void reshuffle() {
    perm_.resize(corpus_size_);
    for (std::size_t i = 0; i < corpus_size_; ++i) perm_[i] = i;
    Rng rng = Rng(seed_).fork(epoch_);
    for (std::size_t i = corpus_size_; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(
          rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(perm_[i - 1], perm_[j]);
    }
    cursor_ = 0;
  }

  std::size_t corpus_size_;
  int batch_size_;
  std::uint64_t seed_;
  std::size_t epoch_ = 0;
  std::size_t cursor_ = 0;
  std::vector<std::size_t> perm_;
};

}  // namespace cstk
