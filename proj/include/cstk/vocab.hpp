// cstk/vocab.hpp
//
// Copyright (c)  2026  The cstk authors
#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "cstk/common.hpp"

namespace cstk {

// Blank-free label id sequence; ids lie in [1, V].
using LabelSequence = std::vector<int>;

inline constexpr int kBlankId = 0;
inline constexpr const char* kBlankToken = "<blank>";

// Bijective id <-> token table with contiguous ids 0..V; id 0 is blank.
class Vocabulary {
 public:
  Vocabulary() { add(kBlankToken); }

  explicit Vocabulary(const std::vector<std::string>& tokens) {
    add(kBlankToken);
    for (const auto& t : tokens) add(t);
  }

  int add(const std::string& token) {
    if (token.empty()) throw UsageError("empty vocabulary token");
    auto it = to_id_.find(token);
    if (it != to_id_.end()) return it->second;
    const int id = static_cast<int>(tokens_.size());
    tokens_.push_back(token);
    to_id_.emplace(token, id);
    return id;
  }

  // Number of non-blank labels V (ids run 0..V).
  int num_labels() const { return static_cast<int>(tokens_.size()) - 1; }
  int size() const { return static_cast<int>(tokens_.size()); }

  bool contains(const std::string& token) const { return to_id_.count(token) > 0; }

  int id(const std::string& token) const {
    auto it = to_id_.find(token);
    if (it == to_id_.end()) throw UsageError("token not in vocabulary: " + token);
    return it->second;
  }

  const std::string& token(int id) const {
    if (id < 0 || id >= size())
      throw UsageError("label id out of range: " + std::to_string(id));
    return tokens_[static_cast<std::size_t>(id)];
  }

  std::string labels_to_string(const LabelSequence& labels) const {
    std::string out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (i) out += ' ';
      out += token(labels[i]);
    }
    return out;
  }

  LabelSequence parse_labels(const std::string& line) const {
    LabelSequence labels;
    std::istringstream iss(line);
    std::string tok;
    while (iss >> tok) {
      const int v = id(tok);
      if (v == kBlankId) throw UsageError("blank token in label sequence");
      labels.push_back(v);
    }
    return labels;
  }

  // One "token<TAB>id" line per entry.
  void save(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw FormatError("cannot open vocabulary for writing: " + path);
    for (int i = 0; i < size(); ++i) os << tokens_[static_cast<std::size_t>(i)] << '\t' << i << '\n';
  }

  static Vocabulary load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw FormatError("cannot open vocabulary: " + path);
    std::vector<std::string> by_id;
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto tab = line.find('\t');
      if (tab == std::string::npos) throw FormatError("vocabulary line missing tab: " + line);
      const std::string tok = line.substr(0, tab);
      int id = 0;
      try {
        id = std::stoi(line.substr(tab + 1));
      } catch (const std::exception&) {
        throw FormatError("bad vocabulary id in line: " + line);
      }
      if (id != static_cast<int>(by_id.size()))
        throw FormatError("vocabulary ids must be contiguous from 0");
      by_id.push_back(tok);
    }
    if (by_id.empty() || by_id[0] != kBlankToken)
      throw FormatError("vocabulary must start with <blank> at id 0");
    Vocabulary v;
    for (std::size_t i = 1; i < by_id.size(); ++i) {
      if (v.contains(by_id[i])) throw FormatError("duplicate vocabulary token: " + by_id[i]);
      v.add(by_id[i]);
    }
    return v;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> to_id_;
};

inline void validate_labels(const LabelSequence& labels, int vocab_labels) {
  for (int v : labels)
    if (v < 1 || v > vocab_labels)
      throw UsageError("label id out of range: " + std::to_string(v));
}

// Labels file: one utterance per line, space-separated token strings.
inline void write_label_file(const std::string& path,
                             const std::vector<LabelSequence>& utts,
                             const Vocabulary& vocab) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open label file for writing: " + path);
  for (const auto& labels : utts) os << vocab.labels_to_string(labels) << '\n';
}

inline std::vector<LabelSequence> read_label_file(const std::string& path,
                                                  const Vocabulary& vocab) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open label file: " + path);
  std::vector<LabelSequence> utts;
  std::string line;
  while (std::getline(is, line)) utts.push_back(vocab.parse_labels(line));
  return utts;
}

}  // namespace cstk
