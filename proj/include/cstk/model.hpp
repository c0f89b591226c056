// cstk/model.hpp
//
// Copyright (c)  2026  The cstk authors
//
// The three transducer networks.  The encoder runs on spliced chunk inputs
// (or whole utterances), with rows that came from context frames eliminated
// after the final block so the joiner only ever sees core frames.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cstk/chunking.hpp"
#include "cstk/layers.hpp"
#include "cstk/ops.hpp"
#include "cstk/param_store.hpp"
#include "cstk/vocab.hpp"

namespace cstk {

struct ModelConfig {
  int vocab_size = 8;   // V, labels excluding blank
  int feature_dim = 16; // D
  int enc_layers = 2;
  int enc_dim = 64;
  int enc_heads = 4;
  int enc_ffn = 256;
  int subsample = 2;
  int pred_hidden = 64;
  int join_hidden = 64;

  void validate() const {
    if (vocab_size < 1) throw UsageError("vocab_size must be >= 1");
    if (feature_dim < 1) throw UsageError("feature_dim must be >= 1");
    if (enc_layers < 1 || enc_dim < 1 || enc_heads < 1 || enc_ffn < 1 ||
        pred_hidden < 1 || join_hidden < 1)
      throw UsageError("model dims must be positive");
    if (subsample != 1 && subsample != 2 && subsample != 4)
      throw UsageError("subsample factor must be 1, 2, or 4");
    if (enc_dim % enc_heads != 0)
      throw UsageError("enc_dim must be divisible by enc_heads");
  }
};

inline constexpr int kStartOfSequence = -1;

template <typename Real>
class TransducerModel {
 public:
  struct PredictorState {
    Tensor<Real> hidden;  // [1 x pred_hidden]
  };

  TransducerModel() = default;

  TransducerModel(const ModelConfig& cfg, ParamStore<Real>& ps, Rng& rng)
      : cfg_(cfg) {
    cfg.validate();
    in_proj_ = Linear<Real>::create(ps, "enc.in_proj",
                                    cfg.feature_dim * cfg.subsample, cfg.enc_dim,
                                    rng);
    for (int l = 0; l < cfg.enc_layers; ++l)
      blocks_.push_back(AttentionBlock<Real>::create(
          ps, "enc.block" + std::to_string(l), cfg.enc_dim, cfg.enc_heads,
          cfg.enc_ffn, rng));
    enc_ln_ = LayerNorm<Real>::create(ps, "enc.ln_out", cfg.enc_dim);

    const Real eb = static_cast<Real>(1.0 / std::sqrt(static_cast<double>(cfg.pred_hidden)));
    embedding_ = ps.create_uniform("pred.embedding",
                                   {cfg.vocab_size + 1, cfg.pred_hidden}, eb, rng);
    pred_cell_ = GatedRecurrentCell<Real>::create(ps, "pred.gru", cfg.pred_hidden,
                                                  cfg.pred_hidden, rng);

    join_enc_ = Linear<Real>::create(ps, "join.enc", cfg.enc_dim, cfg.join_hidden, rng);
    join_pred_ = Linear<Real>::create(ps, "join.pred", cfg.pred_hidden,
                                      cfg.join_hidden, rng);
    join_out_ = Linear<Real>::create(ps, "join.out", cfg.join_hidden,
                                     cfg.vocab_size + 1, rng);
  }

  const ModelConfig& config() const { return cfg_; }

  int encoder_rows_for(int frames) const {
    return (frames + cfg_.subsample - 1) / cfg_.subsample;
  }

  // --- encoder ------------------------------------------------------------

  // Encodes one spliced chunk and drops rows attributable to context
  // frames; the result has ceil(core/subsample) rows.  Left context length
  // must be a multiple of the subsample factor so the frame-group grid
  // stays aligned with the core.
  Tensor<Real> encode_chunk(Tape<Real>* tape, const Splice<Real>& sp) const {
    if (sp.core_rows < 1)
      throw UsageError("encode_chunk: splice has no core frames");
    if (sp.left_rows % cfg_.subsample != 0)
      throw ShapeError(
          "encode_chunk: left context (" + std::to_string(sp.left_rows) +
          " frames) must be a multiple of the subsample factor " +
          std::to_string(cfg_.subsample));
    Tensor<Real> all = encode_rows(tape, sp.rows);
    const int first = sp.left_rows / cfg_.subsample;
    const int count = encoder_rows_for(sp.core_rows);
    return ops::slice_rows(tape, all, first, first + count);
  }

  // Full-context encoding: no chunking, no simulation.
  Tensor<Real> encode_full(Tape<Real>* tape, const Tensor<Real>& features) const {
    if (features.ndim() != 2 || features.dim(1) != cfg_.feature_dim)
      throw ShapeError("encode_full: features must be T x D");
    return encode_rows(tape, features);
  }

  // --- predictor ------------------------------------------------------------

  PredictorState initial_predictor_state() const {
    return PredictorState{pred_cell_.zero_state()};
  }

  // Advances the label encoder by one symbol.  `label` is a real label in
  // [1, V] or kStartOfSequence; blank never reaches the predictor.
  std::pair<Tensor<Real>, PredictorState> predict(Tape<Real>* tape,
                                                  const PredictorState& state,
                                                  int label) const {
    auto h = pred_cell_.step(tape, embed_label(tape, label), state.hidden);
    return {h, PredictorState{h}};
  }

  // Predictor outputs g_1..g_{U+1} for all label prefixes of y: row u is the
  // encoding of y_1..y_u (row 0 is the start-of-sequence output).
  Tensor<Real> predictor_outputs(Tape<Real>* tape, const LabelSequence& labels) const {
    std::vector<int> ids;
    ids.push_back(sos_row());
    for (int y : labels) {
      check_label(y);
      ids.push_back(y);
    }
    auto inputs = ops::embed_rows(tape, embedding_, ids);
    auto [hs, last] = pred_cell_.run(tape, inputs, pred_cell_.zero_state());
    (void)last;
    return hs;  // [(U+1) x pred_hidden]
  }

  // --- joiner ---------------------------------------------------------------

  Tensor<Real> project_encoder(Tape<Real>* tape, const Tensor<Real>& h) const {
    return join_enc_.forward(tape, h);
  }
  Tensor<Real> project_predictor(Tape<Real>* tape, const Tensor<Real>& g) const {
    return join_pred_.forward(tape, g);
  }

  // Joint log-distribution from already-projected inputs (both [N x J]).
  Tensor<Real> join_projected(Tape<Real>* tape, const Tensor<Real>& he,
                              const Tensor<Real>& ge) const {
    auto z = ops::tanh_op(tape, ops::add(tape, he, ge));
    return ops::log_softmax_rows(tape, join_out_.forward(tape, z));
  }

  // Log-distribution over V+1 symbols for one (h_t, g_u) pair.
  Tensor<Real> join(Tape<Real>* tape, const Tensor<Real>& h_row,
                    const Tensor<Real>& g_row) const {
    return join_projected(tape, project_encoder(tape, h_row),
                          project_predictor(tape, g_row));
  }

  // The full joint lattice: row t*(U+1)+u is the log-distribution at (t, u).
  Tensor<Real> join_grid(Tape<Real>* tape, const Tensor<Real>& enc_out,
                         const Tensor<Real>& pred_out) const {
    auto he = project_encoder(tape, enc_out);
    auto ge = project_predictor(tape, pred_out);
    auto z = ops::tanh_op(tape, ops::outer_add_rows(tape, he, ge));
    return ops::log_softmax_rows(tape, join_out_.forward(tape, z));
  }

 private:
  Tensor<Real> encode_rows(Tape<Real>* tape, const Tensor<Real>& frames) const {
    auto grouped = ops::group_rows(tape, frames, cfg_.subsample);
    auto x = in_proj_.forward(tape, grouped);
    x = ops::add(tape, x, sinusoidal_positions<Real>(x.dim(0), cfg_.enc_dim));
    for (const auto& b : blocks_) x = b.forward(tape, x);
    return enc_ln_.forward(tape, x);
  }

  int sos_row() const { return 0; }  // embedding row 0 backs the start marker

  void check_label(int label) const {
    if (label == kBlankId)
      throw UsageError("blank must not be fed to the predictor");
    if (label != kStartOfSequence && (label < 1 || label > cfg_.vocab_size))
      throw UsageError("label out of range: " + std::to_string(label));
  }

  Tensor<Real> embed_label(Tape<Real>* tape, int label) const {
    check_label(label);
    const int row = label == kStartOfSequence ? sos_row() : label;
    return ops::embed_rows(tape, embedding_, {row});
  }

  ModelConfig cfg_;
  Linear<Real> in_proj_;
  std::vector<AttentionBlock<Real>> blocks_;
  LayerNorm<Real> enc_ln_;
  Tensor<Real> embedding_;
  GatedRecurrentCell<Real> pred_cell_;
  Linear<Real> join_enc_, join_pred_, join_out_;
};

}  // namespace cstk
