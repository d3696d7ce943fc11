#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lsr/mask.hpp"
#include "lsr/sparse_vector.hpp"

namespace lsr {

/// Parameters of the term-importance head: a hidden->hidden linear layer,
/// layer-norm gain/bias, per-vocabulary output embeddings and bias. All
/// values are drawn from a single SplitMix64 stream, so regeneration from
/// the same seed is bit-identical.
///
/// Generation order (uniform [-1, 1) each): linear_weights row-major,
/// linear_bias, ln_gain, ln_bias, embeddings row-major, vocab_bias.
struct HeadParams {
    std::uint32_t hidden_dim = 0;
    std::uint32_t vocab_size = 0;
    std::uint64_t seed = 0;
    std::vector<double> linear_weights;  // hidden_dim x hidden_dim
    std::vector<double> linear_bias;     // hidden_dim
    std::vector<double> ln_gain;         // hidden_dim
    std::vector<double> ln_bias;         // hidden_dim
    std::vector<double> embeddings;      // vocab_size x hidden_dim
    std::vector<double> vocab_bias;      // vocab_size

    /// hidden_dim must be >= 2, vocab_size >= 1.
    static HeadParams generate(std::uint32_t hidden_dim, std::uint32_t vocab_size,
                               std::uint64_t seed);
};

/// Exact GeLU, x * Phi(x), computed through erf. Not the tanh approximation.
double gelu(double x);

/// Layer normalization with population variance and epsilon 1e-5.
/// All three spans must have the same length >= 2.
std::vector<double> layer_norm(std::span<const double> row,
                               std::span<const double> gain,
                               std::span<const double> bias);

/// One row of term-importance logits: the transformed hidden state dotted
/// with every vocabulary embedding, plus the vocabulary bias. May contain
/// negatives; sparsification happens in aggregate().
std::vector<double> term_importance_row(std::span<const double> hidden,
                                  const HeadParams& params);

/// Per-term sum of log1p(relu(logit)) across rows. Terms whose sum is zero
/// are absent, so the result is a valid strictly-positive sparse vector.
SparseVector aggregate(std::span<const std::vector<double>> rows,
                       std::uint32_t vocab_size);

/// Deterministic stand-in for contextual token states: hidden_dim uniform
/// [-1, 1) values from a SplitMix64 stream keyed by (params.seed, token).
std::vector<double> token_state(TermId token, const HeadParams& params);

/// Full pipeline: token states -> per-token logits -> aggregation -> mask.
/// Rejects empty input and out-of-vocabulary tokens.
SparseVector encode(std::span<const TermId> tokens, const HeadParams& params,
                    const MaskConfig& mask);

/// Encodes a batch of token sequences; serial reference for encode_batch_omp.
std::vector<SparseVector> encode_batch(std::span<const std::vector<TermId>> token_seqs,
                                       const HeadParams& params,
                                       const MaskConfig& mask);

/// OpenMP variant; identical output to encode_batch.
std::vector<SparseVector> encode_batch_omp(std::span<const std::vector<TermId>> token_seqs,
                                           const HeadParams& params,
                                           const MaskConfig& mask,
                                           int threads = 0);

}  // namespace lsr
