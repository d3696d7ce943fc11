#include "lsr/encoder.hpp"

#include <omp.h>

#include <cmath>
#include <string>

#include "lsr/error.hpp"
#include "lsr/rng.hpp"

namespace lsr {

namespace {

constexpr double kLayerNormEpsilon = 1e-5;

void fill_pm1(SplitMix64& rng, std::vector<double>& out, std::size_t n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out[i] = rng.next_pm1();
    }
}

}  // namespace

HeadParams HeadParams::generate(std::uint32_t hidden_dim, std::uint32_t vocab_size,
                                std::uint64_t seed) {
    if (hidden_dim < 2) {
        throw ConfigError("head params: hidden_dim must be >= 2");
    }
    if (vocab_size == 0) {
        throw ConfigError("head params: vocab_size must be positive");
    }
    HeadParams params;
    params.hidden_dim = hidden_dim;
    params.vocab_size = vocab_size;
    params.seed = seed;
    SplitMix64 rng(seed);
    const std::size_t h = hidden_dim;
    const std::size_t v = vocab_size;
    fill_pm1(rng, params.linear_weights, h * h);
    fill_pm1(rng, params.linear_bias, h);
    fill_pm1(rng, params.ln_gain, h);
    fill_pm1(rng, params.ln_bias, h);
    fill_pm1(rng, params.embeddings, v * h);
    fill_pm1(rng, params.vocab_bias, v);
    return params;
}

double gelu(double x) {
    return x * 0.5 * (1.0 + std::erf(x / std::sqrt(2.0)));
}

std::vector<double> layer_norm(std::span<const double> row,
                               std::span<const double> gain,
                               std::span<const double> bias) {
    if (row.size() != gain.size() || row.size() != bias.size()) {
        throw DataError("layer_norm: length mismatch");
    }
    if (row.size() < 2) {
        throw DataError("layer_norm: need at least 2 elements");
    }
    const double n = static_cast<double>(row.size());
    double mean = 0.0;
    for (double x : row) {
        mean += x;
    }
    mean /= n;
    double var = 0.0;
    for (double x : row) {
        var += (x - mean) * (x - mean);
    }
    var /= n;  // population variance
    const double inv = 1.0 / std::sqrt(var + kLayerNormEpsilon);
    std::vector<double> out(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
        out[i] = gain[i] * (row[i] - mean) * inv + bias[i];
    }
    return out;
}

std::vector<double> term_importance_row(std::span<const double> hidden,
                                  const HeadParams& params) {
    const std::size_t h = params.hidden_dim;
    if (hidden.size() != h) {
        throw DataError("term_importance_row: hidden state has " +
                        std::to_string(hidden.size()) + " entries, expected " +
                        std::to_string(h));
    }
    // LinearLayer
    std::vector<double> projected(h);
    for (std::size_t i = 0; i < h; ++i) {
        double sum = params.linear_bias[i];
        const double* w = params.linear_weights.data() + i * h;
        for (std::size_t j = 0; j < h; ++j) {
            sum += w[j] * hidden[j];
        }
        projected[i] = sum;
    }
    // GeLU
    for (double& x : projected) {
        x = gelu(x);
    }
    // LayerNorm
    std::vector<double> transformed = layer_norm(projected, params.ln_gain, params.ln_bias);
    // Project onto every vocabulary embedding.
    std::vector<double> logits(params.vocab_size);
    for (std::size_t j = 0; j < params.vocab_size; ++j) {
        const double* e = params.embeddings.data() + j * h;
        double sum = params.vocab_bias[j];
        for (std::size_t d = 0; d < h; ++d) {
            sum += transformed[d] * e[d];
        }
        logits[j] = sum;
    }
    return logits;
}

SparseVector aggregate(std::span<const std::vector<double>> rows,
                       std::uint32_t vocab_size) {
    if (rows.empty()) {
        throw DataError("aggregate: need at least one row");
    }
    std::vector<double> sums(vocab_size, 0.0);
    for (const auto& row : rows) {
        if (row.size() != vocab_size) {
            throw DataError("aggregate: row length does not match vocab size");
        }
        for (std::size_t j = 0; j < vocab_size; ++j) {
            if (row[j] > 0.0) {
                sums[j] += std::log1p(row[j]);
            }
        }
    }
    std::vector<Entry> entries;
    for (std::uint32_t j = 0; j < vocab_size; ++j) {
        if (sums[j] > 0.0) {
            entries.push_back({j, sums[j]});
        }
    }
    return SparseVector::from_sorted_unchecked(vocab_size, std::move(entries));
}

std::vector<double> token_state(TermId token, const HeadParams& params) {
    // Keyed stream: mix the token id into the seed, then draw hidden_dim
    // values. The +1 keeps token 0 from collapsing onto the raw seed.
    SplitMix64 rng(params.seed ^
                   (0x9E3779B97F4A7C15ULL * (static_cast<std::uint64_t>(token) + 1)));
    std::vector<double> state(params.hidden_dim);
    for (auto& x : state) {
        x = rng.next_pm1();
    }
    return state;
}

SparseVector encode(std::span<const TermId> tokens, const HeadParams& params,
                    const MaskConfig& mask) {
    if (tokens.empty()) {
        throw DataError("encode: empty token sequence");
    }
    for (TermId t : tokens) {
        if (t >= params.vocab_size) {
            throw DataError("encode: token id " + std::to_string(t) +
                            " out of range for vocab size " +
                            std::to_string(params.vocab_size));
        }
    }
    // Accumulate log1p(relu(.)) per term directly; row order matches
    // aggregate() so the two paths agree exactly.
    std::vector<double> sums(params.vocab_size, 0.0);
    for (TermId t : tokens) {
        std::vector<double> state = token_state(t, params);
        std::vector<double> logits = term_importance_row(state, params);
        for (std::size_t j = 0; j < logits.size(); ++j) {
            if (logits[j] > 0.0) {
                sums[j] += std::log1p(logits[j]);
            }
        }
    }
    std::vector<Entry> entries;
    for (std::uint32_t j = 0; j < params.vocab_size; ++j) {
        if (sums[j] > 0.0) {
            entries.push_back({j, sums[j]});
        }
    }
    auto vec = SparseVector::from_sorted_unchecked(params.vocab_size, std::move(entries));
    return apply_mask(vec, mask);
}

std::vector<SparseVector> encode_batch(std::span<const std::vector<TermId>> token_seqs,
                                       const HeadParams& params,
                                       const MaskConfig& mask) {
    std::vector<SparseVector> out(token_seqs.size());
    for (std::size_t i = 0; i < token_seqs.size(); ++i) {
        out[i] = encode(token_seqs[i], params, mask);
    }
    return out;
}

std::vector<SparseVector> encode_batch_omp(std::span<const std::vector<TermId>> token_seqs,
                                           const HeadParams& params,
                                           const MaskConfig& mask, int threads) {
    std::vector<SparseVector> out(token_seqs.size());
    if (threads <= 0) {
        threads = omp_get_max_threads();
    }
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(token_seqs.size()); ++i) {
        out[i] = encode(token_seqs[i], params, mask);
    }
    return out;
}

}  // namespace lsr
