#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "lsr/corpus.hpp"
#include "lsr/eval.hpp"
#include "lsr/mask.hpp"

namespace lsr {

enum class Pairing {
    kDiagonal,            // same config on documents and queries
    kCrossExcludingEqual  // all ordered (doc, query) pairs with doc != query
};

struct SweepSpec {
    std::vector<MaskConfig> doc_masks;
    std::vector<MaskConfig> query_masks;  // ignored for kDiagonal
    Pairing pairing = Pairing::kDiagonal;
};

/// Trial list in deterministic order: diagonal walks doc_masks; cross walks
/// doc_masks (outer) x query_masks (inner) skipping equal pairs. Over one
/// grid of n values the cross pairing yields n*(n-1) trials.
std::vector<std::pair<MaskConfig, MaskConfig>> expand_trials(const SweepSpec& spec);

struct SweepResult {
    MaskConfig doc_mask = MaskConfig::top_k(0);
    MaskConfig query_mask = MaskConfig::top_k(0);
    double map = 0.0;
    double queries_per_second = 0.0;
    double indexing_seconds = 0.0;
    std::size_t postings = 0;
    double mean_terms_docs = 0.0;
    double mean_terms_queries = 0.0;
    std::uint64_t seed = 0;
    std::string error;  // empty on success
};

struct SweepInputs {
    std::span<const VectorRecord> doc_vectors;
    std::span<const VectorRecord> query_vectors;  // unmasked
    const QRels* qrels = nullptr;
    std::uint32_t scale = 100;
    std::uint32_t depth = 1000;
    std::uint64_t seed = 0;   // provenance only, echoed into every row
    int warmup = 10;
    int index_threads = 1;    // parallel index builds; never affects timing of queries
};

/// One row per trial. Document indexes are cached per doc mask, so a cross
/// sweep over one grid builds each index once. A failing trial records its
/// error in the row and the sweep continues.
std::vector<SweepResult> run_sweep(const SweepInputs& inputs, const SweepSpec& spec);

/// Fixed, documented header:
/// doc_mask,query_mask,map,queries_per_second,indexing_seconds,postings,
/// mean_terms_docs,mean_terms_queries,seed,error
void write_sweep_csv(std::span<const SweepResult> results, std::ostream& out);

std::vector<SweepResult> read_sweep_csv(std::istream& in);

/// The nine p values swept diagonally and crossed for the 72-trial design.
std::vector<double> default_p_grid();

/// Five k ratios spanning 0.005..0.02 of the vocabulary, endpoints and the
/// 0.01 default included.
std::vector<std::uint32_t> default_k_grid(std::uint32_t vocab_size);

/// The matched comparison pair: top-k at floor(0.01 * vocab) vs top-p 0.98.
std::pair<MaskConfig, MaskConfig> reference_pair(std::uint32_t vocab_size);

}  // namespace lsr
