#pragma once

#include <cstdint>
#include <vector>

#include "lsr/corpus.hpp"
#include "lsr/eval.hpp"

namespace lsr {

/// Seeded generator for a synthetic retrieval collection: Zipf-weighted
/// document vectors, queries derived from document top terms plus noise, and
/// qrels marking each query's source document relevant.
///
/// Document weights decay slowly (long expansion-style vectors); query
/// weights decay steeply (mass concentrated on a few terms). Document sizes
/// are skewed toward the top of their range.
struct SyntheticSpec {
    std::uint32_t vocab_size = 12800;
    std::uint32_t num_docs = 1000;
    std::uint32_t num_queries = 50;
    std::uint32_t doc_nnz_min = 100;
    std::uint32_t doc_nnz_max = 400;
    std::uint32_t query_nnz_min = 5;
    std::uint32_t query_nnz_max = 30;
    double doc_zipf_exponent = 1.0;
    double query_zipf_exponent = 2.0;
    std::uint32_t max_passages_per_doc = 1;
    std::uint32_t query_noise_terms = 2;
    std::uint64_t seed = 42;
};

struct SyntheticCorpus {
    std::vector<VectorRecord> passages;  // ids "d<doc>#<ordinal>"
    std::vector<VectorRecord> queries;   // ids "q<n>"
    QRels qrels;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

}  // namespace lsr
