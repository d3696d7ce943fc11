#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lsr/index.hpp"
#include "lsr/mask.hpp"
#include "lsr/sparse_vector.hpp"

namespace lsr {

struct ScoredDoc {
    std::string doc_id;
    std::int64_t score;   // integral: quantized impacts times quantized impacts
    std::uint32_t rank;   // 1-based

    friend bool operator==(const ScoredDoc&, const ScoredDoc&) = default;
};

struct SearchConfig {
    MaskConfig mask;        // query-side masking
    std::uint32_t depth = 1000;
};

/// Query after masking and quantization, ready for posting traversal.
using QuantizedQuery = std::vector<std::pair<TermId, std::uint16_t>>;

QuantizedQuery quantize_query(const SparseVector& masked, std::uint32_t scale);

/// Term-at-a-time accumulation over the query's posting lists. Passages with
/// no overlap are absent. Throws DataError when a query term id is out of
/// range for the index vocabulary.
std::vector<std::pair<std::uint32_t, std::int64_t>> score_passages(
    const ImpactIndex& index, const QuantizedQuery& query);

/// MaxP: document score = max over its passages' scores. Documents ordered by
/// (score desc, doc_id asc), ranks contiguous from 1.
std::vector<ScoredDoc> maxp_aggregate(
    std::span<const std::pair<std::uint32_t, std::int64_t>> passage_scores,
    const ImpactIndex& index);

/// mask -> quantize -> score_passages -> maxp_aggregate -> truncate to depth.
std::vector<ScoredDoc> search(const ImpactIndex& index, const SparseVector& query,
                              const SearchConfig& cfg);

struct QueryResult {
    std::string query_id;
    std::vector<ScoredDoc> docs;
};

/// TREC run format: "qid Q0 docid rank score tag", scores printed as
/// integers, queries in input order.
void write_run(std::span<const QueryResult> results, const std::string& tag,
               const std::filesystem::path& path);

/// Reads a run file back; per query, doc ids ordered by the rank column.
/// Duplicate (qid, docid) pairs are rejected.
std::vector<std::pair<std::string, std::vector<std::string>>> read_run(
    const std::filesystem::path& path);

}  // namespace lsr
