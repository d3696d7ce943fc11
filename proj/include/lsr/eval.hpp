#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lsr/index.hpp"
#include "lsr/search.hpp"
#include "lsr/sparse_vector.hpp"

namespace lsr {

/// Relevance judgments. Duplicate (query, doc) pairs are rejected.
class QRels {
  public:
    void add(const std::string& query_id, const std::string& doc_id, int relevance);

    /// Standard TREC format: "qid 0 docid rel", whitespace separated.
    static QRels read(const std::filesystem::path& path);

    /// Docs with relevance > 0 for the query; empty set when none.
    std::unordered_set<std::string> relevant_docs(const std::string& query_id) const;

    /// True when the query has at least one relevant (rel > 0) document.
    bool has_relevant(const std::string& query_id) const;

    std::size_t num_queries() const { return by_query_.size(); }

  private:
    std::unordered_map<std::string, std::unordered_map<std::string, int>> by_query_;
};

/// Mean over the relevant documents of precision at each relevant hit's rank;
/// unretrieved relevant docs contribute 0. The relevant set must be
/// non-empty; duplicate doc ids in the ranking are rejected.
double average_precision(std::span<const std::string> ranked,
                         const std::unordered_set<std::string>& relevant);

/// Unweighted mean of per-query AP over the run's queries. Every run query
/// must have at least one relevant document in the qrels.
double mean_average_precision(
    std::span<const std::pair<std::string, std::vector<std::string>>> run,
    const QRels& qrels);

struct ThroughputResult {
    double queries_per_second = 0.0;
    double elapsed_seconds = 0.0;
    std::size_t queries = 0;
    // Set when the batch finished below the clock's resolution; the reported
    // rate is then a lower bound rather than a measurement.
    bool lower_bound = false;
};

/// Turns a raw (count, elapsed) measurement into a rate. An elapsed time
/// below the monotonic clock's resolution yields a finite lower-bound rate
/// with the flag set.
ThroughputResult make_throughput_result(std::size_t queries, double elapsed_seconds);

/// Runs `warmup` untimed searches, then times the whole batch single-threaded
/// on a monotonic clock. Queries go through the regular search path.
ThroughputResult measure_throughput(const ImpactIndex& index,
                                    std::span<const SparseVector> queries,
                                    const SearchConfig& cfg, int warmup = 10);

struct TermCountStats {
    std::map<std::uint32_t, std::size_t> histogram;  // bucket lower bound -> count
    double mean = 0.0;
    std::size_t count = 0;
    std::uint32_t bucket_width = 1;
};

/// Distribution of nnz over a batch of (masked) vectors.
TermCountStats term_count_distribution(std::span<const SparseVector> vectors,
                                       std::uint32_t bucket_width = 1);

struct EvalReport {
    double map = 0.0;
    std::vector<std::pair<std::string, double>> per_query_ap;  // run order
    double queries_per_second = 0.0;
    double mean_terms_selected = 0.0;
    TermCountStats term_counts;
};

void write_report_csv(const EvalReport& report, std::ostream& out);
void write_report_json(const EvalReport& report, const std::filesystem::path& path);

}  // namespace lsr
