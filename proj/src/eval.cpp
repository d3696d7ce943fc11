#include "lsr/eval.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

#include "lsr/error.hpp"
#include "lsr/format.hpp"

namespace lsr {

namespace {

using Clock = std::chrono::steady_clock;

constexpr double kClockTickSeconds =
    static_cast<double>(Clock::period::num) / static_cast<double>(Clock::period::den);

}  // namespace

void QRels::add(const std::string& query_id, const std::string& doc_id, int relevance) {
    auto [it, inserted] = by_query_[query_id].emplace(doc_id, relevance);
    if (!inserted) {
        throw DataError("qrels: duplicate judgment for (" + query_id + ", " +
                        doc_id + ")");
    }
}

QRels QRels::read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    QRels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid, zero, docid;
        int rel = 0;
        if (!(fields >> qid >> zero >> docid >> rel)) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": expected 'qid 0 docid rel'");
        }
        try {
            qrels.add(qid, docid, rel);
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": " +
                            e.what());
        }
    }
    return qrels;
}

std::unordered_set<std::string> QRels::relevant_docs(const std::string& query_id) const {
    std::unordered_set<std::string> docs;
    auto it = by_query_.find(query_id);
    if (it == by_query_.end()) {
        return docs;
    }
    for (const auto& [doc_id, rel] : it->second) {
        if (rel > 0) {
            docs.insert(doc_id);
        }
    }
    return docs;
}

bool QRels::has_relevant(const std::string& query_id) const {
    auto it = by_query_.find(query_id);
    if (it == by_query_.end()) {
        return false;
    }
    for (const auto& [doc_id, rel] : it->second) {
        if (rel > 0) {
            return true;
        }
    }
    return false;
}

double average_precision(std::span<const std::string> ranked,
                         const std::unordered_set<std::string>& relevant) {
    if (relevant.empty()) {
        throw DataError("average_precision: empty relevant set");
    }
    std::unordered_set<std::string> seen;
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (!seen.insert(ranked[i]).second) {
            throw DataError("average_precision: duplicate doc id '" + ranked[i] +
                            "' in ranking");
        }
        if (relevant.contains(ranked[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double mean_average_precision(
    std::span<const std::pair<std::string, std::vector<std::string>>> run,
    const QRels& qrels) {
    if (run.empty()) {
        throw DataError("mean_average_precision: empty run");
    }
    double sum = 0.0;
    for (const auto& [query_id, ranked] : run) {
        auto relevant = qrels.relevant_docs(query_id);
        if (relevant.empty()) {
            throw DataError("mean_average_precision: query '" + query_id +
                            "' has no relevant documents in the qrels");
        }
        sum += average_precision(ranked, relevant);
    }
    return sum / static_cast<double>(run.size());
}

ThroughputResult make_throughput_result(std::size_t queries, double elapsed_seconds) {
    ThroughputResult result;
    result.queries = queries;
    result.elapsed_seconds = elapsed_seconds;
    if (result.elapsed_seconds < kClockTickSeconds) {
        // Batch finished inside one clock tick; report a bounded rate.
        result.lower_bound = true;
        result.elapsed_seconds = kClockTickSeconds;
    }
    result.queries_per_second =
        static_cast<double>(result.queries) / result.elapsed_seconds;
    return result;
}

ThroughputResult measure_throughput(const ImpactIndex& index,
                                    std::span<const SparseVector> queries,
                                    const SearchConfig& cfg, int warmup) {
    if (queries.empty()) {
        throw DataError("measure_throughput: need at least one query");
    }
    for (int i = 0; i < warmup; ++i) {
        (void)search(index, queries[static_cast<std::size_t>(i) % queries.size()], cfg);
    }
    const auto started = Clock::now();
    for (const SparseVector& q : queries) {
        (void)search(index, q, cfg);
    }
    const auto stopped = Clock::now();
    return make_throughput_result(
        queries.size(), std::chrono::duration<double>(stopped - started).count());
}

TermCountStats term_count_distribution(std::span<const SparseVector> vectors,
                                       std::uint32_t bucket_width) {
    if (bucket_width == 0) {
        throw ConfigError("term_count_distribution: bucket width must be >= 1");
    }
    TermCountStats stats;
    stats.bucket_width = bucket_width;
    stats.count = vectors.size();
    double sum = 0.0;
    for (const SparseVector& v : vectors) {
        const auto nnz = static_cast<std::uint32_t>(v.nnz());
        sum += static_cast<double>(nnz);
        stats.histogram[(nnz / bucket_width) * bucket_width] += 1;
    }
    stats.mean = vectors.empty() ? 0.0 : sum / static_cast<double>(vectors.size());
    return stats;
}

void write_report_csv(const EvalReport& report, std::ostream& out) {
    out << "map,queries_per_second,mean_terms_selected,queries\n";
    out << format_double(report.map) << ',' << format_double(report.queries_per_second)
        << ',' << format_double(report.mean_terms_selected) << ','
        << report.per_query_ap.size() << '\n';
}

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    nlohmann::ordered_json detail;
    detail["map"] = report.map;
    detail["queries_per_second"] = report.queries_per_second;
    detail["mean_terms_selected"] = report.mean_terms_selected;
    nlohmann::ordered_json per_query = nlohmann::ordered_json::object();
    for (const auto& [qid, ap] : report.per_query_ap) {
        per_query[qid] = ap;
    }
    detail["per_query_ap"] = std::move(per_query);
    nlohmann::ordered_json hist = nlohmann::ordered_json::object();
    for (const auto& [bucket, count] : report.term_counts.histogram) {
        hist[std::to_string(bucket)] = count;
    }
    detail["term_count_histogram"] = std::move(hist);
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    out << detail.dump(2) << '\n';
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

}  // namespace lsr
