#include "lsr/search.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "lsr/error.hpp"

namespace lsr {

QuantizedQuery quantize_query(const SparseVector& masked, std::uint32_t scale) {
    QuantizedQuery q;
    q.reserve(masked.nnz());
    for (const Entry& e : masked.entries()) {
        q.emplace_back(e.term, quantize(e.weight, scale));
    }
    return q;
}

std::vector<std::pair<std::uint32_t, std::int64_t>> score_passages(
    const ImpactIndex& index, const QuantizedQuery& query) {
    std::vector<std::int64_t> acc(index.num_passages(), 0);
    std::vector<std::uint32_t> touched;
    for (const auto& [term, impact] : query) {
        if (term >= index.metadata().vocab_size) {
            throw DataError("search: query term id " + std::to_string(term) +
                            " out of range for index vocab size " +
                            std::to_string(index.metadata().vocab_size));
        }
        const std::vector<Posting>* list = index.postings_for(term);
        if (list == nullptr) {
            continue;
        }
        const auto q = static_cast<std::int64_t>(impact);
        for (const Posting& post : *list) {
            if (acc[post.passage_ref] == 0) {
                touched.push_back(post.passage_ref);
            }
            acc[post.passage_ref] += q * static_cast<std::int64_t>(post.impact);
        }
    }
    std::vector<std::pair<std::uint32_t, std::int64_t>> scores;
    scores.reserve(touched.size());
    for (std::uint32_t ref : touched) {
        scores.emplace_back(ref, acc[ref]);
    }
    return scores;
}

std::vector<ScoredDoc> maxp_aggregate(
    std::span<const std::pair<std::uint32_t, std::int64_t>> passage_scores,
    const ImpactIndex& index) {
    std::unordered_map<std::string, std::int64_t> best;
    for (const auto& [ref, score] : passage_scores) {
        if (ref >= index.num_passages()) {
            throw DataError("maxp: passage ref " + std::to_string(ref) +
                            " not in passage table");
        }
        const std::string& doc_id = index.passages()[ref].doc_id;
        auto [it, inserted] = best.emplace(doc_id, score);
        if (!inserted && score > it->second) {
            it->second = score;
        }
    }
    std::vector<ScoredDoc> docs;
    docs.reserve(best.size());
    for (auto& [doc_id, score] : best) {
        docs.push_back({doc_id, score, 0});
    }
    std::sort(docs.begin(), docs.end(), [](const ScoredDoc& a, const ScoredDoc& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.doc_id < b.doc_id;
    });
    for (std::size_t i = 0; i < docs.size(); ++i) {
        docs[i].rank = static_cast<std::uint32_t>(i + 1);
    }
    return docs;
}

std::vector<ScoredDoc> search(const ImpactIndex& index, const SparseVector& query,
                              const SearchConfig& cfg) {
    if (cfg.depth == 0) {
        throw ConfigError("search: depth must be >= 1");
    }
    SparseVector masked = apply_mask(query, cfg.mask);
    QuantizedQuery quantized = quantize_query(masked, index.metadata().scale);
    auto passage_scores = score_passages(index, quantized);
    auto docs = maxp_aggregate(passage_scores, index);
    if (docs.size() > cfg.depth) {
        docs.resize(cfg.depth);
    }
    return docs;
}

void write_run(std::span<const QueryResult> results, const std::string& tag,
               const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    for (const auto& result : results) {
        for (const ScoredDoc& doc : result.docs) {
            out << result.query_id << " Q0 " << doc.doc_id << ' ' << doc.rank
                << ' ' << doc.score << ' ' << tag << '\n';
        }
    }
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

std::vector<std::pair<std::string, std::vector<std::string>>> read_run(
    const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    // qid -> (rank -> docid), queries kept in first-seen order
    std::vector<std::string> order;
    std::unordered_map<std::string, std::map<std::uint32_t, std::string>> ranked;
    std::unordered_set<std::string> seen_pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::istringstream fields(line);
        std::string qid, q0, docid, tag;
        std::uint32_t rank = 0;
        std::int64_t score = 0;
        if (!(fields >> qid >> q0 >> docid >> rank >> score >> tag)) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": malformed run line");
        }
        if (!seen_pairs.insert(qid + " " + docid).second) {
            throw DataError(path.string() + ":" + std::to_string(line_no) +
                            ": duplicate document '" + docid + "' for query '" +
                            qid + "'");
        }
        if (ranked.find(qid) == ranked.end()) {
            order.push_back(qid);
        }
        ranked[qid][rank] = docid;
    }
    std::vector<std::pair<std::string, std::vector<std::string>>> out;
    out.reserve(order.size());
    for (const auto& qid : order) {
        std::vector<std::string> docs;
        docs.reserve(ranked[qid].size());
        for (auto& [rank, docid] : ranked[qid]) {
            docs.push_back(std::move(docid));
        }
        out.emplace_back(qid, std::move(docs));
    }
    return out;
}

}  // namespace lsr
