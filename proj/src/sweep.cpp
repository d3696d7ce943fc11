#include "lsr/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "lsr/error.hpp"
#include "lsr/format.hpp"
#include "lsr/index.hpp"
#include "lsr/search.hpp"

namespace lsr {

namespace {

struct CachedIndex {
    ImpactIndex index;
    double build_seconds = 0.0;
    double mean_terms = 0.0;
};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) {
        fields.push_back(field);
    }
    if (!line.empty() && line.back() == ',') {
        fields.emplace_back();
    }
    return fields;
}

template <typename Number>
Number parse_number(const std::string& text, std::size_t line_no) {
    Number value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw DataError("sweep csv line " + std::to_string(line_no) +
                        ": bad numeric field '" + text + "'");
    }
    return value;
}

}  // namespace

std::vector<std::pair<MaskConfig, MaskConfig>> expand_trials(const SweepSpec& spec) {
    if (spec.doc_masks.empty()) {
        throw ConfigError("sweep: empty document mask grid");
    }
    std::vector<std::pair<MaskConfig, MaskConfig>> trials;
    if (spec.pairing == Pairing::kDiagonal) {
        for (const auto& m : spec.doc_masks) {
            trials.emplace_back(m, m);
        }
        return trials;
    }
    if (spec.query_masks.empty()) {
        throw ConfigError("sweep: empty query mask grid");
    }
    for (const auto& dm : spec.doc_masks) {
        for (const auto& qm : spec.query_masks) {
            if (dm == qm) {
                continue;
            }
            trials.emplace_back(dm, qm);
        }
    }
    return trials;
}

std::vector<SweepResult> run_sweep(const SweepInputs& inputs, const SweepSpec& spec) {
    if (inputs.qrels == nullptr) {
        throw ConfigError("sweep: missing qrels");
    }
    auto trials = expand_trials(spec);

    // Queries that can be evaluated: at least one relevant document.
    std::vector<const VectorRecord*> judged;
    for (const auto& q : inputs.query_vectors) {
        if (inputs.qrels->has_relevant(q.id)) {
            judged.push_back(&q);
        }
    }

    std::map<std::string, CachedIndex> index_cache;
    std::vector<SweepResult> results;
    results.reserve(trials.size());

    for (const auto& [doc_mask, query_mask] : trials) {
        SweepResult row;
        row.doc_mask = doc_mask;
        row.query_mask = query_mask;
        row.seed = inputs.seed;
        try {
            if (judged.empty()) {
                throw DataError("sweep: no query has relevant documents in the qrels");
            }
            auto cache_it = index_cache.find(doc_mask.to_string());
            if (cache_it == index_cache.end()) {
                CachedIndex cached;
                cached.index =
                    inputs.index_threads > 1
                        ? build_index_omp(inputs.doc_vectors, doc_mask,
                                          inputs.scale, inputs.index_threads)
                        : build_index(inputs.doc_vectors, doc_mask, inputs.scale);
                cached.build_seconds = cached.index.metadata().build_seconds;
                cached.mean_terms =
                    cached.index.num_passages() == 0
                        ? 0.0
                        : static_cast<double>(cached.index.total_postings()) /
                              static_cast<double>(cached.index.num_passages());
                cache_it = index_cache.emplace(doc_mask.to_string(),
                                               std::move(cached)).first;
            }
            const CachedIndex& cached = cache_it->second;
            SearchConfig cfg{query_mask, inputs.depth};

            std::vector<std::pair<std::string, std::vector<std::string>>> run;
            std::vector<SparseVector> masked_queries;
            std::vector<SparseVector> raw_queries;
            run.reserve(judged.size());
            for (const VectorRecord* q : judged) {
                auto docs = search(cached.index, q->vector, cfg);
                std::vector<std::string> ids;
                ids.reserve(docs.size());
                for (const auto& d : docs) {
                    ids.push_back(d.doc_id);
                }
                run.emplace_back(q->id, std::move(ids));
                masked_queries.push_back(apply_mask(q->vector, query_mask));
                raw_queries.push_back(q->vector);
            }
            row.map = mean_average_precision(run, *inputs.qrels);
            row.queries_per_second =
                measure_throughput(cached.index, raw_queries, cfg, inputs.warmup)
                    .queries_per_second;
            row.indexing_seconds = cached.build_seconds;
            row.postings = cached.index.total_postings();
            row.mean_terms_docs = cached.mean_terms;
            row.mean_terms_queries = term_count_distribution(masked_queries).mean;
        } catch (const Error& e) {
            row.error = e.what();
        }
        results.push_back(std::move(row));
    }
    return results;
}

namespace {

constexpr const char* kSweepCsvHeader =
    "doc_mask,query_mask,map,queries_per_second,indexing_seconds,"
    "postings,mean_terms_docs,mean_terms_queries,seed,error";

}  // namespace

void write_sweep_csv(std::span<const SweepResult> results, std::ostream& out) {
    out << kSweepCsvHeader << '\n';
    for (const auto& row : results) {
        out << row.doc_mask.to_string() << ',' << row.query_mask.to_string() << ','
            << format_double(row.map) << ',' << format_double(row.queries_per_second)
            << ',' << format_double(row.indexing_seconds) << ',' << row.postings
            << ',' << format_double(row.mean_terms_docs) << ','
            << format_double(row.mean_terms_queries) << ',' << row.seed << ','
            << row.error << '\n';
    }
}

std::vector<SweepResult> read_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw DataError("sweep csv: empty input");
    }
    if (line != kSweepCsvHeader) {
        throw DataError("sweep csv: unrecognized header '" + line + "'");
    }
    std::vector<SweepResult> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto fields = split_csv_line(line);
        if (fields.size() != 10) {
            throw DataError("sweep csv line " + std::to_string(line_no) +
                            ": expected 10 fields, got " +
                            std::to_string(fields.size()));
        }
        SweepResult row;
        row.doc_mask = MaskConfig::parse(fields[0]);
        row.query_mask = MaskConfig::parse(fields[1]);
        row.map = parse_number<double>(fields[2], line_no);
        row.queries_per_second = parse_number<double>(fields[3], line_no);
        row.indexing_seconds = parse_number<double>(fields[4], line_no);
        row.postings = parse_number<std::size_t>(fields[5], line_no);
        row.mean_terms_docs = parse_number<double>(fields[6], line_no);
        row.mean_terms_queries = parse_number<double>(fields[7], line_no);
        row.seed = parse_number<std::uint64_t>(fields[8], line_no);
        row.error = fields[9];
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<double> default_p_grid() {
    return {0.25, 0.35, 0.45, 0.55, 0.65, 0.75, 0.85, 0.95, 0.99};
}

std::vector<std::uint32_t> default_k_grid(std::uint32_t vocab_size) {
    std::vector<std::uint32_t> grid;
    for (double ratio : {0.005, 0.0075, 0.01, 0.015, 0.02}) {
        grid.push_back(static_cast<std::uint32_t>(
            std::floor(ratio * static_cast<double>(vocab_size))));
    }
    return grid;
}

std::pair<MaskConfig, MaskConfig> reference_pair(std::uint32_t vocab_size) {
    auto k = static_cast<std::uint32_t>(
        std::floor(0.01 * static_cast<double>(vocab_size)));
    return {MaskConfig::top_k(k), MaskConfig::top_p(0.98)};
}

}  // namespace lsr
