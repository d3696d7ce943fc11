// lsr: learned-sparse retrieval toolkit CLI.
//
// Subcommands: synth, split, encode, index, search, evaluate, sweep, plot.
// Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
// Set LSR_LOG=quiet|info|debug to control stderr verbosity.

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "lsr/corpus.hpp"
#include "lsr/encoder.hpp"
#include "lsr/error.hpp"
#include "lsr/eval.hpp"
#include "lsr/format.hpp"
#include "lsr/index.hpp"
#include "lsr/plot.hpp"
#include "lsr/search.hpp"
#include "lsr/sweep.hpp"
#include "lsr/synthetic.hpp"

namespace {

enum class LogLevel { kQuiet = 0, kInfo = 1, kDebug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("LSR_LOG");
    if (env == nullptr) {
        return LogLevel::kInfo;
    }
    std::string value(env);
    if (value == "quiet") {
        return LogLevel::kQuiet;
    }
    if (value == "debug") {
        return LogLevel::kDebug;
    }
    return LogLevel::kInfo;
}

void log_info(const std::string& message) {
    if (log_level() >= LogLevel::kInfo) {
        std::cerr << "[lsr] " << message << "\n";
    }
}

void log_debug(const std::string& message) {
    if (log_level() >= LogLevel::kDebug) {
        std::cerr << "[lsr:debug] " << message << "\n";
    }
}

struct EncoderFlags {
    std::uint32_t hidden_dim = 16;
    std::uint64_t seed = 42;
};

void add_encoder_flags(CLI::App* cmd, EncoderFlags& flags) {
    cmd->add_option("--hidden-dim", flags.hidden_dim, "Encoder hidden dimension");
    cmd->add_option("--encoder-seed", flags.seed, "Seed for encoder parameters");
}

lsr::MaskConfig parse_mask_flag(const std::string& text) {
    return lsr::MaskConfig::parse(text);
}

std::vector<lsr::MaskConfig> parse_grid(const std::vector<std::string>& texts) {
    std::vector<lsr::MaskConfig> masks;
    for (const auto& t : texts) {
        masks.push_back(parse_mask_flag(t));
    }
    return masks;
}

// Queries for search/sweep: either pre-encoded vectors or topics run through
// the toy encoder. Throughput is reported for retrieval only; encoding time
// is logged separately.
std::vector<lsr::VectorRecord> load_queries(const std::string& query_vectors,
                                            const std::string& topics,
                                            std::uint32_t vocab_size,
                                            const EncoderFlags& enc) {
    if (!query_vectors.empty()) {
        log_debug("reading query vectors from " + query_vectors);
        return lsr::read_vectors(query_vectors, vocab_size);
    }
    log_debug("encoding topics from " + topics + " (hidden_dim=" +
              std::to_string(enc.hidden_dim) + ", seed=" + std::to_string(enc.seed) +
              ", vocab=" + std::to_string(vocab_size) + ")");
    auto parsed = lsr::read_topics(topics);
    auto params = lsr::HeadParams::generate(enc.hidden_dim, vocab_size, enc.seed);
    std::vector<lsr::VectorRecord> records;
    records.reserve(parsed.size());
    const auto start = std::chrono::steady_clock::now();
    for (const auto& topic : parsed) {
        auto tokens = lsr::tokenize(topic.title, vocab_size);
        if (tokens.empty()) {
            throw lsr::DataError("topic '" + topic.query_id + "' has no tokens");
        }
        records.push_back(
            {topic.query_id,
             lsr::encode(tokens, params, lsr::MaskConfig::top_p(1.0))});
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    log_info("encoded " + std::to_string(records.size()) + " topics in " +
             lsr::format_double(elapsed) + " s (not counted in retrieval throughput)");
    return records;
}

int run(int argc, char** argv) {
    CLI::App app{"Learned-sparse retrieval with top-k / top-p masking"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file");

    // ---- synth ----
    auto* synth = app.add_subcommand(
        "synth", "Generate a seeded synthetic corpus (vectors, queries, qrels)");
    lsr::SyntheticSpec synth_spec;
    std::string synth_docs = "docs_vectors.jsonl";
    std::string synth_queries = "query_vectors.jsonl";
    std::string synth_qrels = "qrels.txt";
    synth->add_option("--docs", synth_spec.num_docs, "Number of documents");
    synth->add_option("--queries", synth_spec.num_queries, "Number of queries");
    synth->add_option("--vocab-size", synth_spec.vocab_size, "Vocabulary size");
    synth->add_option("--doc-nnz-min", synth_spec.doc_nnz_min, "Min terms per document");
    synth->add_option("--doc-nnz-max", synth_spec.doc_nnz_max, "Max terms per document");
    synth->add_option("--query-nnz-min", synth_spec.query_nnz_min, "Min terms per query");
    synth->add_option("--query-nnz-max", synth_spec.query_nnz_max, "Max terms per query");
    synth->add_option("--max-passages", synth_spec.max_passages_per_doc,
                      "Max passages per document");
    synth->add_option("--seed", synth_spec.seed, "Generator seed");
    synth->add_option("--out-docs", synth_docs, "Output document vectors (JSONL)");
    synth->add_option("--out-queries", synth_queries, "Output query vectors (JSONL)");
    synth->add_option("--out-qrels", synth_qrels, "Output qrels (TREC format)");
    synth->callback([&] {
        auto corpus = lsr::generate_synthetic(synth_spec);
        lsr::write_vectors(corpus.passages, synth_docs);
        lsr::write_vectors(corpus.queries, synth_queries);
        std::ofstream out(synth_qrels);
        if (!out) {
            throw lsr::DataError("cannot open " + synth_qrels + " for writing");
        }
        for (const auto& q : corpus.queries) {
            for (const auto& docid : corpus.qrels.relevant_docs(q.id)) {
                out << q.id << " 0 " << docid << " 1\n";
            }
        }
        log_info("wrote " + std::to_string(corpus.passages.size()) + " passages, " +
                 std::to_string(corpus.queries.size()) + " queries");
    });

    // ---- split ----
    auto* split = app.add_subcommand(
        "split", "Split documents into token passages (JSONL in, JSONL out)");
    std::string split_docs;
    std::string split_out = "passages.jsonl";
    std::uint32_t split_max_tokens = 256;
    std::uint32_t split_vocab = 1000;
    split->add_option("--docs", split_docs, "Input documents (JSONL id/text)")
        ->required();
    split->add_option("--out", split_out, "Output passages file");
    split->add_option("--max-tokens", split_max_tokens, "Max tokens per passage");
    split->add_option("--vocab-size", split_vocab, "Vocabulary size for token hashing");
    split->callback([&] {
        auto docs = lsr::read_documents(split_docs);
        std::vector<lsr::Passage> passages;
        for (const auto& doc : docs) {
            auto chunks = lsr::split_passages(doc, split_vocab, split_max_tokens);
            passages.insert(passages.end(), chunks.begin(), chunks.end());
        }
        lsr::write_passages(passages, split_out);
        log_info("split " + std::to_string(docs.size()) + " documents into " +
                 std::to_string(passages.size()) + " passages");
    });

    // ---- encode ----
    auto* encode_cmd = app.add_subcommand(
        "encode", "Encode passages into sparse term-importance vectors");
    std::string encode_passages;
    std::string encode_out = "vectors.jsonl";
    std::string encode_mask = "topp:1";
    std::uint32_t encode_vocab = 1000;
    EncoderFlags encode_flags;
    int encode_threads = 1;
    encode_cmd->add_option("--passages", encode_passages, "Input passages (JSONL)")
        ->required();
    encode_cmd->add_option("--out", encode_out, "Output vector file");
    encode_cmd->add_option("--mask", encode_mask,
                           "Mask applied after encoding (default keeps everything)");
    encode_cmd->add_option("--vocab-size", encode_vocab, "Vocabulary size");
    encode_cmd->add_option("--threads", encode_threads, "Worker threads (1 = serial)");
    add_encoder_flags(encode_cmd, encode_flags);
    encode_cmd->callback([&] {
        auto passages = lsr::read_passages(encode_passages, encode_vocab);
        auto params = lsr::HeadParams::generate(encode_flags.hidden_dim,
                                                encode_vocab,
                                                encode_flags.seed);
        auto mask = parse_mask_flag(encode_mask);
        std::vector<std::vector<lsr::TermId>> token_seqs;
        token_seqs.reserve(passages.size());
        for (const auto& p : passages) {
            token_seqs.push_back(p.tokens);
        }
        auto vectors = encode_threads > 1
                           ? lsr::encode_batch_omp(token_seqs, params, mask,
                                                   encode_threads)
                           : lsr::encode_batch(token_seqs, params, mask);
        std::vector<lsr::VectorRecord> records;
        records.reserve(passages.size());
        for (std::size_t i = 0; i < passages.size(); ++i) {
            records.push_back(
                {passages[i].doc_id + "#" + std::to_string(passages[i].ordinal),
                 std::move(vectors[i])});
        }
        lsr::write_vectors(records, encode_out);
        log_info("encoded " + std::to_string(records.size()) + " passages");
    });

    // ---- index ----
    auto* index_cmd = app.add_subcommand(
        "index", "Build an impact-quantized inverted index from vectors");
    std::string index_vectors;
    std::string index_out = "index.lsr";
    std::string index_mask = "topp:0.98";
    std::uint32_t index_vocab = 1000;
    std::uint32_t index_scale = 100;
    int index_threads = 1;
    std::string index_stats;
    index_cmd->add_option("--vectors", index_vectors, "Input vector file")->required();
    index_cmd->add_option("--out", index_out, "Output index file");
    index_cmd->add_option("--mask", index_mask, "Document-side mask, e.g. topk:352");
    index_cmd->add_option("--vocab-size", index_vocab, "Vocabulary size");
    index_cmd->add_option("--scale", index_scale, "Quantization scale");
    index_cmd->add_option("--threads", index_threads, "Worker threads (1 = serial)");
    index_cmd->add_option("--stats-csv", index_stats,
                          "Append one CSV row of build statistics");
    index_cmd->callback([&] {
        auto records = lsr::read_vectors(index_vectors, index_vocab);
        auto mask = parse_mask_flag(index_mask);
        log_debug("building index: mask=" + mask.to_string() + " scale=" +
                  std::to_string(index_scale) + " threads=" +
                  std::to_string(index_threads) + " records=" +
                  std::to_string(records.size()));
        auto index = index_threads > 1
                         ? lsr::build_index_omp(records, mask, index_scale,
                                                index_threads)
                         : lsr::build_index(records, mask, index_scale);
        lsr::save_index(index, index_out);
        log_info("indexed " + std::to_string(index.num_passages()) + " passages, " +
                 std::to_string(index.total_postings()) + " postings in " +
                 lsr::format_double(index.metadata().build_seconds) + " s");
        if (!index_stats.empty()) {
            const bool fresh = !std::ifstream(index_stats).good();
            std::ofstream out(index_stats, std::ios::app);
            if (!out) {
                throw lsr::DataError("cannot open " + index_stats + " for writing");
            }
            if (fresh) {
                out << "mask,postings,indexing_seconds\n";
            }
            out << mask.to_string() << ',' << index.total_postings() << ','
                << lsr::format_double(index.metadata().build_seconds) << '\n';
        }
    });

    // ---- search ----
    auto* search_cmd = app.add_subcommand(
        "search", "Run queries against an index, write a TREC run file");
    std::string search_index;
    std::string search_query_vectors;
    std::string search_topics;
    std::string search_out = "run.txt";
    std::string search_mask = "topp:0.98";
    std::string search_tag = "lsr";
    std::uint32_t search_depth = 1000;
    EncoderFlags search_enc;
    search_cmd->add_option("--index", search_index, "Index file")->required();
    search_cmd->add_option("--query-vectors", search_query_vectors,
                           "Pre-encoded query vectors (JSONL)");
    search_cmd->add_option("--topics", search_topics,
                           "Topics TSV; titles are encoded with the toy encoder");
    search_cmd->add_option("--out", search_out, "Output run file");
    search_cmd->add_option("--mask", search_mask, "Query-side mask");
    search_cmd->add_option("--tag", search_tag, "Run tag (sixth column)");
    search_cmd->add_option("--depth", search_depth, "Documents returned per query");
    add_encoder_flags(search_cmd, search_enc);
    search_cmd->callback([&] {
        if (search_query_vectors.empty() == search_topics.empty()) {
            throw CLI::ValidationError(
                "search", "provide exactly one of --query-vectors / --topics");
        }
        auto index = lsr::load_index(search_index);
        auto queries = load_queries(search_query_vectors, search_topics,
                                    index.metadata().vocab_size, search_enc);
        lsr::SearchConfig cfg{parse_mask_flag(search_mask), search_depth};
        std::vector<lsr::QueryResult> results;
        results.reserve(queries.size());
        const auto start = std::chrono::steady_clock::now();
        for (const auto& q : queries) {
            results.push_back({q.id, lsr::search(index, q.vector, cfg)});
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                .count();
        lsr::write_run(results, search_tag, search_out);
        log_info("searched " + std::to_string(queries.size()) + " queries in " +
                 lsr::format_double(elapsed) + " s (retrieval only)");
    });

    // ---- evaluate ----
    auto* eval_cmd = app.add_subcommand(
        "evaluate", "Score a run file against qrels (mAP)");
    std::string eval_run;
    std::string eval_qrels;
    std::string eval_json;
    bool eval_skip_unjudged = false;
    eval_cmd->add_option("--run", eval_run, "Run file")->required();
    eval_cmd->add_option("--qrels", eval_qrels, "QRels file")->required();
    eval_cmd->add_option("--per-query-json", eval_json,
                         "Write per-query detail to this JSON file");
    eval_cmd->add_flag("--skip-unjudged", eval_skip_unjudged,
                       "Drop run queries that have no relevant documents");
    eval_cmd->callback([&] {
        auto run = lsr::read_run(eval_run);
        auto qrels = lsr::QRels::read(eval_qrels);
        if (eval_skip_unjudged) {
            std::erase_if(run, [&](const auto& entry) {
                return !qrels.has_relevant(entry.first);
            });
            if (run.empty()) {
                throw lsr::DataError("evaluate: no judged queries left in the run");
            }
        }
        lsr::EvalReport report;
        for (const auto& [qid, ranked] : run) {
            report.per_query_ap.emplace_back(
                qid, lsr::average_precision(ranked, qrels.relevant_docs(qid)));
        }
        report.map = lsr::mean_average_precision(run, qrels);
        if (!eval_json.empty()) {
            lsr::write_report_json(report, eval_json);
        }
        lsr::write_report_csv(report, std::cout);
    });

    // ---- sweep ----
    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Run a masking-configuration sweep and emit one CSV row per trial");
    std::string sweep_docs;
    std::string sweep_query_vectors;
    std::string sweep_topics;
    std::string sweep_qrels;
    std::string sweep_out = "sweep.csv";
    std::vector<std::string> sweep_doc_grid;
    std::vector<std::string> sweep_query_grid;
    std::string sweep_pairing = "diagonal";
    bool sweep_default_p = false;
    bool sweep_default_k = false;
    bool sweep_reference_pair = false;
    std::uint32_t sweep_vocab = 1000;
    std::uint32_t sweep_scale = 100;
    std::uint32_t sweep_depth = 1000;
    std::uint64_t sweep_seed = 42;
    int sweep_threads = 1;
    EncoderFlags sweep_enc;
    sweep_cmd->add_option("--doc-vectors", sweep_docs, "Document vectors (JSONL)")
        ->required();
    sweep_cmd->add_option("--query-vectors", sweep_query_vectors,
                          "Pre-encoded query vectors");
    sweep_cmd->add_option("--topics", sweep_topics, "Topics TSV (toy-encoded)");
    sweep_cmd->add_option("--qrels", sweep_qrels, "QRels file")->required();
    sweep_cmd->add_option("--out", sweep_out, "Output CSV");
    sweep_cmd->add_option("--doc-grid", sweep_doc_grid,
                          "Document mask grid, e.g. topp:0.25 topp:0.5 topk:128");
    sweep_cmd->add_option("--query-grid", sweep_query_grid,
                          "Query mask grid (cross pairing only)");
    sweep_cmd
        ->add_option("--pairing", sweep_pairing,
                     "diagonal | cross (cross skips equal doc/query configs)")
        ->check(CLI::IsMember({"diagonal", "cross"}));
    sweep_cmd->add_flag("--default-p-grid", sweep_default_p,
                        "Use the nine-point p grid 0.25..0.99");
    sweep_cmd->add_flag("--default-k-grid", sweep_default_k,
                        "Use five k values spanning 0.005..0.02 of the vocabulary");
    sweep_cmd->add_flag("--preset-reference-pair", sweep_reference_pair,
                        "Compare topk:floor(0.01*|V|) against topp:0.98");
    sweep_cmd->add_option("--vocab-size", sweep_vocab, "Vocabulary size");
    sweep_cmd->add_option("--scale", sweep_scale, "Quantization scale");
    sweep_cmd->add_option("--depth", sweep_depth, "Retrieval depth");
    sweep_cmd->add_option("--seed", sweep_seed, "Provenance seed echoed in rows");
    sweep_cmd->add_option("--threads", sweep_threads,
                          "Threads for index builds (throughput stays single-threaded)");
    add_encoder_flags(sweep_cmd, sweep_enc);
    sweep_cmd->callback([&] {
        if (sweep_query_vectors.empty() == sweep_topics.empty()) {
            throw CLI::ValidationError(
                "sweep", "provide exactly one of --query-vectors / --topics");
        }
        auto docs = lsr::read_vectors(sweep_docs, sweep_vocab);
        auto queries =
            load_queries(sweep_query_vectors, sweep_topics, sweep_vocab, sweep_enc);
        auto qrels = lsr::QRels::read(sweep_qrels);

        lsr::SweepSpec spec;
        spec.doc_masks = parse_grid(sweep_doc_grid);
        spec.query_masks = parse_grid(sweep_query_grid);
        if (sweep_default_p) {
            for (double p : lsr::default_p_grid()) {
                spec.doc_masks.push_back(lsr::MaskConfig::top_p(p));
            }
        }
        if (sweep_default_k) {
            for (std::uint32_t k : lsr::default_k_grid(sweep_vocab)) {
                spec.doc_masks.push_back(lsr::MaskConfig::top_k(k));
            }
        }
        if (sweep_reference_pair) {
            auto [k_mask, p_mask] = lsr::reference_pair(sweep_vocab);
            spec.doc_masks.push_back(k_mask);
            spec.doc_masks.push_back(p_mask);
        }
        spec.pairing = sweep_pairing == "cross" ? lsr::Pairing::kCrossExcludingEqual
                                                : lsr::Pairing::kDiagonal;
        if (spec.pairing == lsr::Pairing::kCrossExcludingEqual &&
            spec.query_masks.empty()) {
            spec.query_masks = spec.doc_masks;
        }

        log_debug("sweep: " + std::to_string(lsr::expand_trials(spec).size()) +
                  " trials over " + std::to_string(spec.doc_masks.size()) +
                  " document masks");
        lsr::SweepInputs inputs;
        inputs.doc_vectors = docs;
        inputs.query_vectors = queries;
        inputs.qrels = &qrels;
        inputs.scale = sweep_scale;
        inputs.depth = sweep_depth;
        inputs.seed = sweep_seed;
        inputs.index_threads = sweep_threads;
        auto rows = lsr::run_sweep(inputs, spec);

        std::ofstream out(sweep_out);
        if (!out) {
            throw lsr::DataError("cannot open " + sweep_out + " for writing");
        }
        lsr::write_sweep_csv(rows, out);
        std::size_t failed = 0;
        for (const auto& row : rows) {
            if (!row.error.empty()) {
                ++failed;
                log_info("trial " + row.doc_mask.to_string() + "/" +
                         row.query_mask.to_string() + " failed: " + row.error);
            }
        }
        log_info("sweep wrote " + std::to_string(rows.size()) + " rows (" +
                 std::to_string(failed) + " failed) to " + sweep_out);
    });

    // ---- plot ----
    auto* plot_cmd = app.add_subcommand(
        "plot", "Render sweep CSV to SVG (scatter), or term-count histograms");
    std::string plot_csv;
    std::string plot_out = "plot.svg";
    bool plot_histogram = false;
    std::string plot_vectors;
    std::vector<std::string> plot_masks;
    std::uint32_t plot_vocab = 1000;
    std::uint32_t plot_bucket = 8;
    plot_cmd->add_option("--csv", plot_csv, "Sweep CSV (scatter mode)");
    plot_cmd->add_option("--out", plot_out, "Output SVG");
    plot_cmd->add_flag("--histogram", plot_histogram,
                       "Histogram mode: distribution of terms kept per vector");
    plot_cmd->add_option("--vectors", plot_vectors, "Vector file (histogram mode)");
    plot_cmd->add_option("--mask", plot_masks,
                         "Masks to compare in histogram mode, e.g. topk:128 topp:0.98");
    plot_cmd->add_option("--vocab-size", plot_vocab, "Vocabulary size (histogram mode)");
    plot_cmd->add_option("--bucket-width", plot_bucket, "Histogram bucket width");
    plot_cmd->callback([&] {
        if (plot_histogram) {
            if (plot_vectors.empty() || plot_masks.empty()) {
                throw CLI::ValidationError(
                    "plot", "histogram mode needs --vectors and at least one --mask");
            }
            auto records = lsr::read_vectors(plot_vectors, plot_vocab);
            std::vector<lsr::SparseVector> vectors;
            vectors.reserve(records.size());
            for (const auto& rec : records) {
                vectors.push_back(rec.vector);
            }
            std::vector<lsr::HistogramSeries> series;
            for (const auto& text : plot_masks) {
                auto mask = parse_mask_flag(text);
                auto stats = lsr::term_count_distribution(
                    lsr::mask_batch(vectors, mask), plot_bucket);
                lsr::HistogramSeries s;
                s.label = mask.to_string() + " (mean " +
                          lsr::format_double(stats.mean) + ")";
                s.buckets = stats.histogram;
                s.bucket_width = plot_bucket;
                series.push_back(std::move(s));
            }
            lsr::write_histogram_svg(series, "terms kept per vector", "vectors",
                                     plot_out);
        } else {
            if (plot_csv.empty()) {
                throw CLI::ValidationError("plot", "scatter mode needs --csv");
            }
            std::ifstream in(plot_csv);
            if (!in) {
                throw lsr::DataError("cannot open " + plot_csv);
            }
            auto rows = lsr::read_sweep_csv(in);
            lsr::ScatterSeries topk{"top-k", {}};
            lsr::ScatterSeries topp{"top-p", {}};
            for (const auto& row : rows) {
                if (!row.error.empty()) {
                    continue;
                }
                auto& series = row.doc_mask.is_top_k() ? topk : topp;
                series.points.emplace_back(row.queries_per_second, row.map);
            }
            std::vector<lsr::ScatterSeries> series{std::move(topk), std::move(topp)};
            lsr::write_scatter_svg(series, "queries/sec", "mAP", plot_out);
        }
        log_info("wrote " + plot_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);  // 0 for --help, non-zero usage errors
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        int rc = run(argc, argv);
        return rc == 0 ? 0 : 1;
    } catch (const lsr::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lsr::DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
