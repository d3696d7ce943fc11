#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lsr/error.hpp"
#include "lsr/plot.hpp"
#include "lsr/sweep.hpp"
#include "lsr/synthetic.hpp"

using namespace lsr;

namespace {

SyntheticSpec tiny_corpus() {
    SyntheticSpec spec;
    spec.num_docs = 30;
    spec.num_queries = 5;
    spec.vocab_size = 1000;
    spec.doc_nnz_min = 20;
    spec.doc_nnz_max = 60;
    spec.query_nnz_min = 4;
    spec.query_nnz_max = 10;
    spec.seed = 7;
    return spec;
}

SweepInputs inputs_for(const SyntheticCorpus& corpus, std::uint64_t seed) {
    SweepInputs in;
    in.doc_vectors = corpus.passages;
    in.query_vectors = corpus.queries;
    in.qrels = &corpus.qrels;
    in.scale = 100;
    in.depth = 50;
    in.seed = seed;
    in.warmup = 2;
    return in;
}

std::vector<MaskConfig> p_grid_masks() {
    std::vector<MaskConfig> masks;
    for (double p : default_p_grid()) {
        masks.push_back(MaskConfig::top_p(p));
    }
    return masks;
}

// Timing-dependent fields zeroed, for byte-stability comparisons.
std::string stable_csv(const std::vector<SweepResult>& rows) {
    std::vector<SweepResult> copy(rows);
    for (auto& row : copy) {
        row.queries_per_second = 0.0;
        row.indexing_seconds = 0.0;
    }
    std::ostringstream out;
    write_sweep_csv(copy, out);
    return out.str();
}

}  // namespace

TEST_CASE("trial expansion laws") {
    SweepSpec diagonal{p_grid_masks(), {}, Pairing::kDiagonal};
    CHECK(expand_trials(diagonal).size() == 9);

    SweepSpec cross{p_grid_masks(), p_grid_masks(), Pairing::kCrossExcludingEqual};
    auto trials = expand_trials(cross);
    CHECK(trials.size() == 72);  // 9 * 8 ordered pairs
    for (const auto& [dm, qm] : trials) {
        CHECK_FALSE(dm == qm);
    }

    SweepSpec empty{{}, {}, Pairing::kDiagonal};
    CHECK_THROWS_AS(expand_trials(empty), ConfigError);
}

TEST_CASE("diagonal sweep produces one clean row per grid point") {
    auto corpus = generate_synthetic(tiny_corpus());
    SweepSpec spec{p_grid_masks(), {}, Pairing::kDiagonal};
    auto rows = run_sweep(inputs_for(corpus, 7), spec);
    REQUIRE(rows.size() == 9);
    for (const auto& row : rows) {
        CHECK(row.error.empty());
        CHECK(row.map >= 0.0);
        CHECK(row.map <= 1.0);
        CHECK(row.queries_per_second > 0.0);
        CHECK(row.postings > 0);
        CHECK(row.seed == 7);
        CHECK(row.doc_mask == row.query_mask);
    }
}

TEST_CASE("cross sweep over the nine p values yields 72 rows") {
    auto corpus = generate_synthetic(tiny_corpus());
    SweepSpec spec{p_grid_masks(), p_grid_masks(), Pairing::kCrossExcludingEqual};
    auto rows = run_sweep(inputs_for(corpus, 11), spec);
    REQUIRE(rows.size() == 72);
    for (const auto& row : rows) {
        CHECK(row.error.empty());
    }
    // same doc mask appears in 8 rows, each reporting the same cached index
    for (std::size_t i = 0; i + 8 <= 72; i += 8) {
        for (std::size_t j = i + 1; j < i + 8; ++j) {
            CHECK(rows[j].doc_mask == rows[i].doc_mask);
            CHECK(rows[j].postings == rows[i].postings);
            CHECK(rows[j].indexing_seconds == rows[i].indexing_seconds);
        }
    }
}

TEST_CASE("sweep rows are byte-stable apart from timing columns") {
    auto corpus = generate_synthetic(tiny_corpus());
    SweepSpec spec{p_grid_masks(), {}, Pairing::kDiagonal};
    auto first = run_sweep(inputs_for(corpus, 3), spec);
    auto second = run_sweep(inputs_for(corpus, 3), spec);
    CHECK(stable_csv(first) == stable_csv(second));
}

TEST_CASE("sweep csv round-trips") {
    auto corpus = generate_synthetic(tiny_corpus());
    SweepSpec spec{{MaskConfig::top_k(16), MaskConfig::top_p(0.9)}, {}, Pairing::kDiagonal};
    auto rows = run_sweep(inputs_for(corpus, 5), spec);
    std::ostringstream out;
    write_sweep_csv(rows, out);
    std::istringstream in(out.str());
    auto parsed = read_sweep_csv(in);
    REQUIRE(parsed.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(parsed[i].doc_mask == rows[i].doc_mask);
        CHECK(parsed[i].query_mask == rows[i].query_mask);
        CHECK(parsed[i].map == rows[i].map);
        CHECK(parsed[i].postings == rows[i].postings);
        CHECK(parsed[i].mean_terms_docs == rows[i].mean_terms_docs);
        CHECK(parsed[i].seed == rows[i].seed);
    }
}

TEST_CASE("a failing trial is recorded and the sweep continues") {
    auto corpus = generate_synthetic(tiny_corpus());
    // qrels with no relevant document for any query
    QRels empty_qrels;
    empty_qrels.add("q0", "d0", 0);
    SweepInputs in = inputs_for(corpus, 1);
    in.qrels = &empty_qrels;
    SweepSpec spec{{MaskConfig::top_p(0.5), MaskConfig::top_p(0.9)}, {}, Pairing::kDiagonal};
    auto rows = run_sweep(in, spec);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK_FALSE(row.error.empty());
        CHECK(row.map == 0.0);
    }
}

TEST_CASE("malformed sweep csv is a data error") {
    const std::string header =
        "doc_mask,query_mask,map,queries_per_second,indexing_seconds,"
        "postings,mean_terms_docs,mean_terms_queries,seed,error";
    std::istringstream missing_fields(header + "\ntopk:1,topk:2,0.5\n");
    CHECK_THROWS_AS(read_sweep_csv(missing_fields), DataError);
    std::istringstream bad_number(header + "\ntopk:1,topk:2,x,1,1,1,1,1,1,\n");
    CHECK_THROWS_AS(read_sweep_csv(bad_number), DataError);
    std::istringstream empty("");
    CHECK_THROWS_AS(read_sweep_csv(empty), DataError);
    std::istringstream bad_header("junk\n");
    CHECK_THROWS_AS(read_sweep_csv(bad_header), DataError);
}

TEST_CASE("default grids and reference pair") {
    auto ps = default_p_grid();
    REQUIRE(ps.size() == 9);
    CHECK(ps.front() == 0.25);
    CHECK(ps.back() == 0.99);

    auto ks = default_k_grid(35200);
    REQUIRE(ks.size() == 5);
    CHECK(ks.front() == 176);   // 0.005 ratio
    CHECK(ks[2] == 352);        // 0.01 default
    CHECK(ks.back() == 704);    // 0.02 ratio

    auto [k_mask, p_mask] = reference_pair(35200);
    CHECK(k_mask == MaskConfig::top_k(352));
    CHECK(p_mask == MaskConfig::top_p(0.98));
    CHECK(reference_pair(12800).first == MaskConfig::top_k(128));
}

TEST_CASE("mask config parse/format round-trip") {
    for (const char* text : {"topk:128", "topk:0", "topp:0.98", "topp:1", "topp:0.25"}) {
        CHECK(MaskConfig::parse(text).to_string() == text);
    }
    CHECK_THROWS_AS(MaskConfig::parse("nope"), ConfigError);
    CHECK_THROWS_AS(MaskConfig::parse("topk:abc"), ConfigError);
    CHECK_THROWS_AS(MaskConfig::parse("topp:1.5"), ConfigError);
    CHECK_THROWS_AS(MaskConfig::parse("topq:1"), ConfigError);
}

TEST_CASE("svg plots are written and structurally sane") {
    auto dir = std::filesystem::temp_directory_path();

    std::vector<ScatterSeries> scatter(2);
    scatter[0].label = "topk";
    scatter[0].points = {{100.0, 0.21}, {80.0, 0.25}, {60.0, 0.28}};
    scatter[1].label = "topp";
    scatter[1].points = {{110.0, 0.22}, {85.0, 0.27}, {55.0, 0.30}};
    auto scatter_path = dir / "lsr_test_scatter.svg";
    write_scatter_svg(scatter, "queries/sec", "mAP", scatter_path);

    std::ifstream in(scatter_path);
    std::string svg((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
    CHECK(svg.rfind("<circle", std::string::npos) != std::string::npos);
    CHECK(svg.find("queries/sec") != std::string::npos);
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
    std::filesystem::remove(scatter_path);

    std::vector<HistogramSeries> hist(2);
    hist[0].label = "topk";
    hist[0].bucket_width = 8;
    hist[0].buckets = {{120, 3}, {128, 40}, {136, 2}};
    hist[1].label = "topp";
    hist[1].bucket_width = 8;
    hist[1].buckets = {{128, 5}, {200, 12}, {280, 20}};
    auto hist_path = dir / "lsr_test_hist.svg";
    write_histogram_svg(hist, "terms selected", "documents", hist_path);
    std::ifstream hin(hist_path);
    std::string hsvg((std::istreambuf_iterator<char>(hin)), std::istreambuf_iterator<char>());
    CHECK(hsvg.find("<rect") != std::string::npos);
    CHECK(hsvg.find("terms selected") != std::string::npos);
    std::filesystem::remove(hist_path);
}
