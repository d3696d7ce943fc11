#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "lsr/error.hpp"
#include "lsr/index.hpp"
#include "lsr/rng.hpp"
#include "lsr/synthetic.hpp"
#include "support/oracles.hpp"

using namespace lsr;

namespace {

std::filesystem::path temp_file(const std::string& name) {
    auto path = std::filesystem::temp_directory_path() / ("lsr_test_" + name);
    std::filesystem::remove(path);
    return path;
}

std::string file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
}

std::vector<VectorRecord> small_corpus(std::uint64_t seed, std::uint32_t docs,
                                       std::uint32_t vocab) {
    SplitMix64 rng(seed);
    std::vector<VectorRecord> records;
    for (std::uint32_t d = 0; d < docs; ++d) {
        auto passages = 1 + rng.next_range(0, 2);
        for (std::uint64_t p = 0; p < passages; ++p) {
            VectorRecord rec;
            rec.id = "doc" + std::to_string(d) + "#" + std::to_string(p);
            rec.vector = testing::random_vector(
                rng, vocab, static_cast<std::uint32_t>(rng.next_range(1, 60)));
            records.push_back(std::move(rec));
        }
    }
    return records;
}

}  // namespace

TEST_CASE("quantize") {
    CHECK(quantize(1.386294, 100) == 139);
    CHECK(quantize(0.001, 100) == 1);     // floor clamp keeps the term
    CHECK(quantize(1000.0, 100) == 65535);  // saturates
    CHECK(quantize(2.0, 100) == 200);
    CHECK_THROWS_AS(quantize(1.0, 0), ConfigError);
}

TEST_CASE("build_index basics") {
    auto empty = build_index({}, MaskConfig::top_p(1.0), 100);
    CHECK(empty.num_passages() == 0);
    CHECK(empty.total_postings() == 0);

    std::vector<VectorRecord> one;
    one.push_back({"d1#0", SparseVector(10, {{3, 2.0}})});
    auto index = build_index(one, MaskConfig::top_p(1.0), 100);
    REQUIRE(index.num_passages() == 1);
    CHECK(index.passages()[0].doc_id == "d1");
    CHECK(index.passages()[0].ordinal == 0);
    const auto* list = index.postings_for(3);
    REQUIRE(list != nullptr);
    REQUIRE(list->size() == 1);
    CHECK((*list)[0] == Posting{0, 200});
    CHECK(index.postings_for(4) == nullptr);
    CHECK(index.metadata().scale == 100);
    CHECK(index.metadata().mask == MaskConfig::top_p(1.0));
}

TEST_CASE("build_index rejects bad ids and duplicates") {
    std::vector<VectorRecord> bad_id;
    bad_id.push_back({"no-separator", SparseVector(10, {{1, 1.0}})});
    CHECK_THROWS_AS(build_index(bad_id, MaskConfig::top_p(1.0), 100), DataError);

    std::vector<VectorRecord> bad_ordinal;
    bad_ordinal.push_back({"d#x", SparseVector(10, {{1, 1.0}})});
    CHECK_THROWS_AS(build_index(bad_ordinal, MaskConfig::top_p(1.0), 100), DataError);

    std::vector<VectorRecord> dup;
    dup.push_back({"d#0", SparseVector(10, {{1, 1.0}})});
    dup.push_back({"d#0", SparseVector(10, {{2, 1.0}})});
    CHECK_THROWS_AS(build_index(dup, MaskConfig::top_p(1.0), 100), DataError);
}

TEST_CASE("doc ids may contain '#'") {
    std::vector<VectorRecord> records;
    records.push_back({"weird#doc#2", SparseVector(10, {{1, 1.0}})});
    auto index = build_index(records, MaskConfig::top_p(1.0), 100);
    CHECK(index.passages()[0].doc_id == "weird#doc");
    CHECK(index.passages()[0].ordinal == 2);
}

TEST_CASE("index scoring equals brute-force quantized dot products") {
    auto records = small_corpus(314, 12, 300);
    auto mask = MaskConfig::top_p(0.9);
    auto index = build_index(records, mask, 100);

    SplitMix64 rng(315);
    for (int trial = 0; trial < 10; ++trial) {
        auto query = testing::random_vector(rng, 300, 15);
        // direct per-passage quantized dot
        for (std::size_t ref = 0; ref < records.size(); ++ref) {
            SparseVector masked = apply_mask(records[ref].vector, mask);
            std::int64_t expected = 0;
            for (const Entry& qe : query.entries()) {
                for (const Entry& de : masked.entries()) {
                    if (qe.term == de.term) {
                        expected += static_cast<std::int64_t>(quantize(qe.weight, 100)) *
                                    static_cast<std::int64_t>(quantize(de.weight, 100));
                    }
                }
            }
            std::int64_t via_index = 0;
            for (const Entry& qe : query.entries()) {
                const auto* list = index.postings_for(qe.term);
                if (list == nullptr) {
                    continue;
                }
                for (const Posting& post : *list) {
                    if (post.passage_ref == ref) {
                        via_index += static_cast<std::int64_t>(quantize(qe.weight, 100)) *
                                     static_cast<std::int64_t>(post.impact);
                    }
                }
            }
            CHECK(via_index == expected);
        }
    }
}

TEST_CASE("posting count grows monotonically with p") {
    auto records = small_corpus(1001, 30, 400);
    std::size_t previous = 0;
    for (double p : {0.25, 0.5, 0.75, 0.9, 0.99, 1.0}) {
        auto index = build_index(records, MaskConfig::top_p(p), 100);
        CHECK(index.total_postings() >= previous);
        previous = index.total_postings();
    }
}

TEST_CASE("top-p keeps more document terms than the matched top-k") {
    // Long documents with slowly decaying weights: the k ceiling binds for
    // top-k while p=0.98 keeps most of the mass.
    SyntheticSpec spec;
    spec.num_docs = 60;
    spec.num_queries = 1;
    spec.vocab_size = 12800;
    spec.seed = 4242;
    auto corpus = generate_synthetic(spec);
    auto topk = build_index(corpus.passages, MaskConfig::top_k(128), 100);
    auto topp = build_index(corpus.passages, MaskConfig::top_p(0.98), 100);
    double topk_mean = static_cast<double>(topk.total_postings()) /
                       static_cast<double>(topk.num_passages());
    double topp_mean = static_cast<double>(topp.total_postings()) /
                       static_cast<double>(topp.num_passages());
    CHECK(topp_mean > topk_mean);
}

TEST_CASE("build determinism: same input, same bytes") {
    auto records = small_corpus(77, 25, 500);
    auto a = temp_file("det_a.idx");
    auto b = temp_file("det_b.idx");
    save_index(build_index(records, MaskConfig::top_p(0.9), 100), a);
    save_index(build_index(records, MaskConfig::top_p(0.9), 100), b);
    CHECK(file_bytes(a) == file_bytes(b));
    std::filesystem::remove(a);
    std::filesystem::remove(b);
}

TEST_CASE("parallel build matches the serial build byte for byte") {
    auto records = small_corpus(911, 40, 600);
    for (auto mask : {MaskConfig::top_p(0.9), MaskConfig::top_k(20)}) {
        auto serial = build_index(records, mask, 100);
        for (int threads : {2, 3, 7}) {
            auto parallel = build_index_omp(records, mask, 100, threads);
            CHECK(serial == parallel);
            auto a = temp_file("omp_a.idx");
            auto b = temp_file("omp_b.idx");
            save_index(serial, a);
            save_index(parallel, b);
            CHECK(file_bytes(a) == file_bytes(b));
            std::filesystem::remove(a);
            std::filesystem::remove(b);
        }
    }
}

TEST_CASE("parallel build reports duplicate passages across shards") {
    std::vector<VectorRecord> dup;
    dup.push_back({"d#0", SparseVector(10, {{1, 1.0}})});
    dup.push_back({"e#0", SparseVector(10, {{2, 1.0}})});
    dup.push_back({"f#0", SparseVector(10, {{3, 1.0}})});
    dup.push_back({"d#0", SparseVector(10, {{4, 1.0}})});
    CHECK_THROWS_AS(build_index_omp(dup, MaskConfig::top_p(1.0), 100, 2), DataError);
}

TEST_CASE("save/load round-trip") {
    auto records = small_corpus(555, 20, 300);
    auto index = build_index(records, MaskConfig::top_k(15), 250);
    auto path = temp_file("roundtrip.idx");
    save_index(index, path);
    auto loaded = load_index(path);
    CHECK(loaded == index);
    CHECK(loaded.metadata().vocab_size == index.metadata().vocab_size);
    CHECK(loaded.metadata().scale == 250);
    CHECK(loaded.metadata().mask == MaskConfig::top_k(15));
    std::filesystem::remove(path);
}

TEST_CASE("load rejects each corruption class distinctly") {
    auto records = small_corpus(666, 10, 200);
    auto index = build_index(records, MaskConfig::top_p(0.8), 100);
    auto path = temp_file("corrupt.idx");
    save_index(index, path);
    const std::string good = file_bytes(path);

    auto write_file = [&](const std::string& bytes) {
        std::ofstream out(path, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };

    // bad magic
    std::string bad_magic = good;
    bad_magic[0] = 'X';
    write_file(bad_magic);
    CHECK_THROWS_AS(load_index(path), IndexFormatError);

    // future version
    std::string bad_version = good;
    bad_version[8] = 9;
    write_file(bad_version);
    CHECK_THROWS_AS(load_index(path), IndexVersionError);

    // truncated
    write_file(good.substr(0, good.size() - 7));
    CHECK_THROWS_AS(load_index(path), IndexTruncatedError);
    write_file(good.substr(0, 10));
    CHECK_THROWS_AS(load_index(path), IndexTruncatedError);

    // flipped payload byte
    std::string corrupted = good;
    corrupted[good.size() / 2] ^= 0x40;
    write_file(corrupted);
    CHECK_THROWS_AS(load_index(path), IndexChecksumError);

    // intact file still loads
    write_file(good);
    CHECK(load_index(path) == index);
    std::filesystem::remove(path);
}
