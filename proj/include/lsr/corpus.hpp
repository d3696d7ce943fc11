#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lsr/sparse_vector.hpp"

namespace lsr {

struct Document {
    std::string doc_id;
    std::string text;
};

struct Passage {
    std::string doc_id;
    std::uint32_t ordinal = 0;  // 0-based, contiguous per document
    std::vector<TermId> tokens;
};

/// One line of a vector file: an id ("doc#ordinal" for passages, a query id
/// for topics) and its sparse vector.
struct VectorRecord {
    std::string id;
    SparseVector vector;
};

struct Topic {
    std::string query_id;
    std::string title;
};

/// Splits on ASCII whitespace (plus U+3000); codepoints from scripts written
/// without word separators (CJK ranges, kana, hangul) become single-codepoint
/// tokens. Each token maps to FNV-1a(bytes) mod vocab_size. Invalid UTF-8
/// bytes are consumed one byte at a time so the function is total.
std::vector<TermId> tokenize(std::string_view text, std::uint32_t vocab_size);

/// Consecutive non-overlapping chunks of at most max_passage_tokens tokens;
/// every chunk is full-length except possibly the last. Empty documents
/// produce no passages.
std::vector<Passage> split_passages(const Document& doc, std::uint32_t vocab_size,
                                    std::uint32_t max_passage_tokens);

/// Streaming reader for JSONL vector files:
///   {"id": "d12#0", "vector": {"3": 1.25, "17": 0.5}}
/// Reports malformed lines with their line number and rejects duplicate ids.
class VectorReader {
  public:
    VectorReader(const std::filesystem::path& path, std::uint32_t vocab_size);

    /// Reads the next record. Returns false at end of input.
    bool next(VectorRecord& out);

  private:
    std::ifstream in_;
    std::string path_;
    std::uint32_t vocab_size_;
    std::size_t line_no_ = 0;
    std::unordered_set<std::string> seen_ids_;
};

std::vector<VectorRecord> read_vectors(const std::filesystem::path& path,
                                       std::uint32_t vocab_size);

void write_vectors(std::span<const VectorRecord> records,
                   const std::filesystem::path& path);

/// Documents file: JSONL {"id": ..., "text": ...}.
std::vector<Document> read_documents(const std::filesystem::path& path);
void write_documents(std::span<const Document> docs, const std::filesystem::path& path);

/// Topics file: "query_id<TAB>title text" per line.
std::vector<Topic> read_topics(const std::filesystem::path& path);

/// Passages file: JSONL {"id": "doc#ordinal", "tokens": [..]}.
std::vector<Passage> read_passages(const std::filesystem::path& path,
                                   std::uint32_t vocab_size);
void write_passages(std::span<const Passage> passages,
                    const std::filesystem::path& path);

}  // namespace lsr
