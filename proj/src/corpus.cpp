#include "lsr/corpus.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <unordered_map>

#include "lsr/error.hpp"
#include "lsr/format.hpp"
#include "lsr/rng.hpp"

namespace lsr {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool is_separator(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' ||
           cp == U'\v' || cp == U'\f' || cp == U'　';
}

// Scripts conventionally written without word separators; each codepoint
// stands alone as a token.
bool is_standalone(char32_t cp) {
    return (cp >= 0x2E80 && cp <= 0xA4CF) ||   // CJK, kana, radicals, Yi
           (cp >= 0xAC00 && cp <= 0xD7AF) ||   // Hangul syllables
           (cp >= 0xF900 && cp <= 0xFAFF) ||   // CJK compatibility
           (cp >= 0x20000 && cp <= 0x3FFFF);   // CJK extensions
}

// Decodes one UTF-8 codepoint starting at pos; on malformed input consumes a
// single byte and returns its value.
char32_t decode_utf8(std::string_view text, std::size_t& pos) {
    const auto byte = [&](std::size_t i) {
        return static_cast<unsigned char>(text[i]);
    };
    unsigned char b0 = byte(pos);
    std::size_t len = 1;
    char32_t cp = b0;
    if (b0 >= 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else if (b0 >= 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if (b0 >= 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    }
    if (len == 1 || pos + len > text.size()) {
        ++pos;
        return b0;
    }
    for (std::size_t i = 1; i < len; ++i) {
        unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return b0;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    pos += len;
    return cp;
}

TermId hash_token(std::string_view token, std::uint32_t vocab_size) {
    return static_cast<TermId>(fnv1a64(token.data(), token.size()) % vocab_size);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    return out;
}

}  // namespace

std::vector<TermId> tokenize(std::string_view text, std::uint32_t vocab_size) {
    if (vocab_size == 0) {
        throw ConfigError("tokenize: vocab_size must be positive");
    }
    std::vector<TermId> ids;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            ids.push_back(hash_token(current, vocab_size));
            current.clear();
        }
    };
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t start = pos;
        char32_t cp = decode_utf8(text, pos);
        if (is_separator(cp)) {
            flush();
        } else if (is_standalone(cp)) {
            flush();
            ids.push_back(hash_token(text.substr(start, pos - start), vocab_size));
        } else {
            current.append(text.substr(start, pos - start));
        }
    }
    flush();
    return ids;
}

std::vector<Passage> split_passages(const Document& doc, std::uint32_t vocab_size,
                                    std::uint32_t max_passage_tokens) {
    if (max_passage_tokens == 0) {
        throw ConfigError("split_passages: max_passage_tokens must be >= 1");
    }
    if (doc.doc_id.empty()) {
        throw DataError("split_passages: empty doc_id");
    }
    std::vector<TermId> tokens = tokenize(doc.text, vocab_size);
    std::vector<Passage> passages;
    std::uint32_t ordinal = 0;
    for (std::size_t offset = 0; offset < tokens.size(); offset += max_passage_tokens) {
        std::size_t len = std::min<std::size_t>(max_passage_tokens, tokens.size() - offset);
        Passage p;
        p.doc_id = doc.doc_id;
        p.ordinal = ordinal++;
        p.tokens.assign(tokens.begin() + offset, tokens.begin() + offset + len);
        passages.push_back(std::move(p));
    }
    return passages;
}

VectorReader::VectorReader(const std::filesystem::path& path, std::uint32_t vocab_size)
    : in_(path), path_(path.string()), vocab_size_(vocab_size) {
    if (!in_) {
        throw DataError("cannot open " + path_);
    }
}

bool VectorReader::next(VectorRecord& out) {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_no_;
        if (line.empty()) {
            continue;
        }
        const std::string where = path_ + ":" + std::to_string(line_no_);
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() ||
            !parsed.contains("id") || !parsed["id"].is_string() ||
            !parsed.contains("vector") || !parsed["vector"].is_object()) {
            throw DataError(where + ": malformed vector record");
        }
        std::string id = parsed["id"].get<std::string>();
        if (id.empty()) {
            throw DataError(where + ": empty id");
        }
        if (!seen_ids_.insert(id).second) {
            throw DataError(where + ": duplicate id '" + id + "'");
        }
        std::vector<Entry> entries;
        for (const auto& [key, value] : parsed["vector"].items()) {
            TermId term = 0;
            auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), term);
            if (ec != std::errc() || ptr != key.data() + key.size()) {
                throw DataError(where + ": bad term id '" + key + "'");
            }
            if (!value.is_number()) {
                throw DataError(where + ": non-numeric weight for term " + key);
            }
            entries.push_back({term, value.get<double>()});
        }
        std::sort(entries.begin(), entries.end(),
                  [](const Entry& a, const Entry& b) { return a.term < b.term; });
        try {
            out.vector = SparseVector(vocab_size_, std::move(entries));
        } catch (const DataError& e) {
            throw DataError(where + ": " + e.what());
        }
        out.id = std::move(id);
        return true;
    }
    return false;
}

std::vector<VectorRecord> read_vectors(const std::filesystem::path& path,
                                       std::uint32_t vocab_size) {
    VectorReader reader(path, vocab_size);
    std::vector<VectorRecord> records;
    VectorRecord rec;
    while (reader.next(rec)) {
        records.push_back(std::move(rec));
    }
    return records;
}

void write_vectors(std::span<const VectorRecord> records,
                   const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const auto& rec : records) {
        ordered_json vec = ordered_json::object();
        for (const Entry& e : rec.vector.entries()) {
            vec[std::to_string(e.term)] = e.weight;
        }
        ordered_json line = {{"id", rec.id}, {"vector", std::move(vec)}};
        out << line.dump() << '\n';
    }
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

std::vector<Document> read_documents(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<Document> docs;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() ||
            !parsed.contains("id") || !parsed["id"].is_string() ||
            !parsed.contains("text") || !parsed["text"].is_string()) {
            throw DataError(where + ": malformed document record");
        }
        Document doc{parsed["id"].get<std::string>(), parsed["text"].get<std::string>()};
        if (doc.doc_id.empty()) {
            throw DataError(where + ": empty doc id");
        }
        if (!seen.insert(doc.doc_id).second) {
            throw DataError(where + ": duplicate doc id '" + doc.doc_id + "'");
        }
        docs.push_back(std::move(doc));
    }
    return docs;
}

void write_documents(std::span<const Document> docs, const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const auto& doc : docs) {
        ordered_json line = {{"id", doc.doc_id}, {"text", doc.text}};
        out << line.dump() << '\n';
    }
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

std::vector<Topic> read_topics(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);
    std::vector<Topic> topics;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        auto tab = line.find('\t');
        if (tab == std::string::npos || tab == 0) {
            throw DataError(where + ": expected 'query_id<TAB>title'");
        }
        Topic t{line.substr(0, tab), line.substr(tab + 1)};
        if (!seen.insert(t.query_id).second) {
            throw DataError(where + ": duplicate query id '" + t.query_id + "'");
        }
        topics.push_back(std::move(t));
    }
    return topics;
}

std::vector<Passage> read_passages(const std::filesystem::path& path,
                                   std::uint32_t vocab_size) {
    std::ifstream in = open_input(path);
    std::vector<Passage> passages;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        const std::string where = path.string() + ":" + std::to_string(line_no);
        json parsed = json::parse(line, nullptr, false);
        if (parsed.is_discarded() || !parsed.is_object() ||
            !parsed.contains("id") || !parsed["id"].is_string() ||
            !parsed.contains("tokens") || !parsed["tokens"].is_array()) {
            throw DataError(where + ": malformed passage record");
        }
        std::string id = parsed["id"].get<std::string>();
        auto hash = id.rfind('#');
        if (hash == std::string::npos || hash == 0 || hash + 1 == id.size()) {
            throw DataError(where + ": passage id must be 'doc#ordinal'");
        }
        if (!seen.insert(id).second) {
            throw DataError(where + ": duplicate passage id '" + id + "'");
        }
        Passage p;
        p.doc_id = id.substr(0, hash);
        auto ord = std::string_view(id).substr(hash + 1);
        auto [ptr, ec] = std::from_chars(ord.data(), ord.data() + ord.size(), p.ordinal);
        if (ec != std::errc() || ptr != ord.data() + ord.size()) {
            throw DataError(where + ": bad ordinal in id '" + id + "'");
        }
        for (const auto& tok : parsed["tokens"]) {
            if (!tok.is_number_unsigned()) {
                throw DataError(where + ": token ids must be unsigned integers");
            }
            auto value = tok.get<std::uint64_t>();
            if (value >= vocab_size) {
                throw DataError(where + ": token id " + std::to_string(value) +
                                " out of range for vocab size " +
                                std::to_string(vocab_size));
            }
            p.tokens.push_back(static_cast<TermId>(value));
        }
        if (p.tokens.empty()) {
            throw DataError(where + ": passage has no tokens");
        }
        passages.push_back(std::move(p));
    }
    // Ordinals must be contiguous from 0 within each document.
    std::unordered_map<std::string, std::vector<bool>> ordinals;
    for (const auto& p : passages) {
        auto& present = ordinals[p.doc_id];
        if (p.ordinal >= present.size()) {
            present.resize(p.ordinal + 1, false);
        }
        present[p.ordinal] = true;
    }
    for (const auto& [doc_id, present] : ordinals) {
        for (std::size_t i = 0; i < present.size(); ++i) {
            if (!present[i]) {
                throw DataError(path.string() + ": document '" + doc_id +
                                "' is missing passage ordinal " + std::to_string(i));
            }
        }
    }
    return passages;
}

void write_passages(std::span<const Passage> passages,
                    const std::filesystem::path& path) {
    std::ofstream out = open_output(path);
    for (const auto& p : passages) {
        ordered_json line = {
            {"id", p.doc_id + "#" + std::to_string(p.ordinal)},
            {"tokens", p.tokens},
        };
        out << line.dump() << '\n';
    }
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

}  // namespace lsr
