#include "lsr/index.hpp"

#include <omp.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <unordered_set>

#include "lsr/error.hpp"

namespace lsr {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::array<char, 8> kMagic = {'L', 'S', 'R', 'I', 'N', 'D', 'X', '\0'};
constexpr std::uint32_t kVersion = 1;

std::uint32_t crc32(std::span<const char> data) {
    static const auto table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int bit = 0; bit < 8; ++bit) {
                c = (c & 1) ? (0xEDB88320U ^ (c >> 1)) : (c >> 1);
            }
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFU;
    for (char byte : data) {
        crc = table[(crc ^ static_cast<unsigned char>(byte)) & 0xFF] ^ (crc >> 8);
    }
    return crc ^ 0xFFFFFFFFU;
}

struct Writer {
    std::string buf;

    void bytes(const void* data, std::size_t n) {
        buf.append(static_cast<const char*>(data), n);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u16(std::uint16_t v) { bytes(&v, 2); }
    void u32(std::uint32_t v) { bytes(&v, 4); }
    void u64(std::uint64_t v) { bytes(&v, 8); }
    void f64(double v) { bytes(&v, 8); }
    void str(const std::string& s) {
        if (s.size() > 0xFFFF) {
            throw DataError("index: doc id longer than 65535 bytes");
        }
        u16(static_cast<std::uint16_t>(s.size()));
        bytes(s.data(), s.size());
    }
};

struct Reader {
    std::span<const char> data;
    std::size_t pos = 0;

    void bytes(void* out, std::size_t n) {
        if (pos + n > data.size()) {
            throw IndexTruncatedError("index file: unexpected end of data");
        }
        std::memcpy(out, data.data() + pos, n);
        pos += n;
    }
    std::uint8_t u8() { std::uint8_t v; bytes(&v, 1); return v; }
    std::uint16_t u16() { std::uint16_t v; bytes(&v, 2); return v; }
    std::uint32_t u32() { std::uint32_t v; bytes(&v, 4); return v; }
    std::uint64_t u64() { std::uint64_t v; bytes(&v, 8); return v; }
    double f64() { double v; bytes(&v, 8); return v; }
    std::string str() {
        std::uint16_t len = u16();
        std::string s(len, '\0');
        bytes(s.data(), len);
        return s;
    }
};

struct ParsedId {
    std::string doc_id;
    std::uint32_t ordinal;
};

ParsedId parse_passage_id(const std::string& id) {
    auto hash = id.rfind('#');
    if (hash == std::string::npos || hash == 0 || hash + 1 == id.size()) {
        throw DataError("index: record id '" + id + "' is not 'doc#ordinal'");
    }
    ParsedId parsed;
    parsed.doc_id = id.substr(0, hash);
    auto ord = std::string_view(id).substr(hash + 1);
    auto [ptr, ec] = std::from_chars(ord.data(), ord.data() + ord.size(), parsed.ordinal);
    if (ec != std::errc() || ptr != ord.data() + ord.size()) {
        throw DataError("index: bad ordinal in record id '" + id + "'");
    }
    return parsed;
}

// Postings for one contiguous chunk of records, keyed by term. Chunk-local
// maps are merged in chunk order, which keeps every list ascending by
// passage_ref without a sort.
using ChunkPostings = std::map<TermId, std::vector<Posting>>;

ChunkPostings build_chunk(std::span<const VectorRecord> records,
                          std::size_t ref_offset, const MaskConfig& mask,
                          std::uint32_t scale, std::uint32_t vocab_size,
                          std::vector<PassageInfo>& passages_out) {
    ChunkPostings postings;
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.vector.vocab_size() != vocab_size) {
            throw DataError("index: record '" + rec.id + "' has vocab size " +
                            std::to_string(rec.vector.vocab_size()) +
                            ", expected " + std::to_string(vocab_size));
        }
        ParsedId parsed = parse_passage_id(rec.id);
        passages_out[ref_offset + i] = {std::move(parsed.doc_id), parsed.ordinal};
        const auto ref = static_cast<std::uint32_t>(ref_offset + i);
        SparseVector masked = apply_mask(rec.vector, mask);
        for (const Entry& e : masked.entries()) {
            postings[e.term].push_back({ref, quantize(e.weight, scale)});
        }
    }
    return postings;
}

ImpactIndex assemble(std::vector<ChunkPostings> chunks,
                     std::vector<PassageInfo> passages, const MaskConfig& mask,
                     std::uint32_t scale, std::uint32_t vocab_size,
                     Clock::time_point started) {
    std::unordered_set<std::string> seen;
    seen.reserve(passages.size());
    for (const auto& p : passages) {
        if (!seen.insert(p.doc_id + "#" + std::to_string(p.ordinal)).second) {
            throw DataError("index: duplicate passage (" + p.doc_id + ", " +
                            std::to_string(p.ordinal) + ")");
        }
    }
    std::vector<std::pair<TermId, std::vector<Posting>>> merged;
    for (auto& chunk : chunks) {
        for (auto& [term, list] : chunk) {
            auto it = std::lower_bound(
                merged.begin(), merged.end(), term,
                [](const auto& pair, TermId t) { return pair.first < t; });
            if (it == merged.end() || it->first != term) {
                merged.insert(it, {term, std::move(list)});
            } else {
                it->second.insert(it->second.end(), list.begin(), list.end());
            }
        }
    }
    IndexMetadata meta;
    meta.vocab_size = vocab_size;
    meta.scale = scale;
    meta.mask = mask;
    meta.build_seconds =
        std::chrono::duration<double>(Clock::now() - started).count();
    return ImpactIndex(std::move(meta), std::move(passages), std::move(merged));
}

std::uint32_t common_vocab(std::span<const VectorRecord> records) {
    return records.empty() ? 0 : records.front().vector.vocab_size();
}

}  // namespace

std::uint16_t quantize(double weight, std::uint32_t scale) {
    if (scale == 0) {
        throw ConfigError("quantize: scale must be positive");
    }
    long long q = std::llround(weight * static_cast<double>(scale));
    if (q < 1) {
        return 1;
    }
    if (q > 65535) {
        return 65535;
    }
    return static_cast<std::uint16_t>(q);
}

ImpactIndex::ImpactIndex(IndexMetadata meta, std::vector<PassageInfo> passages,
                         std::vector<std::pair<TermId, std::vector<Posting>>> postings)
    : meta_(std::move(meta)),
      passages_(std::move(passages)),
      postings_(std::move(postings)) {}

const std::vector<Posting>* ImpactIndex::postings_for(TermId term) const {
    auto it = std::lower_bound(
        postings_.begin(), postings_.end(), term,
        [](const auto& pair, TermId t) { return pair.first < t; });
    if (it == postings_.end() || it->first != term) {
        return nullptr;
    }
    return &it->second;
}

std::size_t ImpactIndex::total_postings() const {
    std::size_t n = 0;
    for (const auto& [term, list] : postings_) {
        n += list.size();
    }
    return n;
}

bool ImpactIndex::operator==(const ImpactIndex& other) const {
    return meta_.vocab_size == other.meta_.vocab_size &&
           meta_.scale == other.meta_.scale && meta_.mask == other.meta_.mask &&
           passages_ == other.passages_ && postings_ == other.postings_;
}

ImpactIndex build_index(std::span<const VectorRecord> records,
                        const MaskConfig& mask, std::uint32_t scale) {
    auto started = Clock::now();
    const std::uint32_t vocab_size = common_vocab(records);
    std::vector<PassageInfo> passages(records.size());
    std::vector<ChunkPostings> chunks;
    chunks.push_back(build_chunk(records, 0, mask, scale, vocab_size, passages));
    return assemble(std::move(chunks), std::move(passages), mask, scale,
                    vocab_size, started);
}

ImpactIndex build_index_omp(std::span<const VectorRecord> records,
                            const MaskConfig& mask, std::uint32_t scale,
                            int threads) {
    auto started = Clock::now();
    if (threads <= 0) {
        threads = omp_get_max_threads();
    }
    const std::uint32_t vocab_size = common_vocab(records);
    const std::size_t n = records.size();
    const std::size_t num_chunks =
        std::min<std::size_t>(static_cast<std::size_t>(threads), std::max<std::size_t>(n, 1));
    const std::size_t chunk_size = (n + num_chunks - 1) / num_chunks;

    std::vector<PassageInfo> passages(n);
    std::vector<ChunkPostings> chunks(num_chunks);
    std::exception_ptr failure;

#pragma omp parallel for schedule(static, 1) num_threads(threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(num_chunks); ++c) {
        try {
            const std::size_t begin = static_cast<std::size_t>(c) * chunk_size;
            const std::size_t end = std::min(n, begin + chunk_size);
            if (begin < end) {
                chunks[c] = build_chunk(records.subspan(begin, end - begin), begin,
                                        mask, scale, vocab_size, passages);
            }
        } catch (...) {
#pragma omp critical
            if (!failure) {
                failure = std::current_exception();
            }
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return assemble(std::move(chunks), std::move(passages), mask, scale,
                    vocab_size, started);
}

void save_index(const ImpactIndex& index, const std::filesystem::path& path) {
    Writer w;
    w.bytes(kMagic.data(), kMagic.size());
    w.u32(kVersion);
    w.u64(0);  // total file size, patched below
    const auto& meta = index.metadata();
    w.u32(meta.vocab_size);
    w.u32(meta.scale);
    w.u8(meta.mask.is_top_k() ? 0 : 1);
    w.u32(meta.mask.is_top_k() ? meta.mask.k() : 0);
    w.f64(meta.mask.is_top_p() ? meta.mask.p() : 0.0);
    w.u32(static_cast<std::uint32_t>(index.num_passages()));
    w.u32(static_cast<std::uint32_t>(index.num_terms()));
    for (const auto& p : index.passages()) {
        w.str(p.doc_id);
        w.u32(p.ordinal);
    }
    for (const auto& [term, list] : index.terms()) {
        w.u32(term);
        w.u32(static_cast<std::uint32_t>(list.size()));
        for (const Posting& post : list) {
            w.u32(post.passage_ref);
            w.u16(post.impact);
        }
    }
    const std::uint64_t total = w.buf.size() + 4;  // plus trailing crc
    std::memcpy(w.buf.data() + kMagic.size() + 4, &total, sizeof(total));
    w.u32(crc32(std::span<const char>(w.buf.data(), w.buf.size())));

    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw DataError("cannot open " + path.string() + " for writing");
    }
    out.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
    if (!out) {
        throw DataError("write failed: " + path.string());
    }
}

ImpactIndex load_index(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw DataError("cannot open " + path.string());
    }
    std::string buf((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());

    constexpr std::size_t kHeaderBytes = 8 + 4 + 8;
    if (buf.size() < kHeaderBytes) {
        throw IndexTruncatedError("index file: shorter than header");
    }
    if (std::memcmp(buf.data(), kMagic.data(), kMagic.size()) != 0) {
        throw IndexFormatError("index file: bad magic");
    }
    Reader r{std::span<const char>(buf.data(), buf.size()), kMagic.size()};
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw IndexVersionError("index file: version " + std::to_string(version) +
                                ", expected " + std::to_string(kVersion));
    }
    const std::uint64_t expected_size = r.u64();
    if (buf.size() < expected_size) {
        throw IndexTruncatedError("index file: " + std::to_string(buf.size()) +
                                  " bytes, header declares " +
                                  std::to_string(expected_size));
    }
    if (buf.size() > expected_size) {
        throw IndexFormatError("index file: trailing bytes after declared size");
    }
    std::uint32_t stored_crc = 0;
    std::memcpy(&stored_crc, buf.data() + buf.size() - 4, 4);
    const std::uint32_t actual_crc =
        crc32(std::span<const char>(buf.data(), buf.size() - 4));
    if (stored_crc != actual_crc) {
        throw IndexChecksumError("index file: checksum mismatch");
    }

    IndexMetadata meta;
    meta.vocab_size = r.u32();
    meta.scale = r.u32();
    const std::uint8_t mask_kind = r.u8();
    const std::uint32_t mask_k = r.u32();
    const double mask_p = r.f64();
    if (mask_kind == 0) {
        meta.mask = MaskConfig::top_k(mask_k);
    } else if (mask_kind == 1) {
        meta.mask = MaskConfig::top_p(mask_p);
    } else {
        throw IndexFormatError("index file: unknown mask kind");
    }
    const std::uint32_t num_passages = r.u32();
    const std::uint32_t num_terms = r.u32();
    std::vector<PassageInfo> passages(num_passages);
    for (auto& p : passages) {
        p.doc_id = r.str();
        p.ordinal = r.u32();
    }
    std::vector<std::pair<TermId, std::vector<Posting>>> postings;
    postings.reserve(num_terms);
    for (std::uint32_t t = 0; t < num_terms; ++t) {
        const TermId term = r.u32();
        const std::uint32_t count = r.u32();
        std::vector<Posting> list(count);
        for (auto& post : list) {
            post.passage_ref = r.u32();
            post.impact = r.u16();
        }
        postings.emplace_back(term, std::move(list));
    }
    if (r.pos != buf.size() - 4) {
        throw IndexFormatError("index file: payload size mismatch");
    }
    return ImpactIndex(std::move(meta), std::move(passages), std::move(postings));
}

}  // namespace lsr
