#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "lsr/corpus.hpp"
#include "lsr/mask.hpp"

namespace lsr {

struct Posting {
    std::uint32_t passage_ref;
    std::uint16_t impact;  // always >= 1

    friend bool operator==(const Posting&, const Posting&) = default;
};

struct PassageInfo {
    std::string doc_id;
    std::uint32_t ordinal;

    friend bool operator==(const PassageInfo&, const PassageInfo&) = default;
};

struct IndexMetadata {
    std::uint32_t vocab_size = 0;
    std::uint32_t scale = 0;
    MaskConfig mask = MaskConfig::top_k(0);
    // Wall-clock build time. Reported in build statistics, deliberately not
    // persisted: saved bytes depend only on inputs and config.
    double build_seconds = 0.0;
};

/// Linear quantization of a positive weight to a 16-bit impact:
/// round(w * scale) clamped to [1, 65535]. scale must be positive.
std::uint16_t quantize(double weight, std::uint32_t scale);

/// Impact-quantized inverted index over passages. Immutable once built;
/// safe for concurrent readers.
class ImpactIndex {
  public:
    ImpactIndex() = default;
    ImpactIndex(IndexMetadata meta, std::vector<PassageInfo> passages,
                std::vector<std::pair<TermId, std::vector<Posting>>> postings);

    const IndexMetadata& metadata() const { return meta_; }
    const std::vector<PassageInfo>& passages() const { return passages_; }
    const std::vector<std::pair<TermId, std::vector<Posting>>>& terms() const {
        return postings_;
    }

    /// Posting list for a term, or nullptr when the term has none.
    const std::vector<Posting>* postings_for(TermId term) const;

    std::size_t num_passages() const { return passages_.size(); }
    std::size_t num_terms() const { return postings_.size(); }
    std::size_t total_postings() const;

    bool operator==(const ImpactIndex&) const;

  private:
    IndexMetadata meta_;
    std::vector<PassageInfo> passages_;
    // Sorted ascending by term id; each list sorted ascending by passage_ref.
    std::vector<std::pair<TermId, std::vector<Posting>>> postings_;
};

/// Masks every record's vector, quantizes, and accumulates postings.
/// Record ids must parse as "doc#ordinal"; duplicate (doc, ordinal) pairs are
/// rejected. Output is deterministic for a fixed input order.
ImpactIndex build_index(std::span<const VectorRecord> records,
                        const MaskConfig& mask, std::uint32_t scale);

/// OpenMP build: shards the input into contiguous chunks and merges by term
/// id then passage_ref, so the result is identical to build_index.
ImpactIndex build_index_omp(std::span<const VectorRecord> records,
                            const MaskConfig& mask, std::uint32_t scale,
                            int threads = 0);

/// Binary persistence (layout in docs/index-format.md). Bit-identical output
/// for equal indexes; a trailing CRC-32 guards the whole file.
void save_index(const ImpactIndex& index, const std::filesystem::path& path);

/// Throws IndexFormatError / IndexVersionError / IndexTruncatedError /
/// IndexChecksumError for the respective corruption classes.
ImpactIndex load_index(const std::filesystem::path& path);

}  // namespace lsr
