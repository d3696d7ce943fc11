#pragma once

#include <cstdint>
#include <vector>

namespace lsr {

using TermId = std::uint32_t;

struct Entry {
    TermId term;
    double weight;

    friend bool operator==(const Entry&, const Entry&) = default;
};

/// Sparse term-importance vector over a fixed vocabulary. Entries are kept
/// sorted strictly ascending by term id; only strictly positive weights are
/// stored; every term id is < vocab_size.
class SparseVector {
  public:
    SparseVector() = default;

    /// Validating constructor; throws DataError on any invariant violation.
    SparseVector(std::uint32_t vocab_size, std::vector<Entry> entries);

    /// Fast path for callers that produce entries already in canonical form
    /// (masking, aggregation). Checked only by assertions.
    static SparseVector from_sorted_unchecked(std::uint32_t vocab_size,
                                              std::vector<Entry> entries);

    std::uint32_t vocab_size() const { return vocab_size_; }
    std::size_t nnz() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    const std::vector<Entry>& entries() const { return entries_; }

    friend bool operator==(const SparseVector&, const SparseVector&) = default;

  private:
    std::vector<Entry> entries_;
    std::uint32_t vocab_size_ = 0;
};

/// Sum of all stored weights, accumulated in ascending term-id order so the
/// result is reproducible bit for bit on a given platform.
double total_mass(const SparseVector& v);

/// Dot product over shared term ids. Throws DataError when the vocabularies
/// differ in size.
double dot_score(const SparseVector& q, const SparseVector& d);

}  // namespace lsr
