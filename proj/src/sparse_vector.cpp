#include "lsr/sparse_vector.hpp"

#include <cassert>
#include <utility>

#include "lsr/error.hpp"

namespace lsr {

namespace {

void validate(std::uint32_t vocab_size, const std::vector<Entry>& entries) {
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].term >= vocab_size) {
            throw DataError("sparse vector: term id " +
                            std::to_string(entries[i].term) +
                            " out of range for vocab size " +
                            std::to_string(vocab_size));
        }
        if (!(entries[i].weight > 0.0)) {
            throw DataError("sparse vector: non-positive weight at term " +
                            std::to_string(entries[i].term));
        }
        if (i > 0 && entries[i - 1].term >= entries[i].term) {
            throw DataError("sparse vector: term ids not strictly ascending");
        }
    }
}

}  // namespace

SparseVector::SparseVector(std::uint32_t vocab_size, std::vector<Entry> entries)
    : entries_(std::move(entries)), vocab_size_(vocab_size) {
    validate(vocab_size_, entries_);
}

SparseVector SparseVector::from_sorted_unchecked(std::uint32_t vocab_size,
                                                 std::vector<Entry> entries) {
    SparseVector v;
    v.vocab_size_ = vocab_size;
    v.entries_ = std::move(entries);
#ifndef NDEBUG
    validate(v.vocab_size_, v.entries_);
#endif
    return v;
}

double total_mass(const SparseVector& v) {
    double sum = 0.0;
    for (const Entry& e : v.entries()) {
        sum += e.weight;
    }
    return sum;
}

double dot_score(const SparseVector& q, const SparseVector& d) {
    if (q.vocab_size() != d.vocab_size()) {
        throw DataError("dot_score: vocab size mismatch (" +
                        std::to_string(q.vocab_size()) + " vs " +
                        std::to_string(d.vocab_size()) + ")");
    }
    const auto& a = q.entries();
    const auto& b = d.entries();
    double sum = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].term < b[j].term) {
            ++i;
        } else if (b[j].term < a[i].term) {
            ++j;
        } else {
            sum += a[i].weight * b[j].weight;
            ++i;
            ++j;
        }
    }
    return sum;
}

}  // namespace lsr
