#include "lsr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "lsr/error.hpp"
#include "lsr/rng.hpp"

namespace lsr {

namespace {

// Distinct term ids, uniform over the vocabulary. Rejection is cheap because
// nnz is far below vocab_size in every configuration used here.
std::vector<TermId> sample_terms(SplitMix64& rng, std::uint32_t count,
                                 std::uint32_t vocab_size) {
    std::unordered_set<TermId> chosen;
    std::vector<TermId> terms;
    terms.reserve(count);
    while (terms.size() < count) {
        auto t = static_cast<TermId>(rng.next_range(0, vocab_size - 1));
        if (chosen.insert(t).second) {
            terms.push_back(t);
        }
    }
    return terms;
}

// Zipf-decayed weights with multiplicative jitter; position i gets roughly
// (i + 1)^-s. Jitter keeps weights tie-free without changing the profile.
SparseVector zipf_vector(SplitMix64& rng, const std::vector<TermId>& terms,
                         double exponent, std::uint32_t vocab_size) {
    std::vector<Entry> entries;
    entries.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
        double base = std::pow(static_cast<double>(i + 1), -exponent);
        double jitter = 0.75 + 0.5 * rng.next_unit();
        entries.push_back({terms[i], base * jitter});
    }
    std::sort(entries.begin(), entries.end(),
              [](const Entry& a, const Entry& b) { return a.term < b.term; });
    return SparseVector(vocab_size, std::move(entries));
}

std::uint32_t skewed_size(SplitMix64& rng, std::uint32_t lo, std::uint32_t hi) {
    double u = rng.next_unit();
    auto span = static_cast<double>(hi - lo);
    return lo + static_cast<std::uint32_t>(std::floor(span * std::sqrt(u)));
}

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
    if (spec.vocab_size == 0 || spec.num_docs == 0) {
        throw ConfigError("synthetic: vocab_size and num_docs must be positive");
    }
    if (spec.doc_nnz_min == 0 || spec.doc_nnz_min > spec.doc_nnz_max ||
        spec.query_nnz_min == 0 || spec.query_nnz_min > spec.query_nnz_max) {
        throw ConfigError("synthetic: bad nnz ranges");
    }
    if (spec.doc_nnz_max > spec.vocab_size || spec.query_nnz_max > spec.vocab_size) {
        throw ConfigError("synthetic: nnz range exceeds vocab size");
    }
    if (spec.max_passages_per_doc == 0) {
        throw ConfigError("synthetic: max_passages_per_doc must be >= 1");
    }

    SplitMix64 rng(spec.seed);
    SyntheticCorpus corpus;

    // Remember each document's first passage so queries can be derived from it.
    std::vector<std::size_t> first_passage(spec.num_docs);
    for (std::uint32_t d = 0; d < spec.num_docs; ++d) {
        auto passages = static_cast<std::uint32_t>(
            rng.next_range(1, spec.max_passages_per_doc));
        first_passage[d] = corpus.passages.size();
        for (std::uint32_t p = 0; p < passages; ++p) {
            std::uint32_t nnz = skewed_size(rng, spec.doc_nnz_min, spec.doc_nnz_max);
            auto terms = sample_terms(rng, nnz, spec.vocab_size);
            VectorRecord rec;
            rec.id = "d" + std::to_string(d) + "#" + std::to_string(p);
            rec.vector = zipf_vector(rng, terms, spec.doc_zipf_exponent, spec.vocab_size);
            corpus.passages.push_back(std::move(rec));
        }
    }

    for (std::uint32_t q = 0; q < spec.num_queries; ++q) {
        auto source_doc = static_cast<std::uint32_t>(rng.next_range(0, spec.num_docs - 1));
        const SparseVector& source = corpus.passages[first_passage[source_doc]].vector;

        auto nnz = static_cast<std::uint32_t>(
            rng.next_range(spec.query_nnz_min, spec.query_nnz_max));
        std::uint32_t noise = std::min(spec.query_noise_terms, nnz - 1);

        // Source document's strongest terms, by weight.
        std::vector<Entry> by_weight(source.entries());
        std::sort(by_weight.begin(), by_weight.end(),
                  [](const Entry& a, const Entry& b) {
                      if (a.weight != b.weight) {
                          return a.weight > b.weight;
                      }
                      return a.term < b.term;
                  });
        std::uint32_t from_doc = std::min<std::uint32_t>(
            nnz - noise, static_cast<std::uint32_t>(by_weight.size()));

        std::unordered_set<TermId> chosen;
        std::vector<TermId> terms;
        for (std::uint32_t i = 0; i < from_doc; ++i) {
            terms.push_back(by_weight[i].term);
            chosen.insert(by_weight[i].term);
        }
        while (terms.size() < nnz) {
            auto t = static_cast<TermId>(rng.next_range(0, spec.vocab_size - 1));
            if (chosen.insert(t).second) {
                terms.push_back(t);
            }
        }
        // Shuffle so the steep weight profile lands on a random mix of
        // source and noise terms.
        for (std::size_t i = terms.size(); i > 1; --i) {
            std::swap(terms[i - 1], terms[rng.next_range(0, i - 1)]);
        }

        VectorRecord rec;
        rec.id = "q" + std::to_string(q);
        rec.vector = zipf_vector(rng, terms, spec.query_zipf_exponent, spec.vocab_size);
        corpus.qrels.add(rec.id, "d" + std::to_string(source_doc), 1);
        corpus.queries.push_back(std::move(rec));
    }
    return corpus;
}

}  // namespace lsr
