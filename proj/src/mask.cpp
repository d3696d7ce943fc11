#include "lsr/mask.hpp"

#include <omp.h>

#include <algorithm>
#include <charconv>

#include "lsr/error.hpp"
#include "lsr/format.hpp"

namespace lsr {

namespace {

// Both schemes rank entries by (weight desc, term id asc). Selection runs on
// a weights-only copy: once the cut weight and the quota of ties at the cut
// are known, a sweep of the id-sorted input reproduces that ranking exactly,
// and the output stays sorted by id for free.
SparseVector keep_above_cut(const SparseVector& v, double cut, std::size_t quota,
                            std::size_t kept_total) {
    std::vector<Entry> out;
    out.reserve(kept_total);
    for (const Entry& e : v.entries()) {
        if (e.weight > cut) {
            out.push_back(e);
        } else if (e.weight == cut && quota > 0) {
            out.push_back(e);
            --quota;
        }
    }
    return SparseVector::from_sorted_unchecked(v.vocab_size(), std::move(out));
}

std::size_t count_above(const SparseVector& v, double cut) {
    std::size_t above = 0;
    for (const Entry& e : v.entries()) {
        if (e.weight > cut) {
            ++above;
        }
    }
    return above;
}

}  // namespace

MaskConfig MaskConfig::top_p(double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("top-p mask: p must lie in [0, 1], got " +
                          format_double(p));
    }
    return MaskConfig(TopP{p});
}

std::string MaskConfig::to_string() const {
    if (is_top_k()) {
        return "topk:" + std::to_string(k());
    }
    return "topp:" + format_double(p());
}

MaskConfig MaskConfig::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw ConfigError("mask: expected 'topk:<count>' or 'topp:<fraction>', got '" +
                          std::string(text) + "'");
    }
    auto kind = text.substr(0, colon);
    auto value = text.substr(colon + 1);
    if (kind == "topk") {
        std::uint32_t k = 0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), k);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw ConfigError("mask: bad top-k count '" + std::string(value) + "'");
        }
        return MaskConfig::top_k(k);
    }
    if (kind == "topp") {
        double p = 0.0;
        auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), p);
        if (ec != std::errc() || ptr != value.data() + value.size()) {
            throw ConfigError("mask: bad top-p fraction '" + std::string(value) + "'");
        }
        return MaskConfig::top_p(p);
    }
    throw ConfigError("mask: unknown scheme '" + std::string(kind) + "'");
}

SparseVector top_k_mask(const SparseVector& v, std::uint32_t k) {
    const auto& entries = v.entries();
    if (k >= entries.size()) {
        return v;
    }
    if (k == 0) {
        return SparseVector::from_sorted_unchecked(v.vocab_size(), {});
    }
    // The k-th largest weight is the cut; entries above it are kept outright
    // and the remaining quota is filled from ties at the cut.
    std::vector<double> weights(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        weights[i] = entries[i].weight;
    }
    std::nth_element(weights.begin(), weights.begin() + (k - 1), weights.end(),
                     std::greater<double>());
    const double cut = weights[k - 1];
    return keep_above_cut(v, cut, k - count_above(v, cut), k);
}

SparseVector top_p_mask(const SparseVector& v, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ConfigError("top-p mask: p must lie in [0, 1], got " +
                          format_double(p));
    }
    const auto& entries = v.entries();
    if (entries.empty()) {
        return SparseVector::from_sorted_unchecked(v.vocab_size(), {});
    }
    const double threshold = p * total_mass(v);
    if (threshold <= 0.0) {
        return SparseVector::from_sorted_unchecked(v.vocab_size(), {});
    }
    if (p >= 1.0) {
        return v;
    }
    // Equal weights contribute equal addends, so the cumulative masses along
    // the (weight desc, id asc) order depend on the sorted weights alone; the
    // crossing prefix is found on a descending weight array and realized via
    // the cut-and-quota sweep.
    std::vector<double> weights(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        weights[i] = entries[i].weight;
    }
    std::sort(weights.begin(), weights.end(), std::greater<double>());
    double cumulative = 0.0;
    std::size_t kept = 0;
    while (kept < weights.size()) {
        cumulative += weights[kept];
        ++kept;
        if (cumulative >= threshold) {
            break;
        }
    }
    const double cut = weights[kept - 1];
    return keep_above_cut(v, cut, kept - count_above(v, cut), kept);
}

SparseVector apply_mask(const SparseVector& v, const MaskConfig& cfg) {
    if (cfg.is_top_k()) {
        return top_k_mask(v, cfg.k());
    }
    return top_p_mask(v, cfg.p());
}

std::vector<SparseVector> mask_batch(std::span<const SparseVector> vs,
                                     const MaskConfig& cfg) {
    std::vector<SparseVector> out(vs.size());
    for (std::size_t i = 0; i < vs.size(); ++i) {
        out[i] = apply_mask(vs[i], cfg);
    }
    return out;
}

std::vector<SparseVector> mask_batch_omp(std::span<const SparseVector> vs,
                                         const MaskConfig& cfg, int threads) {
    std::vector<SparseVector> out(vs.size());
    if (threads <= 0) {
        threads = omp_get_max_threads();
    }
#pragma omp parallel for schedule(dynamic, 64) num_threads(threads)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(vs.size()); ++i) {
        out[i] = apply_mask(vs[i], cfg);
    }
    return out;
}

}  // namespace lsr
