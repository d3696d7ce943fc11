#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lsr/sparse_vector.hpp"

namespace lsr {

struct TopK {
    std::uint32_t k;

    friend bool operator==(const TopK&, const TopK&) = default;
};

struct TopP {
    double p;

    friend bool operator==(const TopP&, const TopP&) = default;
};

/// Tagged choice between the two masking schemes.
class MaskConfig {
  public:
    static MaskConfig top_k(std::uint32_t k) { return MaskConfig(TopK{k}); }

    /// Throws ConfigError when p is outside [0, 1].
    static MaskConfig top_p(double p);

    bool is_top_k() const { return std::holds_alternative<TopK>(value_); }
    bool is_top_p() const { return std::holds_alternative<TopP>(value_); }
    std::uint32_t k() const { return std::get<TopK>(value_).k; }
    double p() const { return std::get<TopP>(value_).p; }

    /// "topk:128" / "topp:0.98". Round-trips through parse().
    std::string to_string() const;
    static MaskConfig parse(std::string_view text);

    friend bool operator==(const MaskConfig&, const MaskConfig&) = default;

  private:
    explicit MaskConfig(std::variant<TopK, TopP> v) : value_(v) {}

    std::variant<TopK, TopP> value_{TopK{0}};
};

/// Keeps the k largest-weight entries, ties broken by smaller term id.
/// k >= nnz is the identity; k == 0 yields the empty vector.
SparseVector top_k_mask(const SparseVector& v, std::uint32_t k);

/// Keeps the shortest prefix of entries ordered by (weight desc, id asc)
/// whose mass reaches p * total_mass(v). The crossing entry is included.
/// p == 1 keeps everything, p == 0 and zero-mass inputs yield the empty
/// vector. Throws ConfigError when p is outside [0, 1].
SparseVector top_p_mask(const SparseVector& v, double p);

SparseVector apply_mask(const SparseVector& v, const MaskConfig& cfg);

/// Masks a batch of vectors; the serial reference for mask_batch_omp.
std::vector<SparseVector> mask_batch(std::span<const SparseVector> vs,
                                     const MaskConfig& cfg);

/// OpenMP variant. threads == 0 uses the runtime default. Output is
/// identical to mask_batch.
std::vector<SparseVector> mask_batch_omp(std::span<const SparseVector> vs,
                                         const MaskConfig& cfg,
                                         int threads = 0);

}  // namespace lsr
