#include <doctest.h>

#include <cmath>
#include <vector>

#include "lsr/encoder.hpp"
#include "lsr/error.hpp"
#include "lsr/rng.hpp"

using namespace lsr;

namespace {

// Straightforward re-implementation of the head on top of plain loops,
// organized differently from the library (explicit temporaries, no fused
// accumulation). Used as the dual-route check.
std::vector<double> reference_head_row(const std::vector<double>& h,
                                       const HeadParams& params) {
    const std::size_t dim = params.hidden_dim;
    std::vector<double> linear(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        for (std::size_t j = 0; j < dim; ++j) {
            linear[i] += params.linear_weights[i * dim + j] * h[j];
        }
        linear[i] += params.linear_bias[i];
    }
    std::vector<double> activated(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        activated[i] = linear[i] * 0.5 * (1.0 + std::erf(linear[i] / std::sqrt(2.0)));
    }
    double mean = 0.0;
    for (double x : activated) {
        mean += x;
    }
    mean /= static_cast<double>(dim);
    double var = 0.0;
    for (double x : activated) {
        var += (x - mean) * (x - mean);
    }
    var /= static_cast<double>(dim);
    std::vector<double> normed(dim);
    for (std::size_t i = 0; i < dim; ++i) {
        normed[i] = params.ln_gain[i] * (activated[i] - mean) / std::sqrt(var + 1e-5) +
                    params.ln_bias[i];
    }
    std::vector<double> logits(params.vocab_size);
    for (std::size_t j = 0; j < params.vocab_size; ++j) {
        double acc = 0.0;
        for (std::size_t d = 0; d < dim; ++d) {
            acc += normed[d] * params.embeddings[j * dim + d];
        }
        logits[j] = acc + params.vocab_bias[j];
    }
    return logits;
}

HeadParams zero_embedding_params(std::uint32_t hidden, std::uint32_t vocab) {
    HeadParams p;
    p.hidden_dim = hidden;
    p.vocab_size = vocab;
    p.linear_weights.assign(static_cast<std::size_t>(hidden) * hidden, 0.0);
    p.linear_bias.assign(hidden, 0.0);
    p.ln_gain.assign(hidden, 1.0);
    p.ln_bias.assign(hidden, 0.0);
    p.embeddings.assign(static_cast<std::size_t>(vocab) * hidden, 0.0);
    p.vocab_bias.assign(vocab, 0.0);
    return p;
}

}  // namespace

TEST_CASE("gelu") {
    CHECK(gelu(0.0) == 0.0);
    CHECK(gelu(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-9));
    for (double x : {6.0, 8.0, 12.0}) {
        CHECK(std::abs(gelu(x) - x) < 1e-6);
    }
    CHECK(gelu(-12.0) == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("layer_norm") {
    std::vector<double> gain{1.0, 1.0};
    std::vector<double> bias{0.0, 0.0};

    auto constant = layer_norm(std::vector<double>{3.0, 3.0}, gain, bias);
    CHECK(constant[0] == 0.0);
    CHECK(constant[1] == 0.0);

    auto pm = layer_norm(std::vector<double>{1.0, -1.0}, gain, bias);
    CHECK(pm[0] == doctest::Approx(0.9999950000374997).epsilon(1e-12));
    CHECK(pm[1] == doctest::Approx(-0.9999950000374997).epsilon(1e-12));

    std::vector<double> zero_gain{0.0, 0.0, 0.0};
    std::vector<double> some_bias{0.5, -1.0, 2.0};
    auto biased = layer_norm(std::vector<double>{4.0, 5.0, 6.0}, zero_gain, some_bias);
    CHECK(biased == some_bias);

    CHECK_THROWS_AS(layer_norm(std::vector<double>{1.0, 2.0}, std::vector<double>{1.0},
                               std::vector<double>{0.0, 0.0}),
                    DataError);
    CHECK_THROWS_AS(layer_norm(std::vector<double>{1.0}, std::vector<double>{1.0},
                               std::vector<double>{0.0}),
                    DataError);
}

TEST_CASE("layer_norm output is centered") {
    SplitMix64 rng(5);
    std::vector<double> gain(16, 1.0);
    std::vector<double> bias(16, 0.0);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> row(16);
        for (auto& x : row) {
            x = 10.0 * rng.next_pm1();
        }
        auto out = layer_norm(row, gain, bias);
        double mean = 0.0;
        for (double x : out) {
            mean += x;
        }
        CHECK(std::abs(mean / 16.0) <= 1e-9);
    }
}

TEST_CASE("term_importance_row with zeroed embeddings returns the vocab bias") {
    auto params = zero_embedding_params(4, 8);
    params.vocab_bias = {0.5, -1.0, 0.0, 2.5, -0.25, 3.0, 1.0, -2.0};
    std::vector<double> h{0.1, -0.2, 0.3, 0.4};
    CHECK(term_importance_row(h, params) == params.vocab_bias);
}

TEST_CASE("term_importance_row acts as a coordinate selector") {
    auto params = zero_embedding_params(2, 3);
    // identity linear layer
    params.linear_weights = {1.0, 0.0, 0.0, 1.0};
    // every embedding row selects the first transformed coordinate
    params.embeddings = {1.0, 0.0, 1.0, 0.0, 1.0, 0.0};
    std::vector<double> h{0.7, -0.4};

    std::vector<double> activated{gelu(h[0]), gelu(h[1])};
    auto transformed = layer_norm(activated, params.ln_gain, params.ln_bias);
    auto logits = term_importance_row(h, params);
    for (double logit : logits) {
        CHECK(logit == doctest::Approx(transformed[0]).epsilon(1e-15));
    }
}

TEST_CASE("term_importance_row matches the reference implementation") {
    auto params = HeadParams::generate(16, 200, 31337);
    SplitMix64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> h(16);
        for (auto& x : h) {
            x = rng.next_pm1();
        }
        auto got = term_importance_row(h, params);
        auto want = reference_head_row(h, params);
        REQUIRE(got.size() == want.size());
        for (std::size_t j = 0; j < got.size(); ++j) {
            CHECK(got[j] == doctest::Approx(want[j]).epsilon(1e-9));
        }
    }
    CHECK_THROWS_AS(term_importance_row(std::vector<double>{1.0}, params), DataError);
}

TEST_CASE("term_importance_row is linear in the embeddings") {
    auto params = HeadParams::generate(8, 64, 99);
    std::vector<double> h(8);
    SplitMix64 rng(3);
    for (auto& x : h) {
        x = rng.next_pm1();
    }
    auto base = term_importance_row(h, params);
    auto doubled_params = params;
    for (auto& e : doubled_params.embeddings) {
        e *= 2.0;
    }
    auto doubled = term_importance_row(h, doubled_params);
    for (std::size_t j = 0; j < base.size(); ++j) {
        double lhs = doubled[j] - params.vocab_bias[j];
        double rhs = 2.0 * (base[j] - params.vocab_bias[j]);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
    }
}

TEST_CASE("aggregate") {
    std::vector<std::vector<double>> negative_row{{-5.0, -1.0, -0.5}};
    CHECK(aggregate(negative_row, 3).nnz() == 0);

    std::vector<std::vector<double>> inverse_row{{std::exp(1.0) - 1.0, -1.0}};
    auto one = aggregate(inverse_row, 2);
    REQUIRE(one.nnz() == 1);
    CHECK(one.entries()[0].term == 0);
    CHECK(one.entries()[0].weight == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<std::vector<double>> two_rows{{1.0, -2.0}, {1.0, 0.0}};
    auto summed = aggregate(two_rows, 2);
    REQUIRE(summed.nnz() == 1);
    CHECK(summed.entries()[0].weight == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(aggregate(std::vector<std::vector<double>>{}, 2), DataError);
}

TEST_CASE("aggregated weights are strictly positive") {
    auto params = HeadParams::generate(8, 128, 12345);
    SplitMix64 rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<TermId> tokens;
        for (int t = 0; t < 12; ++t) {
            tokens.push_back(static_cast<TermId>(rng.next_range(0, 127)));
        }
        auto v = encode(tokens, params, MaskConfig::top_p(1.0));
        for (const Entry& e : v.entries()) {
            CHECK(e.weight > 0.0);
        }
    }
}

TEST_CASE("params regenerate bit-identically from the seed") {
    auto a = HeadParams::generate(16, 100, 777);
    auto b = HeadParams::generate(16, 100, 777);
    CHECK(a.linear_weights == b.linear_weights);
    CHECK(a.embeddings == b.embeddings);
    CHECK(a.vocab_bias == b.vocab_bias);
    auto c = HeadParams::generate(16, 100, 778);
    CHECK(a.embeddings != c.embeddings);
    CHECK_THROWS_AS(HeadParams::generate(1, 100, 0), ConfigError);
    CHECK_THROWS_AS(HeadParams::generate(16, 0, 0), ConfigError);
}

TEST_CASE("encode") {
    auto params = HeadParams::generate(16, 500, 2024);
    std::vector<TermId> tokens{3, 141, 59, 26, 3};

    auto a = encode(tokens, params, MaskConfig::top_p(1.0));
    auto b = encode(tokens, params, MaskConfig::top_p(1.0));
    CHECK(a == b);

    auto full_k = encode(tokens, params, MaskConfig::top_k(500));
    CHECK(a == full_k);

    // top-k 1 keeps exactly the largest aggregated term
    auto top1 = encode(tokens, params, MaskConfig::top_k(1));
    REQUIRE(top1.nnz() == 1);
    Entry largest = a.entries()[0];
    for (const Entry& e : a.entries()) {
        if (e.weight > largest.weight) {
            largest = e;
        }
    }
    CHECK(top1.entries()[0] == largest);

    CHECK_THROWS_AS(encode(std::vector<TermId>{}, params, MaskConfig::top_p(1.0)),
                    DataError);
    CHECK_THROWS_AS(encode(std::vector<TermId>{500}, params, MaskConfig::top_p(1.0)),
                    DataError);
}

TEST_CASE("encode nnz shrinks with p") {
    auto params = HeadParams::generate(16, 400, 4096);
    std::vector<TermId> tokens{10, 20, 30, 40, 50, 60};
    std::size_t previous = std::numeric_limits<std::size_t>::max();
    for (double p : {1.0, 0.95, 0.8, 0.6, 0.4, 0.2, 0.0}) {
        auto v = encode(tokens, params, MaskConfig::top_p(p));
        CHECK(v.nnz() <= previous);
        previous = v.nnz();
    }
}

TEST_CASE("encode_batch_omp matches the serial batch") {
    auto params = HeadParams::generate(8, 200, 55);
    SplitMix64 rng(21);
    std::vector<std::vector<TermId>> seqs;
    for (int i = 0; i < 40; ++i) {
        std::vector<TermId> tokens;
        auto len = rng.next_range(1, 30);
        for (std::uint64_t t = 0; t < len; ++t) {
            tokens.push_back(static_cast<TermId>(rng.next_range(0, 199)));
        }
        seqs.push_back(std::move(tokens));
    }
    auto mask = MaskConfig::top_p(0.9);
    CHECK(encode_batch(seqs, params, mask) == encode_batch_omp(seqs, params, mask, 2));
}
