#include <doctest.h>

#include <sstream>

#include "symsq/error.hpp"
#include "symsq/modforms.hpp"

using namespace symsq;

namespace {

// q prod (1 - q^m)^24 by repeated multiplication
std::vector<mpz_class> naive_delta(long n) {
    std::vector<mpz_class> p(n + 1, 0);
    p[0] = 1;
    for (long m = 1; m <= n; ++m)
        for (int r = 0; r < 24; ++r)
            for (long i = n; i >= m; --i) p[i] -= p[i - m];
    std::vector<mpz_class> out(n + 1, 0);
    for (long i = 1; i <= n; ++i) out[i] = p[i - 1];
    return out;
}

std::vector<mpz_class> naive_e4(long n) {
    std::vector<mpz_class> out(n + 1, 0);
    out[0] = 1;
    for (long m = 1; m <= n; ++m) {
        mpz_class s = 0;
        for (long d = 1; d <= m; ++d)
            if (m % d == 0) s += mpz_class(d) * d * d;
        out[m] = 240 * s;
    }
    return out;
}

}  // namespace

TEST_SUITE("modforms") {

TEST_CASE("Delta against the naive product") {
    const long n = 80;
    auto d = delta_coeffs(n);
    auto ref = naive_delta(n);
    for (long i = 0; i <= n; ++i) CHECK(d[i] == ref[i]);
    CHECK(d[2] == -24);
    CHECK(d[3] == 252);
    QExpansion f = level1_eigenform(12, 3);
    CHECK(f[1] == 1);
    CHECK(f[2] == -24);
    CHECK(f[3] == 252);
}

TEST_CASE("weight 16 form from an independent convolution") {
    const long n = 60;
    QExpansion f = level1_eigenform(16, n);
    auto e4 = naive_e4(n), d = naive_delta(n);
    for (long m = 1; m <= n; ++m) {
        mpz_class s = 0;
        for (long i = 0; i < m; ++i) s += e4[i] * d[m - i];
        CHECK(f[m] == s);
    }
    CHECK(f[2] == 216);
    CHECK(f[37] == mpz_class("-1033652081554"));
}

TEST_CASE("every supported weight is a normalised eigenform") {
    for (int k : {12, 16, 18, 20, 22, 26}) {
        QExpansion f = level1_eigenform(k, 1500);
        CHECK(f[0] == 0);
        CHECK(f[1] == 1);
        CHECK(hecke_violations(f, 100).empty());
        CHECK(deligne_violations(f, 1500).empty());
    }
    for (int k : {10, 14, 24, 28, 13}) CHECK_THROWS_AS(level1_eigenform(k, 10), Error);
}

TEST_CASE("Eisenstein normalisation") {
    auto e6 = eisenstein_coeffs(6, 3);
    CHECK(e6[1] == -504);
    CHECK(e6[2] == -504 * 33);
    // E4^2 = E8 = 1 + 480 sum sigma_7
    auto e4 = eisenstein_coeffs(4, 10);
    auto e8 = series_product(e4, e4, 10);
    CHECK(e8[1] == 480);
    CHECK(e8[2] == 480 * 129);
}

TEST_CASE("multiplicative extension") {
    QExpansion f = level1_eigenform(16, 600);
    HeckeData h = hecke_data(f);
    CHECK(h.prime_power(2, 2) == 13888);
    CHECK(h.prime_power(2, 2) == mpz_class(216) * 216 - 32768);
    QExpansion g = extend_multiplicatively(h, 600);
    for (long m = 0; m <= 600; ++m) CHECK(g[m] == f[m]);
    CHECK(g[6] == g[2] * g[3]);
    auto sq = square_index_coeffs(h, 24);
    for (long m = 1; m <= 24; ++m) CHECK(sq[m] == f[m * m]);

    HeckeData partial;
    partial.weight = 16;
    partial.a_prime[2] = 216;
    try {
        extend_multiplicatively(partial, 10);
        FAIL("expected a missing-prime error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::MissingPrime);
        CHECK(std::string(e.what()).find("3 5 7") != std::string::npos);
    }
}

TEST_CASE("coefficient files") {
    QExpansion delta = level1_eigenform(12, 10);
    std::stringstream csv;
    write_coeffs_csv(csv, delta);
    IngestResult r = ingest_coeffs(csv, 12);
    CHECK(r.warnings.empty());
    CHECK(r.form.coeffs == delta.coeffs);

    std::stringstream no_header("1,1\n2,-24\n3,252\n");
    CHECK(ingest_coeffs(no_header, 12).form.length() == 3);

    std::stringstream empty("");
    CHECK_THROWS_AS(ingest_coeffs(empty, 12), Error);

    std::stringstream bad("n,a_n\n1,1\n2,x\n");
    try {
        ingest_coeffs(bad, 12);
        FAIL("expected a parse error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Parse);
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    std::stringstream gap("1,1\n3,252\n");
    CHECK_THROWS_AS(ingest_coeffs(gap, 12), Error);

    std::stringstream tampered;
    write_coeffs_csv(tampered, delta);
    std::string text = tampered.str();
    text.replace(text.find("6,-6048"), 7, "6,-6047");
    std::stringstream in(text);
    IngestResult w = ingest_coeffs(in, 12);
    CHECK_FALSE(w.warnings.empty());
    CHECK(w.form[6] == -6047);
}

}  // TEST_SUITE
