#pragma once

// Level-1 q-expansions, Hecke recursions and coefficient files.

#include <gmpxx.h>

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace symsq {

struct QExpansion {
    int weight = 0;
    long level = 1;
    /// coeffs[n] = a_n for 0 <= n <= length(); a_0 is 0 for cusp forms.
    std::vector<mpz_class> coeffs;

    long length() const { return static_cast<long>(coeffs.size()) - 1; }
    const mpz_class& operator[](long n) const;
};

/// prod_{n>=1} (1 - q^n)^24 up to q^n, via the pentagonal series and the
/// logarithmic-derivative recurrence for powers.
std::vector<mpz_class> eta24_coeffs(long n);
/// Delta = q prod (1 - q^n)^24, indices 0..n.
std::vector<mpz_class> delta_coeffs(long n);
/// E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n for even k >= 4 (integral for k = 4, 6).
std::vector<mpz_class> eisenstein_coeffs(int k, long n);
/// Product of two series truncated at q^n.
std::vector<mpz_class> series_product(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, long n);

/// Weights with a one-dimensional cusp space at level 1.
bool has_unique_level1_eigenform(int k);
/// Normalised level-1 cusp eigenform of weight k in {12,16,18,20,22,26}.
QExpansion level1_eigenform(int k, long n);

/// Prime Hecke eigenvalues of a form with trivial character.
struct HeckeData {
    int weight = 0;
    long level = 1;
    std::map<long, mpz_class> a_prime;

    /// epsilon(l) for the trivial character of this level.
    int eps(long l) const { return level % l == 0 ? 0 : 1; }
    /// a_{l^r} from a_{l^{r+1}} = a_l a_{l^r} - l^{k-1} eps(l) a_{l^{r-1}}.
    mpz_class prime_power(long l, int r) const;
};

HeckeData hecke_data(const QExpansion& f);

/// a_m for 0 <= m <= n from prime data; throws MissingPrime listing absent primes <= n.
QExpansion extend_multiplicatively(const HeckeData& h, long n);
/// a_{m^2} for 0 <= m <= n, which needs primes <= n only.
std::vector<mpz_class> square_index_coeffs(const HeckeData& h, long n);

struct IngestResult {
    QExpansion form;
    std::vector<std::string> warnings;
};

/// Reads rows "n,a_n" (optional header), n contiguous from 1. Hecke relations
/// on primes <= 100 are checked and violations reported as warnings.
IngestResult ingest_coeffs(const std::string& path, int weight, long level = 1);
IngestResult ingest_coeffs(std::istream& in, int weight, long level = 1);
/// Relations violated by a table: a_1 = 1, multiplicativity, prime-power recursion.
std::vector<std::string> hecke_violations(const QExpansion& f, long prime_limit = 100);

void write_coeffs_csv(std::ostream& out, const QExpansion& f);

/// Primes l <= limit (within the truncation) where a_l^2 > 4 l^{k-1}; empty when the bound holds.
std::vector<long> deligne_violations(const QExpansion& f, long limit);

std::vector<long> primes_up_to(long n);

}  // namespace symsq
