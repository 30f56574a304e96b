#pragma once

// Fixed-precision p-adic numbers, Hensel lifting, embeddings of
// quadratic/cyclotomic values into Q_p, and group rings over Z/p^K.

#include <gmpxx.h>

#include <optional>
#include <string>
#include <vector>

#include "symsq/exact.hpp"

namespace symsq {

constexpr long kDefaultPadicPrecision = 12;

/// p^val * unit, with unit known modulo p^rel. An exact zero is a separate
/// state; an inexact zero O(p^N) stores val = N and rel = 0.
class PadicNumber {
public:
    PadicNumber() = default;
    static PadicNumber exact_zero(const mpz_class& p);
    /// O(p^n)
    static PadicNumber approximate_zero(const mpz_class& p, long n);
    /// Rational with relative precision `rel` (exact inputs have no error).
    static PadicNumber from_rational(const mpz_class& p, const mpq_class& q, long rel = kDefaultPadicPrecision);
    /// Integer known modulo p^abs_prec.
    static PadicNumber from_residue(const mpz_class& p, const mpz_class& value, long abs_prec);

    const mpz_class& p() const { return p_; }
    bool is_exact_zero() const { return exact_zero_; }
    /// True for both the exact zero and O(p^N).
    bool is_zero() const { return exact_zero_ || rel_ == 0; }
    /// Valuation; for O(p^N) this is the lower bound N, for the exact zero LONG_MAX.
    long valuation() const;
    /// Absolute precision N: the value is known modulo p^N (LONG_MAX for the exact zero).
    long absolute_precision() const;
    long relative_precision() const { return rel_; }
    const mpz_class& unit() const { return unit_; }
    bool is_unit() const { return !is_zero() && val_ == 0; }

    /// Coefficient c_e of p^e in the base-p expansion (0 <= c_e < p).
    mpz_class digit(long e) const;
    /// Integer representative modulo p^N of a value with nonnegative valuation.
    mpz_class residue(long n) const;
    /// Agreement modulo p^n (requires both precisions >= n).
    bool equals_mod(const PadicNumber& other, long n) const;
    /// Same value reduced to absolute precision min(current, n).
    PadicNumber truncate(long n) const;

    PadicNumber operator-() const;
    PadicNumber& operator+=(const PadicNumber& rhs);
    PadicNumber& operator-=(const PadicNumber& rhs) { return *this += -rhs; }
    PadicNumber& operator*=(const PadicNumber& rhs);
    PadicNumber& operator/=(const PadicNumber& rhs) { return *this *= rhs.inverse(); }
    PadicNumber inverse() const;
    PadicNumber pow(long e) const;

    friend PadicNumber operator+(PadicNumber a, const PadicNumber& b) { return a += b; }
    friend PadicNumber operator-(PadicNumber a, const PadicNumber& b) { return a -= b; }
    friend PadicNumber operator*(PadicNumber a, const PadicNumber& b) { return a *= b; }
    friend PadicNumber operator/(PadicNumber a, const PadicNumber& b) { return a /= b; }

    /// "c0 + c1*p + c2*p^2 + ... + O(p^N)" with numeric p, zero digits omitted.
    std::string to_string(long max_terms = -1) const;

private:
    void normalize();
    void check_same_prime(const PadicNumber& rhs) const;
    mpz_class p_ = 2;
    bool exact_zero_ = true;
    long val_ = 0;
    long rel_ = 0;
    mpz_class unit_ = 0;
};

long padic_valuation(const mpz_class& n, const mpz_class& p);
long padic_valuation(const mpq_class& q, const mpz_class& p);

/// Unique root of f congruent to r0 mod p, lifted by Newton iteration to p^K.
PadicNumber hensel_root(const ExactPoly& f, const mpz_class& p, const mpz_class& r0, long k);

/// Embedding Q(sqrt d) -> Q_p selected by a generator a + b sqrt(d) of a
/// degree-one prime above p: sqrt(d) -> r with r = -a/b mod p.
struct PadicEmbedding {
    long d = 0;
    mpz_class p;
    mpz_class gen_a, gen_b;
    PadicNumber root;
    long precision = kDefaultPadicPrecision;
};

PadicEmbedding make_embedding(long d, const mpz_class& p, const mpz_class& gen_a, const mpz_class& gen_b,
                              long k = kDefaultPadicPrecision);
PadicNumber embed_quadratic(const QuadraticNumber& x, const PadicEmbedding& emb);
/// Cyclotomic values lying in Q(sqrt d) are embedded through emb.
PadicNumber embed_cyclotomic(const Cyclotomic& x, const PadicEmbedding& emb);

/// Embedding of Q(zeta_m) into Q_p for m | p - 1, fixed by the image of zeta_m.
struct RootOfUnityEmbedding {
    mpz_class p;
    long m = 1;
    PadicNumber zeta;  ///< primitive m-th root of unity in Z_p
    long precision = kDefaultPadicPrecision;
};

/// zeta_m -> Teichmuller lift of g^{(p-1)/m}, g the least primitive root mod p.
RootOfUnityEmbedding make_root_embedding(const mpz_class& p, long m, long k = kDefaultPadicPrecision);
/// The embedding of Q(zeta_m) compatible with a quadratic embedding of Q(sqrt -3) (m = 3 or 6).
RootOfUnityEmbedding root_embedding_from_quadratic(const PadicEmbedding& emb, long m);
PadicNumber embed_cyclotomic(const Cyclotomic& x, const RootOfUnityEmbedding& emb);

/// Element of (Z/p^K)[G] for a finite abelian G = prod Z/n_i.
class GroupRingElt {
public:
    GroupRingElt(const mpz_class& p, long k, std::vector<long> cyclic_orders);
    static GroupRingElt one(const mpz_class& p, long k, std::vector<long> cyclic_orders);
    /// u * g where g has the given exponents on the cyclic generators.
    static GroupRingElt term(const mpz_class& p, long k, std::vector<long> cyclic_orders, const mpz_class& u,
                             const std::vector<long>& exponents);

    const mpz_class& p() const { return p_; }
    long k() const { return k_; }
    const mpz_class& modulus() const { return mod_; }
    const std::vector<long>& orders() const { return orders_; }
    long group_order() const { return static_cast<long>(coeffs_.size()); }
    const std::vector<mpz_class>& coeffs() const { return coeffs_; }
    mpz_class& operator[](long index) { return coeffs_[index]; }
    const mpz_class& operator[](long index) const { return coeffs_[index]; }

    /// Mixed-radix index of a group element.
    long index_of(const std::vector<long>& exponents) const;
    std::vector<long> exponents_of(long index) const;
    long multiply_index(long i, long j) const;

    mpz_class augmentation() const;
    bool is_one() const;

    GroupRingElt& operator+=(const GroupRingElt& rhs);
    GroupRingElt& operator-=(const GroupRingElt& rhs);
    GroupRingElt operator*(const GroupRingElt& rhs) const;
    friend GroupRingElt operator+(GroupRingElt a, const GroupRingElt& b) { return a += b; }
    friend GroupRingElt operator-(GroupRingElt a, const GroupRingElt& b) { return a -= b; }
    friend bool operator==(const GroupRingElt& a, const GroupRingElt& b) {
        return a.mod_ == b.mod_ && a.orders_ == b.orders_ && a.coeffs_ == b.coeffs_;
    }

private:
    void check_compatible(const GroupRingElt& rhs) const;
    mpz_class p_;
    long k_;
    mpz_class mod_;
    std::vector<long> orders_;
    std::vector<mpz_class> coeffs_;
};

/// Inverse of x, or nothing when x is not a unit. Solves the multiplication
/// system over Z/p^K by elimination with unit pivots.
std::optional<GroupRingElt> groupring_invert(const GroupRingElt& x);

}  // namespace symsq
