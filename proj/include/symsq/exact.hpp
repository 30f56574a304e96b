#pragma once

// Exact scalars: big integers and rationals (GMP), cyclotomic field
// elements, quadratic field elements and polynomials over cyclotomic rings.

#include <gmpxx.h>

#include <chrono>
#include <string>
#include <vector>

#include "symsq/ball.hpp"

namespace symsq {

using BigInt = mpz_class;
using BigRational = mpq_class;

/// Classical Bernoulli number with B_1 = -1/2. Cached; computed from
/// tangent/secant integers, so large indices stay cheap.
mpq_class bernoulli_number(unsigned n);

long euler_phi(long n);
long gcd_long(long a, long b);
long lcm_long(long a, long b);
long mod_pos(long a, long m);
/// Integer coefficients of the n-th cyclotomic polynomial, constant term first.
const std::vector<mpz_class>& cyclotomic_polynomial(long n);

/// Element of Q(zeta_n) in the power basis 1, z, ..., z^{phi(n)-1},
/// reduced modulo Phi_n. Binary operations on different orders lift both
/// operands to the lcm.
class Cyclotomic {
public:
    Cyclotomic() : Cyclotomic(1) {}
    explicit Cyclotomic(long order);
    Cyclotomic(long order, const mpq_class& value);
    /// Reduce an arbitrary list of coefficients of z^0, z^1, ... modulo Phi_n.
    static Cyclotomic from_coeffs(long order, const std::vector<mpq_class>& coeffs);
    /// zeta_order^k.
    static Cyclotomic zeta(long order, long k = 1);

    long order() const { return order_; }
    const std::vector<mpq_class>& coeffs() const { return coeffs_; }

    bool is_zero() const;
    bool is_rational() const;
    /// Throws Domain unless the element is rational.
    mpq_class rational_value() const;

    /// Same element viewed in Q(zeta_m); requires order | m.
    Cyclotomic lift(long m) const;

    /// zeta -> zeta^a for a coprime to the order.
    Cyclotomic galois(long a) const;
    Cyclotomic conj() const { return galois(-1); }
    Cyclotomic inverse() const;
    /// Trace from Q(zeta_n) down to Q.
    mpq_class trace() const;
    /// Norm from Q(zeta_n) down to Q.
    mpq_class norm() const;

    Cyclotomic operator-() const;
    Cyclotomic& operator+=(const Cyclotomic& rhs);
    Cyclotomic& operator-=(const Cyclotomic& rhs);
    Cyclotomic& operator*=(const Cyclotomic& rhs);
    Cyclotomic& operator*=(const mpq_class& rhs);
    Cyclotomic& operator/=(const Cyclotomic& rhs) { return *this *= rhs.inverse(); }
    Cyclotomic pow(long e) const;

    friend Cyclotomic operator+(Cyclotomic a, const Cyclotomic& b) { return a += b; }
    friend Cyclotomic operator-(Cyclotomic a, const Cyclotomic& b) { return a -= b; }
    friend Cyclotomic operator*(Cyclotomic a, const Cyclotomic& b) { return a *= b; }
    friend Cyclotomic operator*(Cyclotomic a, const mpq_class& b) { return a *= b; }
    friend Cyclotomic operator/(Cyclotomic a, const Cyclotomic& b) { return a /= b; }
    friend bool operator==(const Cyclotomic& a, const Cyclotomic& b);
    friend bool operator!=(const Cyclotomic& a, const Cyclotomic& b) { return !(a == b); }

    /// Human-readable, e.g. "1 + 2*z3" (z_n denotes zeta_n).
    std::string to_string() const;

private:
    void reduce(std::vector<mpq_class> raw);
    long order_;
    std::vector<mpq_class> coeffs_;
};

/// a + b*sqrt(d) with d square-free, d != 0, 1.
class QuadraticNumber {
public:
    QuadraticNumber(long d, mpq_class a = 0, mpq_class b = 0);

    long d() const { return d_; }
    const mpq_class& a() const { return a_; }
    const mpq_class& b() const { return b_; }

    QuadraticNumber conj() const { return QuadraticNumber(d_, a_, -b_); }
    mpq_class norm() const { return a_ * a_ - d_ * b_ * b_; }
    mpq_class trace() const { return 2 * a_; }
    QuadraticNumber inverse() const;
    /// Least positive common denominator of a and b.
    mpz_class denominator() const;

    QuadraticNumber operator-() const { return QuadraticNumber(d_, -a_, -b_); }
    QuadraticNumber& operator+=(const QuadraticNumber& rhs);
    QuadraticNumber& operator-=(const QuadraticNumber& rhs);
    QuadraticNumber& operator*=(const QuadraticNumber& rhs);
    QuadraticNumber& operator/=(const QuadraticNumber& rhs) { return *this *= rhs.inverse(); }

    friend QuadraticNumber operator+(QuadraticNumber a, const QuadraticNumber& b) { return a += b; }
    friend QuadraticNumber operator-(QuadraticNumber a, const QuadraticNumber& b) { return a -= b; }
    friend QuadraticNumber operator*(QuadraticNumber a, const QuadraticNumber& b) { return a *= b; }
    friend QuadraticNumber operator/(QuadraticNumber a, const QuadraticNumber& b) { return a /= b; }
    friend bool operator==(const QuadraticNumber& x, const QuadraticNumber& y) {
        return x.d_ == y.d_ && x.a_ == y.a_ && x.b_ == y.b_;
    }

    /// Image in Q(zeta_|D|) where D is the discriminant, via a quadratic Gauss sum.
    Cyclotomic to_cyclotomic() const;
    /// Inverse of to_cyclotomic; throws Domain if x does not lie in Q(sqrt d).
    static QuadraticNumber from_cyclotomic(const Cyclotomic& x, long d);

    std::string to_string() const;

private:
    void check_compatible(const QuadraticNumber& rhs) const;
    long d_;
    mpq_class a_;
    mpq_class b_;
};

/// Field discriminant of Q(sqrt d).
long quadratic_discriminant(long d);
bool is_squarefree(long d);
/// sqrt(d) as a cyclotomic number (principal branch under the standard embedding).
Cyclotomic sqrt_as_cyclotomic(long d);

/// Polynomial in X with Cyclotomic coefficients, constant term first.
class ExactPoly {
public:
    ExactPoly() = default;
    explicit ExactPoly(std::vector<Cyclotomic> coeffs);
    static ExactPoly constant(const Cyclotomic& c);
    /// c * X^n
    static ExactPoly monomial(const Cyclotomic& c, unsigned n);
    static ExactPoly from_integers(const std::vector<mpz_class>& coeffs);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const std::vector<Cyclotomic>& coeffs() const { return coeffs_; }
    /// Coefficient of X^i, zero beyond the degree.
    Cyclotomic coeff(unsigned i) const;

    ExactPoly& operator+=(const ExactPoly& rhs);
    ExactPoly& operator-=(const ExactPoly& rhs);
    ExactPoly& operator*=(const ExactPoly& rhs);
    friend ExactPoly operator+(ExactPoly a, const ExactPoly& b) { return a += b; }
    friend ExactPoly operator-(ExactPoly a, const ExactPoly& b) { return a -= b; }
    friend ExactPoly operator*(ExactPoly a, const ExactPoly& b) { return a *= b; }
    friend bool operator==(const ExactPoly& a, const ExactPoly& b);

    Cyclotomic eval(const Cyclotomic& x) const;
    ExactPoly derivative() const;
    /// Integer coefficients; throws Domain if some coefficient is not an integer.
    std::vector<mpz_class> integer_coeffs() const;

    std::string to_string() const;

private:
    void trim();
    std::vector<Cyclotomic> coeffs_;
};

/// Complex ball for the image of x under zeta_n -> exp(2 pi i / n).
BallComplex embed_complex(const Cyclotomic& x, long digits);
/// Complex ball for a + b sqrt(d), principal square root.
BallComplex embed_complex(const QuadraticNumber& x, long digits);

struct PrimeFactor {
    mpz_class prime;
    unsigned exponent = 0;
    bool probable = false;  ///< prime > 2^64, only probabilistically tested
};

/// Deterministic below 2^64, Baillie-PSW plus Miller-Rabin above.
bool is_probable_prime(const mpz_class& n);

/// Trial division, then Pollard-Brent. Throws ResourceLimit (with the
/// partial factorization in the message) if the time budget runs out.
std::vector<PrimeFactor> factor_integer(const mpz_class& n,
                                        std::chrono::milliseconds budget = std::chrono::seconds(60));

}  // namespace symsq
