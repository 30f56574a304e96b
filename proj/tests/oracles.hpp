#pragma once

// Independent reference computations shared by the acceptance runner and the
// property suites. Nothing here calls the routine it is used to check.

#include <cstdint>
#include <string>
#include <utility>

#include "symsq/galois.hpp"
#include "symsq/symsq.hpp"

namespace oracle {

using namespace symsq;

/// Number of invariant factors of the integer matrix m divisible by p,
/// from the determinantal divisors d1 | d2 | d3.
int invariant_factors_divisible(const Mat3& m, long p);

/// Critical integers for weight k: 1..k-1 with (-1)^j = -parity, k..2k-2 with (-1)^j = parity.
bool critical_brute(int k, int parity, long j);

/// E_p and E'_p vanish exactly when chi = 1, eps psi(p) = 1 and j = k-1 (resp. j = k).
std::pair<bool, bool> multiplier_case_table(int k, long p, long j, const DirichletCharacter& chi,
                                            const DirichletCharacter& psi, const DirichletCharacter& eps);

/// No admissible c <= bound makes the exact c-factor nonzero.
bool unfortunate_by_search(int k, long p, long j, const DirichletCharacter& chi, const DirichletCharacter& psi,
                           const DirichletCharacter& eps, long bound);

/// (sum b_r r^{-s}) L(chi, s-k+1) = (sum a_n^2 chi(n) n^{-s}) L(chi^2, 2s-2k+2)^{-1},
/// coefficientwise for n <= n_max, with b from symsq_dirichlet_coeffs.
bool imprimitive_identity_holds(const QExpansion& f, const HeckeData& h, const DirichletCharacter& chi, long n_max,
                                std::string* where = nullptr);

/// "c0 + c1*p + c2*p^2" for the digits up to p^upto, zero digits omitted.
std::string digit_string(const PadicNumber& x, long upto);

struct PropertyResult {
    std::string name;
    long cases = 0;
    long failures = 0;
    std::string first_failure;
    double seconds = 0;
};

PropertyResult property_hecke(std::uint64_t seed, long cases);
PropertyResult property_gauss_norm(std::uint64_t seed, long cases);
PropertyResult property_bernoulli_parity(std::uint64_t seed, long cases);
PropertyResult property_ball_containment(std::uint64_t seed, long cases);
PropertyResult property_hensel(std::uint64_t seed, long cases);

}  // namespace oracle
