#include "symsq/modforms.hpp"

#include <fstream>
#include <sstream>

#include "symsq/error.hpp"
#include "symsq/exact.hpp"

namespace symsq {

namespace {

mpz_class pow_ui(long base, unsigned long e) {
    mpz_class out;
    mpz_ui_pow_ui(out.get_mpz_t(), static_cast<unsigned long>(base), e);
    return out;
}

std::vector<long> smallest_prime_factor(long n) {
    std::vector<long> spf(n + 1, 0);
    for (long i = 2; i <= n; ++i) {
        if (spf[i] != 0) continue;
        for (long j = i; j <= n; j += i)
            if (spf[j] == 0) spf[j] = i;
    }
    return spf;
}

std::string trim(const std::string& s) {
    size_t b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    size_t e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

const mpz_class& QExpansion::operator[](long n) const {
    if (n < 0 || n > length())
        fail(ErrorKind::InsufficientCoefficients,
             "coefficient a_" + std::to_string(n) + " beyond truncation " + std::to_string(length()));
    return coeffs[n];
}

std::vector<long> primes_up_to(long n) {
    std::vector<long> out;
    if (n < 2) return out;
    std::vector<bool> composite(n + 1, false);
    for (long i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (long j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

std::vector<mpz_class> eta24_coeffs(long n) {
    if (n < 0) fail(ErrorKind::Domain, "negative truncation");
    // prod (1 - q^m) = sum_j (-1)^j q^{j(3j-1)/2} over all integers j
    std::vector<std::pair<long, int>> pent;
    for (long j = 1;; ++j) {
        long g1 = j * (3 * j - 1) / 2, g2 = j * (3 * j + 1) / 2;
        if (g1 > n) break;
        int sign = (j % 2) ? -1 : 1;
        pent.emplace_back(g1, sign);
        if (g2 <= n) pent.emplace_back(g2, sign);
    }
    // g = P^24: m g_m = sum_{j>=1} (25 j - m) p_j g_{m-j}
    std::vector<mpz_class> g(n + 1, 0);
    g[0] = 1;
    mpz_class acc;
    for (long m = 1; m <= n; ++m) {
        acc = 0;
        for (const auto& [j, sign] : pent) {
            if (j > m) break;
            long c = (25 * j - m) * sign;
            if (c >= 0)
                mpz_addmul_ui(acc.get_mpz_t(), g[m - j].get_mpz_t(), static_cast<unsigned long>(c));
            else
                mpz_submul_ui(acc.get_mpz_t(), g[m - j].get_mpz_t(), static_cast<unsigned long>(-c));
        }
        mpz_divexact_ui(g[m].get_mpz_t(), acc.get_mpz_t(), static_cast<unsigned long>(m));
    }
    return g;
}

std::vector<mpz_class> delta_coeffs(long n) {
    std::vector<mpz_class> out(n + 1, 0);
    if (n < 1) return out;
    std::vector<mpz_class> e = eta24_coeffs(n - 1);
    for (long m = 1; m <= n; ++m) out[m] = e[m - 1];
    return out;
}

std::vector<mpz_class> eisenstein_coeffs(int k, long n) {
    if (k != 4 && k != 6) fail(ErrorKind::UnsupportedWeight, "integral Eisenstein series only for k = 4, 6");
    mpq_class c = mpq_class(-2 * k) / bernoulli_number(static_cast<unsigned>(k));
    mpz_class factor = c.get_num();
    std::vector<mpz_class> sigma(n + 1, 0);
    for (long d = 1; d <= n; ++d) {
        mpz_class dk = pow_ui(d, static_cast<unsigned long>(k - 1));
        for (long m = d; m <= n; m += d) sigma[m] += dk;
    }
    std::vector<mpz_class> out(n + 1);
    out[0] = 1;
    for (long m = 1; m <= n; ++m) out[m] = factor * sigma[m];
    return out;
}

std::vector<mpz_class> series_product(const std::vector<mpz_class>& a, const std::vector<mpz_class>& b, long n) {
    std::vector<mpz_class> out(n + 1, 0);
    long na = std::min<long>(n, static_cast<long>(a.size()) - 1);
    long nb = static_cast<long>(b.size()) - 1;
    for (long i = 0; i <= na; ++i) {
        if (a[i] == 0) continue;
        long top = std::min(nb, n - i);
        for (long j = 0; j <= top; ++j) mpz_addmul(out[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
    return out;
}

bool has_unique_level1_eigenform(int k) {
    return k == 12 || k == 16 || k == 18 || k == 20 || k == 22 || k == 26;
}

QExpansion level1_eigenform(int k, long n) {
    if (!has_unique_level1_eigenform(k))
        fail(ErrorKind::UnsupportedWeight, "level-1 cusp space of weight " + std::to_string(k) + " is not one-dimensional");
    if (n < 1) fail(ErrorKind::Domain, "truncation must be at least 1");
    std::vector<mpz_class> f = delta_coeffs(n);
    int rest = k - 12;
    std::vector<mpz_class> e4, e6;
    if (rest == 4 || rest == 8 || rest == 10 || rest == 14) e4 = eisenstein_coeffs(4, n);
    if (rest == 6 || rest == 10 || rest == 14) e6 = eisenstein_coeffs(6, n);
    switch (rest) {
        case 0: break;
        case 4: f = series_product(e4, f, n); break;
        case 6: f = series_product(e6, f, n); break;
        case 8: f = series_product(e4, series_product(e4, f, n), n); break;
        case 10: f = series_product(e6, series_product(e4, f, n), n); break;
        case 14: f = series_product(e6, series_product(e4, series_product(e4, f, n), n), n); break;
    }
    QExpansion out;
    out.weight = k;
    out.level = 1;
    out.coeffs = std::move(f);
    return out;
}

mpz_class HeckeData::prime_power(long l, int r) const {
    if (r == 0) return 1;
    auto it = a_prime.find(l);
    if (it == a_prime.end()) fail(ErrorKind::MissingPrime, "missing a_" + std::to_string(l));
    mpz_class c = pow_ui(l, static_cast<unsigned long>(weight - 1)) * eps(l);
    mpz_class prev = 1, cur = it->second;
    for (int i = 1; i < r; ++i) {
        mpz_class next = it->second * cur - c * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

HeckeData hecke_data(const QExpansion& f) {
    HeckeData h;
    h.weight = f.weight;
    h.level = f.level;
    for (long l : primes_up_to(f.length())) h.a_prime[l] = f.coeffs[l];
    return h;
}

namespace {

void require_primes(const HeckeData& h, long n) {
    std::vector<long> missing;
    for (long l : primes_up_to(n))
        if (!h.a_prime.count(l)) missing.push_back(l);
    if (missing.empty()) return;
    std::ostringstream msg;
    msg << "missing Hecke eigenvalues at primes";
    for (size_t i = 0; i < missing.size() && i < 20; ++i) msg << " " << missing[i];
    if (missing.size() > 20) msg << " ... (" << missing.size() << " total)";
    fail(ErrorKind::MissingPrime, msg.str());
}

// a at l^e for all l^e | m, assembled multiplicatively
template <class PowerFn>
std::vector<mpz_class> multiplicative_table(long n, PowerFn&& at_power) {
    std::vector<long> spf = smallest_prime_factor(n);
    std::vector<mpz_class> out(n + 1, 0);
    if (n >= 1) out[1] = 1;
    for (long m = 2; m <= n; ++m) {
        long l = spf[m], rest = m;
        int e = 0;
        while (rest % l == 0) {
            rest /= l;
            ++e;
        }
        out[m] = out[rest] * at_power(l, e);
    }
    return out;
}

}  // namespace

QExpansion extend_multiplicatively(const HeckeData& h, long n) {
    require_primes(h, n);
    std::map<std::pair<long, int>, mpz_class> cache;
    auto at = [&](long l, int e) {
        auto key = std::make_pair(l, e);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        return cache[key] = h.prime_power(l, e);
    };
    QExpansion out;
    out.weight = h.weight;
    out.level = h.level;
    out.coeffs = multiplicative_table(n, at);
    return out;
}

std::vector<mpz_class> square_index_coeffs(const HeckeData& h, long n) {
    require_primes(h, n);
    return multiplicative_table(n, [&](long l, int e) { return h.prime_power(l, 2 * e); });
}

std::vector<std::string> hecke_violations(const QExpansion& f, long prime_limit) {
    std::vector<std::string> out;
    long n = f.length();
    auto note = [&](const std::string& s) {
        if (out.size() < 50) out.push_back(s);
    };
    if (n >= 1 && f.coeffs[1] != 1) note("a_1 = " + f.coeffs[1].get_str() + " is not 1");
    HeckeData h;
    h.weight = f.weight;
    h.level = f.level;
    for (long l : primes_up_to(std::min(prime_limit, n))) {
        mpz_class c = pow_ui(l, static_cast<unsigned long>(f.weight - 1)) * h.eps(l);
        // prime-power recursion
        long prev = 1, cur = l;
        while (cur <= n / l) {
            long next = cur * l;
            if (f.coeffs[next] != f.coeffs[l] * f.coeffs[cur] - c * f.coeffs[prev])
                note("prime-power relation fails at a_" + std::to_string(next));
            prev = cur;
            cur = next;
        }
        for (long m = 2; m * l <= n; ++m) {
            if (m % l == 0) continue;
            if (f.coeffs[m * l] != f.coeffs[m] * f.coeffs[l])
                note("multiplicativity fails: a_" + std::to_string(m * l) + " != a_" + std::to_string(m) + " a_" +
                     std::to_string(l));
        }
    }
    return out;
}

IngestResult ingest_coeffs(std::istream& in, int weight, long level) {
    IngestResult res;
    res.form.weight = weight;
    res.form.level = level;
    res.form.coeffs.push_back(0);
    std::string line;
    long lineno = 0, expected = 1;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto comma = t.find(',');
        if (comma == std::string::npos)
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected \"n,a_n\"");
        std::string ns = trim(t.substr(0, comma)), as = trim(t.substr(comma + 1));
        mpz_class nv, av;
        bool ok_n = nv.set_str(ns, 10) == 0;
        bool ok_a = !as.empty() && av.set_str(as[0] == '+' ? as.substr(1) : as, 10) == 0;
        if (!ok_n || !ok_a) {
            if (expected == 1 && res.form.coeffs.size() == 1 && !ok_n) continue;  // header
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": not an integer pair");
        }
        if (nv != expected)
            fail(ErrorKind::Parse, "line " + std::to_string(lineno) + ": expected n = " + std::to_string(expected) +
                                       ", found " + nv.get_str());
        res.form.coeffs.push_back(av);
        ++expected;
    }
    if (res.form.length() < 1) fail(ErrorKind::Parse, "no coefficient rows");
    res.warnings = hecke_violations(res.form, 100);
    return res;
}

IngestResult ingest_coeffs(const std::string& path, int weight, long level) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Parse, "cannot open " + path);
    return ingest_coeffs(in, weight, level);
}

void write_coeffs_csv(std::ostream& out, const QExpansion& f) {
    out << "n,a_n\n";
    for (long n = 1; n <= f.length(); ++n) out << n << ',' << f.coeffs[n].get_str() << '\n';
}

std::vector<long> deligne_violations(const QExpansion& f, long limit) {
    std::vector<long> bad;
    for (long l : primes_up_to(std::min(limit, f.length()))) {
        mpz_class bound = 4 * pow_ui(l, static_cast<unsigned long>(f.weight - 1));
        if (f.coeffs[l] * f.coeffs[l] > bound) bad.push_back(l);
    }
    return bad;
}

}  // namespace symsq
