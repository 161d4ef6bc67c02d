#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace fsl {

using i64 = std::int64_t;
using u64 = std::uint64_t;

i64 gcd(i64 a, i64 b);
i64 mod(i64 a, i64 m);  // result in [0, m)
u64 mulmod(u64 a, u64 b, u64 m);
u64 powmod(u64 b, u64 e, u64 m);
i64 inverse_mod(i64 a, i64 m);  // throws if not invertible

/// Primes up to n (inclusive), by an Eratosthenes sieve.
std::vector<i64> primes_up_to(i64 n);
bool is_prime(u64 n);  // deterministic Miller-Rabin for 64-bit inputs

/// Prime factorization as (prime, exponent) pairs in ascending order.
std::vector<std::pair<i64, int>> factorize(u64 n);

/// Legendre symbol (a|p) for an odd prime p.
int legendre(i64 a, i64 p);
/// Jacobi symbol (a|n) for odd positive n.
int jacobi(i64 a, i64 n);
/// Kronecker symbol (a|n), defined for all integers.
int kronecker(i64 a, i64 n);

/// Smallest primitive root modulo an odd prime power p^k (equivalently mod p
/// lifted to p^2 when needed).
i64 primitive_root(i64 p, int k = 1);

bool is_squarefree(u64 n);

/// Moebius function table on [0, n]; entry 0 is 0.
std::vector<std::int8_t> mobius_table(i64 n);
/// Moebius function of a single integer via factorization; mu(0) = 0.
int mobius(i64 n);

/// Legendre symbols of 0..p-1 for an odd prime p.
std::vector<std::int8_t> legendre_table(i64 p);

}  // namespace fsl
