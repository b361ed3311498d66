#include "chowla/arith.hpp"
#include "chowla/error.hpp"

#include <string>

namespace chowla {

UnitInfo fundamental_unit(u64 d)
{
    if (d < 5 || d % 4 != 1 || is_square(d))
        throw DomainError("fundamental_unit requires a non-square d = 1 mod 4, got " +
                          std::to_string(d));

    // Complete quotients (P + sqrt d)/Q of omega = (1 + sqrt d)/2.
    const u64 s = isqrt(d);
    const BigInt D = d;
    i64 P = 1;
    i64 Q = 2;
    BigInt h_prev = 1, h_prev2 = 0;
    BigInt k_prev = 0, k_prev2 = 1;
    for (;;) {
        const i64 a = (P + static_cast<i64>(s)) / Q;
        BigInt h = a * h_prev + h_prev2;
        BigInt k = a * k_prev + k_prev2;
        // h - k*conj(omega) = (2h - k + k sqrt d)/2 has norm (A^2 - B^2 d)/4.
        BigInt A = 2 * h - k;
        const BigInt norm = A * A - k * k * D;
        if (norm == 4 || norm == -4) {
            UnitInfo out;
            out.d = d;
            out.a = A;
            out.b = k;
            out.norm_sign = norm > 0 ? 1 : -1;
            out.epsilon = (Quad(A) + Quad(k) * boost::multiprecision::sqrt(Quad(d))) / 2;
            out.regulator = boost::multiprecision::log(out.epsilon);
            return out;
        }
        h_prev2 = std::move(h_prev);
        h_prev = std::move(h);
        k_prev2 = std::move(k_prev);
        k_prev = std::move(k);
        P = a * Q - P;
        Q = static_cast<i64>((d - static_cast<u64>(P * P)) / static_cast<u64>(Q));
    }
}

} // namespace chowla
