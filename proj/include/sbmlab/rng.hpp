#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace sbmlab {

// Philox4x32-10 counter-based generator: reproducible, serializable streams
// keyed by (seed, stream); the counter advances by one block per 4 outputs.
class Philox {
  public:
    Philox(std::uint64_t seed, std::uint64_t stream = 0) : key_{static_cast<std::uint32_t>(seed),
                                                                 static_cast<std::uint32_t>(seed >> 32)},
                                                            ctr_{0, 0,
                                                                 static_cast<std::uint32_t>(stream),
                                                                 static_cast<std::uint32_t>(stream >> 32)} {}

    std::uint32_t next_u32() {
        if (idx_ == 4) refill();
        return out_[idx_++];
    }
    std::uint64_t next_u64() {
        const std::uint64_t lo = next_u32();
        return (static_cast<std::uint64_t>(next_u32()) << 32) | lo;
    }
    // uniform in [0, 1)
    double next_double() { return (next_u64() >> 11) * 0x1.0p-53; }
    double next_normal();

  private:
    static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
        const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
        hi = static_cast<std::uint32_t>(p >> 32);
        lo = static_cast<std::uint32_t>(p);
    }
    void refill() {
        std::uint32_t c0 = ctr_[0], c1 = ctr_[1], c2 = ctr_[2], c3 = ctr_[3];
        std::uint32_t k0 = key_[0], k1 = key_[1];
        for (int r = 0; r < 10; ++r) {
            std::uint32_t hi0, lo0, hi1, lo1;
            mulhilo(0xD2511F53u, c0, hi0, lo0);
            mulhilo(0xCD9E8D57u, c2, hi1, lo1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0; c1 = n1; c2 = n2; c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        out_ = {c0, c1, c2, c3};
        if (++ctr_[0] == 0) ++ctr_[1];  // 64-bit block counter in words 0..1
        idx_ = 0;
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint32_t, 4> out_{};
    int idx_ = 4;
};

namespace detail {
// Marsaglia-Tsang ziggurat tables for the standard normal.
struct ZigguratTables {
    std::array<std::uint32_t, 128> kn;
    std::array<double, 128> wn, fn;
    ZigguratTables() {
        const double m = 2147483648.0;
        double dn = 3.442619855899, tn = dn;
        const double vn = 9.91256303526217e-3;
        const double q = vn / std::exp(-0.5 * dn * dn);
        kn[0] = static_cast<std::uint32_t>((dn / q) * m);
        kn[1] = 0;
        wn[0] = q / m;
        wn[127] = dn / m;
        fn[0] = 1.0;
        fn[127] = std::exp(-0.5 * dn * dn);
        for (int i = 126; i >= 1; --i) {
            dn = std::sqrt(-2.0 * std::log(vn / dn + std::exp(-0.5 * dn * dn)));
            kn[i + 1] = static_cast<std::uint32_t>((dn / tn) * m);
            tn = dn;
            fn[i] = std::exp(-0.5 * dn * dn);
            wn[i] = dn / m;
        }
    }
};
inline const ZigguratTables& ziggurat() {
    static const ZigguratTables t;
    return t;
}
}  // namespace detail

inline double Philox::next_normal() {
    const auto& z = detail::ziggurat();
    for (;;) {
        const std::int32_t hz = static_cast<std::int32_t>(next_u32());
        const int iz = hz & 127;
        if (static_cast<std::uint32_t>(hz < 0 ? -hz : hz) < z.kn[iz]) return hz * z.wn[iz];
        if (iz == 0) {
            double x, y;
            do {
                x = -std::log(next_double() + 1e-300) / 3.442619855899;
                y = -std::log(next_double() + 1e-300);
            } while (y + y < x * x);
            const double r = 3.442619855899 + x;
            return hz > 0 ? r : -r;
        }
        const double x = hz * z.wn[iz];
        if (z.fn[iz] + next_double() * (z.fn[iz - 1] - z.fn[iz]) < std::exp(-0.5 * x * x))
            return x;
    }
}

}  // namespace sbmlab
