// gf.hpp — exact arithmetic in GF(p^d), Frobenius maps, automorphism groups,
// and subfield embeddings.
#pragma once

#include <cstdint>
#include <memory>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rmc {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct FieldError : Error {
    using Error::Error;
};
struct DimensionError : Error {
    using Error::Error;
};
struct SingularMatrix : Error {
    using Error::Error;
};
struct FormatError : Error {
    using Error::Error;
};
struct GuardError : Error {
    using Error::Error;
};

/// Automorphism of GF(p^d) over the prime field: x -> x^(p^j).
struct FieldAut {
    uint32_t j = 0;
    bool is_identity() const { return j == 0; }
    bool operator==(const FieldAut&) const = default;
};

namespace detail {

inline bool is_prime_u32(uint32_t n) {
    if (n < 2) return false;
    for (uint32_t f = 2; (uint64_t)f * f <= n; ++f)
        if (n % f == 0) return false;
    return true;
}

inline std::vector<uint32_t> prime_factors(uint64_t n) {
    std::vector<uint32_t> out;
    for (uint64_t f = 2; f * f <= n; ++f)
        if (n % f == 0) {
            out.push_back((uint32_t)f);
            while (n % f == 0) n /= f;
        }
    if (n > 1) out.push_back((uint32_t)n);
    return out;
}

// Dense polynomials over F_p, little-endian coefficients, trailing zeros trimmed.
using Poly = std::vector<uint32_t>;

inline void poly_trim(Poly& a) {
    while (!a.empty() && a.back() == 0) a.pop_back();
}

inline Poly poly_mulmod(const Poly& a, const Poly& b, const Poly& f, uint32_t p) {
    if (a.empty() || b.empty()) return {};
    Poly r(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        if (a[i])
            for (size_t j = 0; j < b.size(); ++j)
                r[i + j] = (r[i + j] + (uint64_t)a[i] * b[j]) % p;
    // reduce by monic f
    const size_t d = f.size() - 1;
    for (size_t i = r.size(); i-- > d;) {
        if (r[i] == 0) continue;
        uint32_t c = r[i];
        for (size_t t = 0; t <= d; ++t) {
            uint64_t sub = (uint64_t)c * f[t] % p;
            size_t pos = i - d + t;
            r[pos] = (uint32_t)((r[pos] + p - sub) % p);
        }
    }
    r.resize(d);
    poly_trim(r);
    return r;
}

inline Poly poly_powmod(Poly base, uint64_t e, const Poly& f, uint32_t p) {
    Poly r{1};
    while (e) {
        if (e & 1) r = poly_mulmod(r, base, f, p);
        base = poly_mulmod(base, base, f, p);
        e >>= 1;
    }
    return r;
}

inline Poly poly_mod(Poly a, const Poly& b, uint32_t p) {
    poly_trim(a);
    const size_t db = b.size() - 1;
    uint32_t lead_inv = 1;
    {  // inverse of leading coefficient mod p
        uint32_t l = b.back();
        for (uint32_t t = 1; t < p; ++t)
            if ((uint64_t)l * t % p == 1) { lead_inv = t; break; }
    }
    while (a.size() > db) {
        uint32_t c = (uint32_t)((uint64_t)a.back() * lead_inv % p);
        const size_t shift = a.size() - 1 - db;
        if (c)
            for (size_t t = 0; t <= db; ++t) {
                uint64_t sub = (uint64_t)c * b[t] % p;
                a[shift + t] = (uint32_t)((a[shift + t] + p - sub) % p);
            }
        poly_trim(a);
        if (a.empty()) break;
    }
    return a;
}

inline Poly poly_gcd(Poly a, Poly b, uint32_t p) {
    poly_trim(a);
    poly_trim(b);
    while (!b.empty()) {
        Poly r = poly_mod(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// Rabin's test: f monic of degree d is irreducible over F_p iff
// x^(p^d) = x (mod f) and gcd(x^(p^(d/r)) - x, f) = 1 for each prime r | d.
inline bool poly_irreducible(const Poly& f, uint32_t p) {
    const size_t d = f.size() - 1;
    if (d == 0) return false;
    if (d == 1) return true;
    Poly x{0, 1};
    auto pd = [&](uint32_t e) {  // p^e as u64 (guarded by caller's size limits)
        uint64_t r = 1;
        for (uint32_t i = 0; i < e; ++i) r *= p;
        return r;
    };
    Poly xq = poly_powmod(x, pd((uint32_t)d), f, p);
    if (xq != x) return false;
    for (uint32_t r : prime_factors(d)) {
        Poly xe = poly_powmod(x, pd((uint32_t)d / r), f, p);
        // xe - x
        Poly diff = xe;
        diff.resize(std::max<size_t>(diff.size(), 2), 0);
        diff[1] = (diff[1] + p - 1) % p;
        poly_trim(diff);
        Poly g = poly_gcd(f, diff, p);
        if (g.size() != 1) return false;
    }
    return true;
}

}  // namespace detail

class Field;
using FieldPtr = std::shared_ptr<const Field>;

/// Immutable description of GF(p^d) together with arithmetic tables.
///
/// Elements are integer codes in [0, p^d): the coefficient vector of the
/// element in the power basis 1, theta, ..., theta^(d-1), little-endian in
/// base p. The designated generator theta is the residue class of x, so the
/// modulus is required to have x primitive; field_make rejects moduli where
/// it is not.
class Field : public std::enable_shared_from_this<Field> {
public:
    static constexpr uint64_t kMaxSize = 1ull << 24;
    static constexpr uint64_t kTableLimit = 1ull << 20;

    static FieldPtr make(uint32_t p, uint32_t d) { return make_impl(p, d, std::nullopt); }
    static FieldPtr make(uint32_t p, uint32_t d, const std::vector<uint32_t>& modulus) {
        return make_impl(p, d, modulus);
    }

    uint32_t characteristic() const { return p_; }
    uint32_t degree() const { return d_; }
    uint64_t size() const { return size_; }
    const std::vector<uint32_t>& modulus() const { return modulus_; }
    uint32_t generator() const { return generator_; }

    bool same_field(const Field& o) const {
        return p_ == o.p_ && d_ == o.d_ && modulus_ == o.modulus_;
    }

    uint32_t add(uint32_t a, uint32_t b) const {
        if (p_ == 2) return a ^ b;
        uint32_t r = 0, mult = 1;
        while (a || b) {
            uint32_t da = a % p_, db = b % p_;
            r += ((da + db) % p_) * mult;
            a /= p_;
            b /= p_;
            mult *= p_;
        }
        return r;
    }
    uint32_t neg(uint32_t a) const {
        if (p_ == 2) return a;
        uint32_t r = 0, mult = 1;
        while (a) {
            uint32_t da = a % p_;
            r += (da ? p_ - da : 0) * mult;
            a /= p_;
            mult *= p_;
        }
        return r;
    }
    uint32_t sub(uint32_t a, uint32_t b) const { return add(a, neg(b)); }

    uint32_t mul(uint32_t a, uint32_t b) const {
        if (a == 0 || b == 0) return 0;
        if (has_tables_) return exp_[(log_[a] + (uint64_t)log_[b]) % (size_ - 1)];
        return mul_poly(a, b);
    }
    uint32_t inv(uint32_t a) const {
        if (a == 0) throw FieldError("inverse of zero");
        if (has_tables_) return exp_[(size_ - 1 - log_[a]) % (size_ - 1)];
        return pow(a, size_ - 2);
    }
    uint32_t pow(uint32_t a, uint64_t e) const {
        if (a == 0) return e == 0 ? 1 : 0;
        if (has_tables_) return exp_[((uint64_t)log_[a] * (e % (size_ - 1))) % (size_ - 1)];
        uint32_t r = 1;
        while (e) {
            if (e & 1) r = mul_poly(r, a);
            a = mul_poly(a, a);
            e >>= 1;
        }
        return r;
    }

    /// Multiplicative order of a nonzero element.
    uint64_t mult_order(uint32_t a) const {
        if (a == 0) throw FieldError("order of zero");
        uint64_t n = size_ - 1;
        if (n == 0) return 1;
        uint64_t ord = n;
        for (uint32_t r : detail::prime_factors(n))
            while (ord % r == 0 && pow(a, ord / r) == 1) ord /= r;
        return ord;
    }

    /// x -> x^(q^j) where q = p^e is a subfield order. Fixes GF(q) elementwise.
    uint32_t frobenius(uint64_t base_order, uint32_t x, uint32_t j) const {
        check_subfield_order(base_order);
        if (x == 0) return 0;
        if (size_ == 2) return x;
        uint64_t e = 1, n = size_ - 1, b = base_order % n;
        for (uint32_t t = 0; t < j; ++t) e = e * b % n;
        return pow(x, e);
    }

    bool is_subfield_order(uint64_t q) const {
        if (q < 2) return false;
        uint64_t t = q;
        uint32_t e = 0;
        while (t % p_ == 0) { t /= p_; ++e; }
        return t == 1 && e >= 1 && d_ % e == 0;
    }
    void check_subfield_order(uint64_t q) const {
        if (!is_subfield_order(q))
            throw FieldError("not a subfield order: " + std::to_string(q));
    }

    /// Full group Aut(GF(p^d)) over the prime field, as Frobenius powers.
    std::vector<FieldAut> automorphisms() const {
        std::vector<FieldAut> out;
        out.reserve(d_);
        for (uint32_t j = 0; j < d_; ++j) out.push_back(FieldAut{j});
        return out;
    }
    uint32_t apply(FieldAut a, uint32_t x) const { return frobenius(p_, x, a.j % d_); }
    FieldAut compose(FieldAut a, FieldAut b) const { return FieldAut{(a.j + b.j) % d_}; }
    FieldAut invert(FieldAut a) const { return FieldAut{(d_ - a.j % d_) % d_}; }

    uint32_t element_digit(uint32_t code, uint32_t i) const {
        for (uint32_t t = 0; t < i; ++t) code /= p_;
        return code % p_;
    }

private:
    uint32_t p_ = 0, d_ = 0;
    uint64_t size_ = 0;
    std::vector<uint32_t> modulus_;
    uint32_t generator_ = 0;
    bool has_tables_ = false;
    std::vector<uint32_t> exp_, log_;

    uint32_t mul_poly(uint32_t a, uint32_t b) const {
        // schoolbook polynomial product with reduction; slow path for large fields
        detail::Poly pa = to_poly(a), pb = to_poly(b);
        return from_poly(detail::poly_mulmod(pa, pb, modulus_, p_));
    }
    detail::Poly to_poly(uint32_t code) const {
        detail::Poly r;
        while (code) {
            r.push_back(code % p_);
            code /= p_;
        }
        return r;
    }
    uint32_t from_poly(const detail::Poly& q) const {
        uint32_t code = 0;
        for (size_t i = q.size(); i-- > 0;) code = code * p_ + q[i];
        return code;
    }

    static const std::vector<uint32_t>* builtin_modulus(uint32_t p, uint32_t d) {
        // Pinned defaults; every emitted file records the modulus in use.
        static const std::vector<std::pair<std::pair<uint32_t, uint32_t>, std::vector<uint32_t>>>
            table = {
                {{2, 1}, {1, 1}},
                {{2, 2}, {1, 1, 1}},                    // x^2+x+1
                {{2, 3}, {1, 1, 0, 1}},                 // x^3+x+1
                {{2, 4}, {1, 1, 0, 0, 1}},              // x^4+x+1
                {{2, 8}, {1, 0, 1, 1, 1, 0, 0, 0, 1}},  // x^8+x^4+x^3+x^2+1
            };
        for (auto& e : table)
            if (e.first.first == p && e.first.second == d) return &e.second;
        return nullptr;
    }

    static FieldPtr make_impl(uint32_t p, uint32_t d,
                              std::optional<std::vector<uint32_t>> modulus) {
        if (!detail::is_prime_u32(p)) throw FieldError("characteristic must be prime");
        if (d == 0) throw FieldError("degree must be positive");
        uint64_t size = 1;
        for (uint32_t i = 0; i < d; ++i) {
            size *= p;
            if (size > kMaxSize) throw FieldError("unsupported field size (> 2^24)");
        }
        std::vector<uint32_t> mod;
        if (modulus) {
            mod = *modulus;
            if (mod.size() != d + 1 || mod[d] != 1)
                throw FieldError("modulus must be monic of degree d");
            for (uint32_t c : mod)
                if (c >= p) throw FieldError("modulus coefficient out of range");
            if (!detail::poly_irreducible(mod, p)) throw FieldError("reducible modulus");
        } else if (const auto* m = builtin_modulus(p, d)) {
            mod = *m;
        } else {
            mod = search_modulus(p, d, size);
        }
        auto f = std::shared_ptr<Field>(new Field());
        f->p_ = p;
        f->d_ = d;
        f->size_ = size;
        f->modulus_ = mod;
        // theta = x (the residue class of the variable)
        f->generator_ = d == 1 ? f->from_poly(detail::poly_mod({0, 1}, mod, p)) : p;
        f->init_tables();
        if (f->mult_order(f->generator_) != size - 1)
            throw FieldError("generator not primitive for this modulus");
        return f;
    }

    static std::vector<uint32_t> search_modulus(uint32_t p, uint32_t d, uint64_t size) {
        // smallest (by little-endian code) monic irreducible with x primitive
        uint64_t count = 1;
        for (uint32_t i = 0; i < d; ++i) count *= p;
        for (uint64_t c = 1; c < count; ++c) {
            std::vector<uint32_t> f(d + 1, 0);
            uint64_t t = c;
            for (uint32_t i = 0; i < d; ++i) {
                f[i] = t % p;
                t /= p;
            }
            f[d] = 1;
            if (f[0] == 0) continue;
            if (!detail::poly_irreducible(f, p)) continue;
            // x primitive?
            detail::Poly x = detail::poly_mod({0, 1}, f, p);
            bool prim = true;
            uint64_t n = size - 1;
            for (uint32_t r : detail::prime_factors(n)) {
                if (detail::poly_powmod(x, n / r, f, p) == detail::Poly{1}) {
                    prim = false;
                    break;
                }
            }
            if (prim) return f;
        }
        throw FieldError("no primitive modulus found");
    }

    void init_tables() {
        if (size_ > kTableLimit) return;
        exp_.assign(size_ - 1, 1);
        log_.assign(size_, 0);
        uint32_t e = 1;
        for (uint64_t i = 1; i < size_ - 1; ++i) {
            e = mul_poly(e, generator_);
            exp_[i] = e;
        }
        for (uint64_t i = 0; i < size_ - 1; ++i) log_[exp_[i]] = (uint32_t)i;
        has_tables_ = true;
    }

    Field() = default;
};

inline FieldPtr field_make(uint32_t p, uint32_t d) { return Field::make(p, d); }
inline FieldPtr field_make(uint32_t p, uint32_t d, const std::vector<uint32_t>& modulus) {
    return Field::make(p, d, modulus);
}

/// Injective ring homomorphism GF(p^e) -> GF(p^d) for e | d, determined by the
/// image of the source generator (the smallest-code root of the source
/// modulus in the target).
class Embedding {
public:
    Embedding() = default;

    static Embedding find(FieldPtr src, FieldPtr dst) {
        if (src->characteristic() != dst->characteristic())
            throw FieldError("embedding requires equal characteristic");
        if (dst->degree() % src->degree() != 0)
            throw FieldError("source degree must divide target degree");
        uint32_t gamma = 0;
        bool found = false;
        for (uint64_t c = 0; c < dst->size(); ++c) {
            if (eval_modulus(*src, *dst, (uint32_t)c) == 0) {
                gamma = (uint32_t)c;
                found = true;
                break;
            }
        }
        if (!found) throw FieldError("no root of source modulus in target");
        return Embedding(std::move(src), std::move(dst), gamma);
    }

    /// Constructs with an explicit generator image, validating it.
    static Embedding with_image(FieldPtr src, FieldPtr dst, uint32_t gamma) {
        if (eval_modulus(*src, *dst, gamma) != 0)
            throw FieldError("invalid embedding: generator image is not a modulus root");
        return Embedding(std::move(src), std::move(dst), gamma);
    }

    const FieldPtr& source() const { return src_; }
    const FieldPtr& target() const { return dst_; }
    uint32_t generator_image() const { return gamma_; }

    uint32_t map(uint32_t x) const {
        if (x >= src_->size()) throw FieldError("element out of range for source field");
        return fwd_[x];
    }
    std::optional<uint32_t> preimage(uint32_t y) const {
        if (y < rev_.size() && rev_[y] >= 0) return (uint32_t)rev_[y];
        return std::nullopt;
    }
    bool identity() const { return src_->same_field(*dst_); }

private:
    FieldPtr src_, dst_;
    uint32_t gamma_ = 0;
    std::vector<uint32_t> fwd_;
    std::vector<int64_t> rev_;

    static uint32_t eval_modulus(const Field& src, const Field& dst, uint32_t c) {
        // Horner evaluation of the source modulus at c, coefficients lifted
        // from the prime field
        const auto& m = src.modulus();
        uint32_t acc = 0;
        for (size_t i = m.size(); i-- > 0;) acc = dst.add(dst.mul(acc, c), m[i]);
        return acc;
    }

    Embedding(FieldPtr src, FieldPtr dst, uint32_t gamma)
        : src_(std::move(src)), dst_(std::move(dst)), gamma_(gamma) {
        fwd_.resize(src_->size());
        // additive construction: sum of digit_i * gamma^i
        std::vector<uint32_t> gpow(src_->degree());
        uint32_t g = 1;
        for (uint32_t i = 0; i < src_->degree(); ++i) {
            gpow[i] = g;
            g = dst_->mul(g, gamma_);
        }
        for (uint64_t x = 0; x < src_->size(); ++x) {
            uint32_t acc = 0;
            for (uint32_t i = 0; i < src_->degree(); ++i) {
                uint32_t digit = src_->element_digit((uint32_t)x, i);
                if (digit) acc = dst_->add(acc, dst_->mul(digit, gpow[i]));
            }
            fwd_[x] = acc;
        }
        if (dst_->size() <= (1ull << 20)) {
            rev_.assign(dst_->size(), -1);
            for (uint64_t x = 0; x < src_->size(); ++x) rev_[fwd_[x]] = (int64_t)x;
        }
    }
};

}  // namespace rmc
