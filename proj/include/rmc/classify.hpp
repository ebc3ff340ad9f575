// classify.hpp — the iterative classification driver: extend representatives
// by seed-set elements, filter by invertibility, bucket by the composite
// invariant, resolve collisions with full equivalence tests.
//
// Parallelism: workers compute candidate survival and invariants for blocks
// of representatives; a single merge pass consumes candidates in canonical
// (representative id, seed index) order, so results are independent of the
// worker count.
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <mutex>
#include <thread>

#include "rmc/sampling.hpp"

namespace rmc {

struct StepStats {
    uint32_t k = 0;
    uint64_t candidates = 0;
    uint64_t survivors = 0;
    uint64_t new_keys = 0;
    uint64_t key_hits = 0;
    uint64_t equiv_tests = 0;
    uint64_t equiv_true = 0;
    uint64_t classes = 0;
    double seconds = 0;
};

struct ClassifyConfig {
    uint32_t m = 2;
    bool use_invariants = true;
    bool direct_invariants = false;  // rank multisets via direct enumeration
    uint32_t threads = 1;
    std::function<void(const StepStats&)> on_step;
    std::function<void(const struct ClassificationState&)> on_checkpoint;
};

/// Serializable snapshot: T_k plus everything needed to continue.
struct ClassificationState {
    ContextPtr ctx;
    uint32_t m = 2;
    uint32_t k = 0;
    std::vector<MatrixCode> reps;       // bases in prefix (seed) form
    std::vector<InvariantKey> keys;
    std::vector<VectorCode> registry;   // vector-class representatives in label order
    std::vector<StepStats> steps;
};

struct ClassificationResult {
    std::vector<MatrixCode> reps;  // canonical first-row bases
    std::vector<InvariantKey> keys;
    std::vector<VectorCode> registry;
    std::vector<StepStats> steps;
    uint64_t final_candidates = 0;  // invertibility survivors at the last step
};

namespace detail {

inline bool packed_classifier_ok(const ContextPtr& ctx) {
    return ctx->big_field()->characteristic() == 2 && ctx->n() == 2 &&
           ctx->big_field()->size() <= 256 && ctx->q() == 2;
}

/// Canonical vector-code generator of a candidate basis, as flat bytes
/// (dim, length, rref entries); packed fast path of vector_code().
inline std::vector<uint8_t> packed_vcode_key(const PackedOps& ops, const std::vector<uint32_t>& basis) {
    const uint32_t k = (uint32_t)basis.size();
    // rows = 4 coordinates of vec (a, c, b, d), columns = basis elements
    std::array<std::vector<uint32_t>, 4> rows;
    for (auto& r : rows) r.assign(k, 0);
    for (uint32_t j = 0; j < k; ++j) {
        uint32_t m = basis[j];
        rows[0][j] = m & 255;
        rows[1][j] = (m >> 16) & 255;
        rows[2][j] = (m >> 8) & 255;
        rows[3][j] = m >> 24;
    }
    // RREF over the byte field
    uint32_t rank = 0;
    for (uint32_t c = 0; c < k && rank < 4; ++c) {
        uint32_t piv = rank;
        while (piv < 4 && rows[piv][c] == 0) ++piv;
        if (piv == 4) continue;
        std::swap(rows[piv], rows[rank]);
        uint32_t ip = ops.inv(rows[rank][c]);
        for (uint32_t j = 0; j < k; ++j) rows[rank][j] = ops.mul(ip, rows[rank][j]);
        for (uint32_t r = 0; r < 4; ++r) {
            if (r == rank) continue;
            uint32_t v = rows[r][c];
            if (!v) continue;
            for (uint32_t j = 0; j < k; ++j) rows[r][j] ^= ops.mul(v, rows[rank][j]);
        }
        ++rank;
    }
    std::vector<uint8_t> out;
    out.reserve(2 + size_t(rank) * k);
    out.push_back((uint8_t)rank);
    out.push_back((uint8_t)k);
    for (uint32_t r = 0; r < rank; ++r)
        for (uint32_t j = 0; j < k; ++j) out.push_back((uint8_t)rows[r][j]);
    return out;
}

inline VectorCode vcode_from_key(const FieldPtr& big, uint64_t q, const std::vector<uint8_t>& key) {
    uint32_t dim = key[0], len = key[1];
    std::vector<std::vector<uint32_t>> rows(dim, std::vector<uint32_t>(len));
    for (uint32_t r = 0; r < dim; ++r)
        for (uint32_t j = 0; j < len; ++j) rows[r][j] = key[2 + size_t(r) * len + j];
    return VectorCode(big, q, len, rows);
}

struct VKeyHash {
    size_t operator()(const std::vector<uint8_t>& v) const {
        uint64_t h = 0xcbf29ce484222325ull;
        for (uint8_t b : v) h = (h ^ b) * 0x100000001b3ull;
        return (size_t)h;
    }
};

/// Packed driver for q = 2, n = 2 parameter families.
class PackedDriver {
public:
    PackedDriver(ContextPtr ctx, const ClassifyConfig& cfg)
        : ctx_(std::move(ctx)),
          cfg_(cfg),
          ops_(ctx_->big_field()),
          rank_engine_(ctx_, cfg.m),
          equiv_ops_{&ops_, ctx_->big_field()->degree()} {
        auto seeds = seed_sets(ctx_);
        seeds_.resize(ctx_->ns());
        for (uint32_t k = 0; k < ctx_->ns(); ++k)
            for (const auto& m : seeds.sets[k]) seeds_[k].push_back(ops_.from_mat(m));
        // entry embedding into the invariant field F_{q^L}
        const auto& emb = rank_engine_.env().big_to_ql;
        embl_.resize(ctx_->big_field()->size());
        for (uint32_t x = 0; x < embl_.size(); ++x) embl_[x] = emb.map(x);
    }

    struct Rep {
        std::vector<uint32_t> basis;
        InvariantKey key;
        std::unique_ptr<PreparedTarget<PackedEquivOps>> target;  // lazy
    };

    void load(const ClassificationState& st) {
        reps_.clear();
        for (const auto& c : st.reps) {
            Rep r;
            for (const auto& b : c.basis()) r.basis.push_back(ops_.from_mat(b));
            reps_.push_back(std::move(r));
        }
        for (size_t i = 0; i < st.keys.size() && i < reps_.size(); ++i) reps_[i].key = st.keys[i];
        registry_.restore(st.registry);
    }

    ClassificationState snapshot(uint32_t k, const std::vector<StepStats>& steps) const {
        ClassificationState st;
        st.ctx = ctx_;
        st.m = cfg_.m;
        st.k = k;
        for (const auto& r : reps_) {
            std::vector<Mat> basis;
            for (uint32_t b : r.basis) basis.push_back(ops_.to_mat(b));
            st.reps.emplace_back(ctx_, std::move(basis));
            st.keys.push_back(r.key);
        }
        for (const auto& e : registry_.entries()) st.registry.push_back(e.code);
        st.steps = steps;
        return st;
    }

    /// One extension step k -> k+1; reps_ holds T_k on entry, T_{k+1} on exit.
    StepStats extend_step(uint32_t k) {
        auto t0 = std::chrono::steady_clock::now();
        StepStats stats;
        stats.k = k + 1;
        const auto& seeds = seeds_[k];

        struct Candidate {
            uint32_t seed_index;
            std::string ranks;
            std::vector<uint8_t> vkey;
        };
        struct Block {
            std::vector<Candidate> cands;
            uint64_t candidates = 0;
            bool ready = false;
        };

        std::vector<Block> blocks(reps_.empty() ? 1 : reps_.size());
        std::mutex mu;
        std::condition_variable cv;
        std::atomic<size_t> next{0};
        std::atomic<size_t> merged{0};
        std::atomic<bool> failed{false};
        std::string fail_msg;
        const size_t window = 256;

        auto worker = [&]() {
          try {
            while (true) {
                size_t i = next.fetch_add(1);
                if (i >= blocks.size()) return;
                if (failed.load()) return;
                // bound the lead over the merge thread
                {
                    std::unique_lock<std::mutex> lk(mu);
                    cv.wait(lk, [&] { return i < merged.load() + window || failed.load(); });
                    if (failed.load()) return;
                }
                Block blk;
                const std::vector<uint32_t> base =
                    reps_.empty() ? std::vector<uint32_t>{} : reps_[i].basis;
                // span of the representative
                std::vector<uint32_t> span(size_t(1) << base.size());
                span[0] = 0;
                for (size_t t = 0; t < base.size(); ++t)
                    for (size_t u = 0; u < (size_t(1) << t); ++u)
                        span[(size_t(1) << t) + u] = span[u] ^ base[t];
                std::vector<uint32_t> cand_basis_l(base.size() + 1);
                for (size_t t = 0; t < base.size(); ++t) cand_basis_l[t] = embed_l(base[t]);
                std::vector<uint32_t> cand_basis(base.size() + 1);
                for (size_t t = 0; t < base.size(); ++t) cand_basis[t] = base[t];
                for (uint32_t si = 0; si < seeds.size(); ++si) {
                    const uint32_t a = seeds[si];
                    ++blk.candidates;
                    bool ok = true;
                    for (uint32_t c : span)
                        if (ops_.det(c ^ a) == 0) { ok = false; break; }
                    if (!ok) continue;
                    Candidate cd;
                    cd.seed_index = si;
                    if (cfg_.use_invariants) {
                        cand_basis_l.back() = embed_l(a);
                        if (cfg_.direct_invariants) {
                            cand_basis.back() = a;
                            cd.ranks = m_ranks_direct(to_code(cand_basis), cfg_.m).to_string();
                        } else {
                            cd.ranks = rank_engine_.multiset(cand_basis_l).to_string();
                        }
                        cand_basis.back() = a;
                        cd.vkey = packed_vcode_key(ops_, cand_basis);
                    }
                    blk.cands.push_back(std::move(cd));
                }
                {
                    std::lock_guard<std::mutex> lk(mu);
                    blocks[i] = std::move(blk);
                    blocks[i].ready = true;
                }
                cv.notify_all();
            }
          } catch (const std::exception& e) {
              std::lock_guard<std::mutex> lk(mu);
              failed.store(true);
              fail_msg = e.what();
              cv.notify_all();
          }
        };

        uint32_t nthreads = std::max(1u, cfg_.threads);
        std::vector<std::thread> pool;
        for (uint32_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);

        // merge phase: canonical order
        std::vector<Rep> next_reps;
        std::unordered_map<InvariantKey, std::vector<size_t>, InvariantKeyHash> buckets;
        std::unordered_map<std::vector<uint8_t>, int32_t, VKeyHash> vmemo;
        for (size_t i = 0; i < blocks.size(); ++i) {
            {
                std::unique_lock<std::mutex> lk(mu);
                cv.wait(lk, [&] { return blocks[i].ready || failed.load(); });
                if (failed.load()) {
                    merged.store(blocks.size());
                    lk.unlock();
                    cv.notify_all();
                    for (auto& t : pool) t.join();
                    throw Error("classification worker failed: " + fail_msg);
                }
            }
            Block& blk = blocks[i];
            stats.candidates += blk.candidates;
            const std::vector<uint32_t> base =
                reps_.empty() ? std::vector<uint32_t>{} : reps_[i].basis;
            for (auto& cd : blk.cands) {
                ++stats.survivors;
                std::vector<uint32_t> basis = base;
                basis.push_back(seeds[cd.seed_index]);
                InvariantKey key;
                if (cfg_.use_invariants) {
                    int32_t label;
                    auto mit = vmemo.find(cd.vkey);
                    if (mit != vmemo.end()) {
                        label = mit->second;
                    } else {
                        label = registry_.label(vcode_from_key(ctx_->big_field(), 2, cd.vkey));
                        vmemo.emplace(cd.vkey, label);
                    }
                    key = InvariantKey{std::move(cd.ranks), label};
                }
                auto& bucket = buckets[key];
                if (bucket.empty()) ++stats.new_keys;
                else ++stats.key_hits;
                bool dup = false;
                for (size_t ridx : bucket) {
                    ++stats.equiv_tests;
                    if (equivalent_to(basis, next_reps[ridx])) {
                        ++stats.equiv_true;
                        dup = true;
                        break;
                    }
                }
                if (!dup) {
                    bucket.push_back(next_reps.size());
                    Rep r;
                    r.basis = std::move(basis);
                    r.key = key;
                    next_reps.push_back(std::move(r));
                }
            }
            blk.cands.clear();
            merged.store(i + 1);
            cv.notify_all();
        }
        for (auto& t : pool) t.join();

        reps_ = std::move(next_reps);
        stats.classes = reps_.size();
        stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return stats;
    }

    std::vector<Rep>& reps() { return reps_; }
    const VectorClassRegistry& registry() const { return registry_; }

    MatrixCode to_code(const std::vector<uint32_t>& basis) const {
        std::vector<Mat> b;
        b.reserve(basis.size());
        for (uint32_t m : basis) b.push_back(ops_.to_mat(m));
        return MatrixCode(ctx_, b);
    }

private:
    ContextPtr ctx_;
    ClassifyConfig cfg_;
    PackedOps ops_;
    PackedRankEngine rank_engine_;
    PackedEquivOps equiv_ops_;
    std::vector<std::vector<uint32_t>> seeds_;
    std::vector<Rep> reps_;
    VectorClassRegistry registry_;
    std::vector<uint32_t> embl_;

    uint32_t embed_l(uint32_t packed) const {
        return PackedOps::pack(embl_[packed & 255], embl_[(packed >> 8) & 255],
                               embl_[(packed >> 16) & 255], embl_[packed >> 24]);
    }

    /// Full equivalence decision candidate vs stored representative.
    bool equivalent_to(const std::vector<uint32_t>& cand, Rep& rep) {
        // normalize candidate by its first basis element (invertible: it is a
        // seed); representatives keep a lazily built prepared target
        if (!rep.target)
            rep.target = std::make_unique<PreparedTarget<PackedEquivOps>>(
                PreparedTarget<PackedEquivOps>::build(equiv_ops_, rep.basis));
        uint32_t a0inv = ops_.inverse(cand[0]);
        std::vector<uint32_t> norm;
        norm.reserve(cand.size());
        for (uint32_t b : cand) norm.push_back(ops_.matmul(b, a0inv));
        return equiv_core(equiv_ops_, norm, *rep.target).has_value();
    }
};

/// Mat-based driver for everything the packed one does not cover; intended
/// for small parameters only.
class GenericDriver {
public:
    GenericDriver(ContextPtr ctx, const ClassifyConfig& cfg) : ctx_(std::move(ctx)), cfg_(cfg) {
        seeds_ = seed_sets(ctx_);
    }

    struct Rep {
        std::vector<Mat> basis;
        InvariantKey key;
    };

    void load(const ClassificationState& st) {
        reps_.clear();
        for (const auto& c : st.reps) reps_.push_back(Rep{c.basis(), {}});
        for (size_t i = 0; i < st.keys.size() && i < reps_.size(); ++i) reps_[i].key = st.keys[i];
        registry_.restore(st.registry);
    }

    ClassificationState snapshot(uint32_t k, const std::vector<StepStats>& steps) const {
        ClassificationState st;
        st.ctx = ctx_;
        st.m = cfg_.m;
        st.k = k;
        for (const auto& r : reps_) {
            st.reps.emplace_back(ctx_, r.basis);
            st.keys.push_back(r.key);
        }
        for (const auto& e : registry_.entries()) st.registry.push_back(e.code);
        st.steps = steps;
        return st;
    }

    StepStats extend_step(uint32_t k) {
        auto t0 = std::chrono::steady_clock::now();
        StepStats stats;
        stats.k = k + 1;
        std::vector<Rep> next_reps;
        std::unordered_map<InvariantKey, std::vector<size_t>, InvariantKeyHash> buckets;
        const auto& seeds = seeds_.sets[k];
        const size_t blocks = reps_.empty() ? 1 : reps_.size();
        for (size_t i = 0; i < blocks; ++i) {
            std::vector<Mat> base = reps_.empty() ? std::vector<Mat>{} : reps_[i].basis;
            std::optional<MatrixCode> base_code;
            if (!base.empty()) base_code.emplace(ctx_, base);
            for (const auto& a : seeds) {
                ++stats.candidates;
                bool ok = base.empty() ? a.invertible() : is_semifield_code_incremental(*base_code, a);
                if (!ok) continue;
                ++stats.survivors;
                std::vector<Mat> basis = base;
                basis.push_back(a);
                MatrixCode cand(ctx_, basis);
                InvariantKey key;
                if (cfg_.use_invariants) {
                    RankMultiset rm = cfg_.direct_invariants ? m_ranks_direct(cand, cfg_.m)
                                                             : m_ranks_fast(cand, cfg_.m);
                    key = InvariantKey{rm.to_string(), registry_.label(vector_code(cand))};
                }
                auto& bucket = buckets[key];
                if (bucket.empty()) ++stats.new_keys;
                else ++stats.key_hits;
                bool dup = false;
                for (size_t ridx : bucket) {
                    ++stats.equiv_tests;
                    MatrixCode other(ctx_, next_reps[ridx].basis);
                    if (matrix_code_equivalent(cand, other)) {
                        ++stats.equiv_true;
                        dup = true;
                        break;
                    }
                }
                if (!dup) {
                    bucket.push_back(next_reps.size());
                    next_reps.push_back(Rep{std::move(basis), key});
                }
            }
        }
        reps_ = std::move(next_reps);
        stats.classes = reps_.size();
        stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return stats;
    }

    std::vector<Rep>& reps() { return reps_; }
    const VectorClassRegistry& registry() const { return registry_; }

private:
    ContextPtr ctx_;
    ClassifyConfig cfg_;
    SeedSets seeds_;
    std::vector<Rep> reps_;
    VectorClassRegistry registry_;
};

}  // namespace detail

/// Single extension step of the iterative classification (k -> k+1).
inline ClassificationState extend_step(const ClassificationState& st, const ClassifyConfig& cfg) {
    ClassifyConfig c = cfg;
    c.m = st.m;
    std::vector<StepStats> steps = st.steps;
    if (detail::packed_classifier_ok(st.ctx)) {
        detail::PackedDriver d(st.ctx, c);
        d.load(st);
        StepStats s = d.extend_step(st.k);
        steps.push_back(s);
        return d.snapshot(st.k + 1, steps);
    }
    detail::GenericDriver d(st.ctx, c);
    d.load(st);
    StepStats s = d.extend_step(st.k);
    steps.push_back(s);
    return d.snapshot(st.k + 1, steps);
}

inline ClassificationState initial_state(const ContextPtr& ctx, uint32_t m = 2) {
    ClassificationState st;
    st.ctx = ctx;
    st.m = m;
    st.k = 0;
    return st;
}

/// Runs (or resumes) the classification to k = ns and finalizes canonical
/// representatives.
inline ClassificationResult classify_from(ClassificationState st, const ClassifyConfig& cfg) {
    while (st.k < st.ctx->ns()) {
        st = extend_step(st, cfg);
        if (cfg.on_step) cfg.on_step(st.steps.back());
        if (cfg.on_checkpoint) cfg.on_checkpoint(st);
    }
    ClassificationResult res;
    res.steps = st.steps;
    res.registry = st.registry;
    res.keys = st.keys;
    res.final_candidates = st.steps.empty() ? 0 : st.steps.back().survivors;
    for (auto& c : st.reps) res.reps.push_back(canonical_basis(c));
    return res;
}

inline ClassificationResult classify(const ContextPtr& ctx, const ClassifyConfig& cfg = {}) {
    return classify_from(initial_state(ctx, cfg.m), cfg);
}

}  // namespace rmc
