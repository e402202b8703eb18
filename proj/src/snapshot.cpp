#include <bit>
#include <cstring>

#include "rift/engine.hpp"

namespace rift {

namespace {

constexpr char kMagic[4] = {'R', 'I', 'F', 'T'};
constexpr uint32_t kVersion = 1;

enum SectionTag : uint16_t {
    kTagConfig = 1,
    kTagQ = 2,
    kTagGate = 3,
    kTagZedm = 4,
    kTagDensity = 5,
    kTagScaler = 6,
    kTagCounters = 7,
    kTagWarmup = 8,
    kTagRules = 9,
    kTagArchive = 10,
};

class Writer {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { raw(&v, 2); }
    void u32(uint32_t v) { raw(&v, 4); }
    void u64(uint64_t v) { raw(&v, 8); }
    void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
    void f64(double v) { u64(std::bit_cast<uint64_t>(v)); }
    void vec(const Vec& v) {
        u64(v.size());
        for (double x : v) f64(x);
    }
    void mat(const Mat& m) {
        u32(static_cast<uint32_t>(m.rows));
        u32(static_cast<uint32_t>(m.cols));
        for (double x : m.a) f64(x);
    }
    std::vector<uint8_t> take() { return std::move(buf_); }
    size_t size() const { return buf_.size(); }
    void append(const Writer& w) { buf_.insert(buf_.end(), w.buf_.begin(), w.buf_.end()); }

private:
    void raw(const void* p, size_t n) {
        // Little-endian layout is assumed and documented; every supported
        // target is little-endian.
        const auto* b = static_cast<const uint8_t*>(p);
        buf_.insert(buf_.end(), b, b + n);
    }
    std::vector<uint8_t> buf_;
};

class Reader {
public:
    Reader(const uint8_t* data, size_t size) : data_(data), size_(size) {}

    uint8_t u8() { return *take(1); }
    uint16_t u16() { return read_int<uint16_t>(); }
    uint32_t u32() { return read_int<uint32_t>(); }
    uint64_t u64() { return read_int<uint64_t>(); }
    int64_t i64() { return static_cast<int64_t>(u64()); }
    double f64() { return std::bit_cast<double>(u64()); }
    Vec vec() {
        const uint64_t n = count(8);
        Vec v(n);
        for (uint64_t i = 0; i < n; ++i) v[i] = f64();
        return v;
    }
    Mat mat() {
        Mat m;
        m.rows = static_cast<int>(u32());
        m.cols = static_cast<int>(u32());
        if (m.rows < 0 || m.cols < 0) throw SnapshotError("snapshot: bad matrix shape");
        const uint64_t n = static_cast<uint64_t>(m.rows) * static_cast<uint64_t>(m.cols);
        if (n > remaining() / 8) throw SnapshotError("snapshot: matrix overruns payload");
        m.a.resize(n);
        for (uint64_t i = 0; i < n; ++i) m.a[i] = f64();
        return m;
    }
    // Element count whose payload must still fit; stops hostile counts from
    // turning into giant allocations.
    uint64_t count(size_t min_bytes_each) {
        const uint64_t n = u64();
        if (min_bytes_each > 0 && n > remaining() / min_bytes_each)
            throw SnapshotError("snapshot: count overruns payload");
        return n;
    }
    void skip(size_t n) { take(n); }
    size_t remaining() const { return size_ - pos_; }
    size_t pos() const { return pos_; }
    void seek(size_t p) { pos_ = p; }

private:
    template <typename T>
    T read_int() {
        T v;
        std::memcpy(&v, take(sizeof(T)), sizeof(T));
        return v;
    }
    const uint8_t* take(size_t n) {
        check_remaining(n);
        const uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }
    void check_remaining(size_t n) const {
        if (pos_ + n > size_) throw SnapshotError("snapshot: truncated payload");
    }
    const uint8_t* data_;
    size_t size_;
    size_t pos_ = 0;
};

void write_rule(Writer& w, const Rule& r) {
    w.vec(r.c_lower);
    w.vec(r.c_upper);
    w.mat(r.inv_cov);
    w.vec(r.sigma);
    w.mat(r.weights);
    w.mat(r.rls_cov);
    w.f64(r.lambda);
    w.f64(r.prev_psi_upper);
    w.f64(r.prev_psi_lower);
    w.i64(r.n_pop);
    w.vec(r.coord_sum);
    w.f64(r.sq_sum);
    w.f64(r.util.mean_firing);
    w.f64(r.util.mean_target);
    w.f64(r.util.var_firing);
    w.f64(r.util.var_target);
    w.f64(r.util.cov_ft);
    w.i64(r.util.low_streak);
}

Rule read_rule(Reader& r) {
    Rule rule;
    rule.c_lower = r.vec();
    rule.c_upper = r.vec();
    rule.inv_cov = r.mat();
    rule.sigma = r.vec();
    rule.weights = r.mat();
    rule.rls_cov = r.mat();
    rule.lambda = r.f64();
    rule.prev_psi_upper = r.f64();
    rule.prev_psi_lower = r.f64();
    rule.n_pop = r.i64();
    rule.coord_sum = r.vec();
    rule.sq_sum = r.f64();
    rule.util.mean_firing = r.f64();
    rule.util.mean_target = r.f64();
    rule.util.var_firing = r.f64();
    rule.util.var_target = r.f64();
    rule.util.cov_ft = r.f64();
    rule.util.low_streak = r.i64();
    return rule;
}

void write_section(Writer& out, uint16_t tag, Writer&& body) {
    out.u16(tag);
    out.u64(body.size());
    out.append(body);
}

}  // namespace

std::vector<uint8_t> serialize_model(const ModelState& st) {
    Writer w;
    for (char c : kMagic) w.u8(static_cast<uint8_t>(c));
    w.u32(kVersion);
    w.u32(static_cast<uint32_t>(st.n_inputs));
    w.u32(static_cast<uint32_t>(st.n_outputs));
    w.u32(static_cast<uint32_t>(st.rules.size()));

    {
        Writer b;
        const EngineConfig& c = st.config;
        b.f64(c.delta);
        b.f64(c.epsilon);
        b.f64(c.gate_step);
        b.f64(c.omega);
        b.u32(static_cast<uint32_t>(c.n_history));
        b.f64(c.alpha_sig);
        b.f64(c.u_norm);
        b.f64(c.tau);
        b.f64(c.delta3);
        b.f64(c.delta4);
        b.f64(c.theta_prune);
        b.i64(c.prune_window);
        b.u32(static_cast<uint32_t>(c.rule_cap));
        b.u32(static_cast<uint32_t>(c.archive_cap));
        b.f64(c.utility_decay);
        b.f64(c.weight_decay);
        b.f64(c.eta_q);
        b.f64(c.eta_lambda);
        b.f64(c.delta1_init);
        b.f64(c.q_init);
        b.f64(c.lambda_init);
        b.f64(c.init_spread);
        b.u64(c.seed);
        b.u8(c.gate_enabled ? 1 : 0);
        b.u8(c.growth_enabled ? 1 : 0);
        b.u8(c.pruning_enabled ? 1 : 0);
        b.u8(c.recall_enabled ? 1 : 0);
        b.u8(c.parallel ? 1 : 0);
        write_section(w, kTagConfig, std::move(b));
    }
    {
        Writer b;
        b.vec(st.q);
        write_section(w, kTagQ, std::move(b));
    }
    {
        Writer b;
        b.f64(st.gate.delta1);
        b.f64(st.gate.step);
        b.u32(static_cast<uint32_t>(st.gate.max_rules_seen));
        write_section(w, kTagGate, std::move(b));
    }
    {
        Writer b;
        b.f64(st.zedm.eta_q);
        b.f64(st.zedm.eta_lambda);
        b.f64(st.zedm.accum);
        b.f64(st.zedm.f_prev);
        b.u8(st.zedm.has_prev ? 1 : 0);
        b.i64(st.zedm.n_seen);
        b.f64(st.zedm.grad_max);
        b.f64(st.zedm.tau);
        b.f64(st.zedm.delta3);
        b.f64(st.zedm.delta4);
        write_section(w, kTagZedm, std::move(b));
    }
    {
        Writer b;
        b.u32(static_cast<uint32_t>(st.density.n_comp));
        for (const Vec& v : st.density.means) b.vec(v);
        for (const Mat& m : st.density.covariances) b.mat(m);
        b.vec(st.density.mixing);
        b.vec(st.density.fit_log_likelihood);
        write_section(w, kTagDensity, std::move(b));
    }
    {
        Writer b;
        b.u8(st.scaler.initialized ? 1 : 0);
        b.vec(st.scaler.lo);
        b.vec(st.scaler.hi);
        write_section(w, kTagScaler, std::move(b));
    }
    {
        Writer b;
        b.i64(st.counters.seen);
        b.i64(st.counters.accepted);
        b.i64(st.counters.grown);
        b.i64(st.counters.pruned);
        b.i64(st.counters.recalled);
        b.i64(st.counters.numeric_skips);
        write_section(w, kTagCounters, std::move(b));
    }
    {
        Writer b;
        b.u64(st.warmup_buffer.size());
        for (const Vec& v : st.warmup_buffer) b.vec(v);
        write_section(w, kTagWarmup, std::move(b));
    }
    {
        Writer b;
        for (const Rule& r : st.rules) write_rule(b, r);
        write_section(w, kTagRules, std::move(b));
    }
    {
        Writer b;
        b.u64(st.archive.items.size());
        b.u32(static_cast<uint32_t>(st.archive.cap));
        for (const ArchivedRule& ar : st.archive.items) {
            write_rule(b, ar.rule);
            b.i64(ar.pruned_at);
        }
        write_section(w, kTagArchive, std::move(b));
    }
    return w.take();
}

ModelState deserialize_model(const std::vector<uint8_t>& bytes) {
    Reader r(bytes.data(), bytes.size());
    for (char c : kMagic)
        if (r.u8() != static_cast<uint8_t>(c)) throw SnapshotError("snapshot: bad magic");
    const uint32_t version = r.u32();
    if (version != kVersion)
        throw SnapshotError("snapshot: unsupported version " + std::to_string(version));

    ModelState st;
    st.n_inputs = static_cast<int>(r.u32());
    st.n_outputs = static_cast<int>(r.u32());
    const uint32_t n_rules = r.u32();
    if (st.n_inputs < 0 || st.n_outputs < 0 || n_rules > bytes.size() / 8)
        throw SnapshotError("snapshot: implausible header");

    uint32_t seen_mask = 0;
    while (r.remaining() > 0) {
        const uint16_t tag = r.u16();
        const uint64_t len = r.u64();
        const size_t body_end = r.pos() + len;
        if (body_end > bytes.size()) throw SnapshotError("snapshot: section overruns payload");
        switch (tag) {
            case kTagConfig: {
                EngineConfig& c = st.config;
                c.delta = r.f64();
                c.epsilon = r.f64();
                c.gate_step = r.f64();
                c.omega = r.f64();
                c.n_history = static_cast<int>(r.u32());
                c.alpha_sig = r.f64();
                c.u_norm = r.f64();
                c.tau = r.f64();
                c.delta3 = r.f64();
                c.delta4 = r.f64();
                c.theta_prune = r.f64();
                c.prune_window = r.i64();
                c.rule_cap = static_cast<int>(r.u32());
                c.archive_cap = static_cast<int>(r.u32());
                c.utility_decay = r.f64();
                c.weight_decay = r.f64();
                c.eta_q = r.f64();
                c.eta_lambda = r.f64();
                c.delta1_init = r.f64();
                c.q_init = r.f64();
                c.lambda_init = r.f64();
                c.init_spread = r.f64();
                c.seed = r.u64();
                c.gate_enabled = r.u8() != 0;
                c.growth_enabled = r.u8() != 0;
                c.pruning_enabled = r.u8() != 0;
                c.recall_enabled = r.u8() != 0;
                c.parallel = r.u8() != 0;
                break;
            }
            case kTagQ:
                st.q = r.vec();
                break;
            case kTagGate:
                st.gate.delta1 = r.f64();
                st.gate.step = r.f64();
                st.gate.max_rules_seen = static_cast<int>(r.u32());
                break;
            case kTagZedm:
                st.zedm.eta_q = r.f64();
                st.zedm.eta_lambda = r.f64();
                st.zedm.accum = r.f64();
                st.zedm.f_prev = r.f64();
                st.zedm.has_prev = r.u8() != 0;
                st.zedm.n_seen = r.i64();
                st.zedm.grad_max = r.f64();
                st.zedm.tau = r.f64();
                st.zedm.delta3 = r.f64();
                st.zedm.delta4 = r.f64();
                break;
            case kTagDensity: {
                st.density.n_comp = static_cast<int>(r.u32());
                if (st.density.n_comp < 0 ||
                    static_cast<uint64_t>(st.density.n_comp) > r.remaining() / 8)
                    throw SnapshotError("snapshot: bad component count");
                st.density.means.resize(static_cast<size_t>(st.density.n_comp));
                for (auto& v : st.density.means) v = r.vec();
                st.density.covariances.resize(static_cast<size_t>(st.density.n_comp));
                for (auto& m : st.density.covariances) m = r.mat();
                st.density.mixing = r.vec();
                st.density.fit_log_likelihood = r.vec();
                break;
            }
            case kTagScaler:
                st.scaler.initialized = r.u8() != 0;
                st.scaler.lo = r.vec();
                st.scaler.hi = r.vec();
                break;
            case kTagCounters:
                st.counters.seen = r.i64();
                st.counters.accepted = r.i64();
                st.counters.grown = r.i64();
                st.counters.pruned = r.i64();
                st.counters.recalled = r.i64();
                st.counters.numeric_skips = r.i64();
                break;
            case kTagWarmup: {
                const uint64_t n = r.count(8);
                st.warmup_buffer.resize(n);
                for (auto& v : st.warmup_buffer) v = r.vec();
                break;
            }
            case kTagRules:
                st.rules.reserve(n_rules);
                for (uint32_t i = 0; i < n_rules; ++i) st.rules.push_back(read_rule(r));
                break;
            case kTagArchive: {
                const uint64_t n = r.count(8);
                st.archive.cap = static_cast<int>(r.u32());
                st.archive.items.resize(n);
                for (auto& ar : st.archive.items) {
                    ar.rule = read_rule(r);
                    ar.pruned_at = r.i64();
                }
                break;
            }
            default:
                r.skip(len);  // unknown section from a newer minor writer
                break;
        }
        if (r.pos() != body_end) {
            if (r.pos() > body_end) throw SnapshotError("snapshot: section overrun");
            r.seek(body_end);
        }
        seen_mask |= 1u << (tag < 31 ? tag : 31);
    }

    for (uint16_t required : {kTagConfig, kTagQ, kTagGate, kTagZedm, kTagDensity, kTagScaler,
                              kTagCounters, kTagWarmup, kTagRules, kTagArchive})
        if ((seen_mask & (1u << required)) == 0)
            throw SnapshotError("snapshot: missing required section " + std::to_string(required));

    if (st.rules.size() != n_rules) throw SnapshotError("snapshot: rule count mismatch");
    st.config.validate();
    return st;
}

}  // namespace rift
