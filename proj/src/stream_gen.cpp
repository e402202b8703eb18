#include <algorithm>
#include <fstream>

#include "rift/rng.hpp"
#include "rift/stream.hpp"

namespace rift {
namespace stream {

namespace {

// Local linear targets whose slopes oppose each other across regimes, so
// no single affine map explains the stream even through the regime means.
struct LinearMap {
    Vec slope;
    double intercept = 0.0;

    double apply(const Vec& x) const {
        double y = intercept;
        for (size_t j = 0; j < x.size(); ++j) y += slope[j] * x[j];
        return y;
    }
};

Vec cluster_center(int cluster, int p) {
    Vec c(static_cast<size_t>(p), 0.0);
    switch (cluster) {
        case 0:
            for (int j = 0; j < p; ++j) c[static_cast<size_t>(j)] = -5.0;
            break;
        case 1:
            for (int j = 0; j < p; ++j) c[static_cast<size_t>(j)] = 5.0 * ((j % 2 == 0) ? 1.0 : -1.0);
            break;
        default:
            for (int j = 0; j < p; ++j) c[static_cast<size_t>(j)] = 5.0 * ((j % 2 == 0) ? -1.0 : 1.0) + 10.0 * (j == 0);
            break;
    }
    return c;
}

LinearMap map_for_regime(int regime, int p) {
    LinearMap m;
    m.slope.resize(static_cast<size_t>(p));
    double level = 0.0;
    switch (regime) {
        case 0:
            for (int j = 0; j < p; ++j) m.slope[static_cast<size_t>(j)] = (j % 2 == 0) ? 2.0 : 0.0;
            level = 0.0;
            break;
        case 1:
            for (int j = 0; j < p; ++j) m.slope[static_cast<size_t>(j)] = (j % 2 == 0) ? 0.0 : -2.0;
            level = 1.0;
            break;
        default:
            for (int j = 0; j < p; ++j) m.slope[static_cast<size_t>(j)] = (j % 2 == 0) ? -1.5 : 1.5;
            level = -1.0;
            break;
    }
    // Pin the target level at the regime's home cluster.
    m.intercept = level - m.apply(cluster_center(regime, p));
    return m;
}

Vec sample_around(Rng& rng, const Vec& center, double spread) {
    Vec x(center.size());
    for (size_t j = 0; j < center.size(); ++j) x[j] = center[j] + spread * rng.normal();
    return x;
}

}  // namespace

GeneratedStream gen_stream(const GenOptions& opt) {
    if (opt.n < 1) throw ConfigError("gen: n must be >= 1");
    if (opt.dims < 1) throw ConfigError("gen: dims must be >= 1");
    const int p = opt.dims;
    Rng rng(opt.seed);

    GeneratedStream s;
    for (int j = 1; j <= p; ++j) s.columns.push_back("x" + std::to_string(j));
    s.columns.push_back("y");
    s.rows.reserve(static_cast<size_t>(opt.n));
    s.regimes.reserve(static_cast<size_t>(opt.n));

    auto push = [&](const Vec& x, double y, const std::string& regime) {
        Vec row(x);
        row.push_back(y);
        s.rows.push_back(std::move(row));
        s.regimes.push_back(regime);
    };

    switch (opt.kind) {
        case StreamKind::kClusters: {
            // Three stationary clusters, each with its own linear map.
            for (int64_t i = 0; i < opt.n; ++i) {
                const int c = static_cast<int>(rng.index(3));
                const Vec x = sample_around(rng, cluster_center(c, p), 0.8);
                const double y = map_for_regime(c, p).apply(x) + opt.noise * rng.normal();
                push(x, y, "cluster" + std::to_string(c));
            }
            break;
        }
        case StreamKind::kPiecewiseLinear: {
            // Inputs uniform on [0,1]^p; target piecewise linear in x1 with
            // three segments of very different slope.
            for (int64_t i = 0; i < opt.n; ++i) {
                Vec x(static_cast<size_t>(p));
                for (int j = 0; j < p; ++j) x[static_cast<size_t>(j)] = rng.uniform();
                const double v = x[0];
                double y;
                int seg;
                if (v < 1.0 / 3.0) {
                    y = 6.0 * v;
                    seg = 0;
                } else if (v < 2.0 / 3.0) {
                    y = 2.0 - 9.0 * (v - 1.0 / 3.0);
                    seg = 1;
                } else {
                    y = -1.0 + 3.0 * (v - 2.0 / 3.0);
                    seg = 2;
                }
                for (int j = 1; j < p; ++j) y += 0.5 * x[static_cast<size_t>(j)];
                y += opt.noise * rng.normal();
                push(x, y, "segment" + std::to_string(seg));
            }
            break;
        }
        case StreamKind::kGradualDrift:
        case StreamKind::kAbruptDrift: {
            // Two regression maps over a shared uniform input domain; the
            // coefficients either slide linearly or switch at the midpoint.
            LinearMap a, b;
            a.slope.resize(static_cast<size_t>(p));
            b.slope.resize(static_cast<size_t>(p));
            for (int j = 0; j < p; ++j) {
                a.slope[static_cast<size_t>(j)] = (j % 2 == 0) ? 2.0 : 0.0;
                b.slope[static_cast<size_t>(j)] = (j % 2 == 0) ? 0.0 : -2.0;
            }
            a.intercept = 0.0;
            b.intercept = 1.0;
            const bool gradual = (opt.kind == StreamKind::kGradualDrift);
            for (int64_t i = 0; i < opt.n; ++i) {
                Vec x(static_cast<size_t>(p));
                for (int j = 0; j < p; ++j) x[static_cast<size_t>(j)] = rng.uniform(-1.0, 1.0);
                double y;
                std::string regime;
                if (gradual) {
                    const double mix =
                        opt.n > 1 ? static_cast<double>(i) / static_cast<double>(opt.n - 1) : 0.0;
                    y = (1.0 - mix) * a.apply(x) + mix * b.apply(x);
                    regime = "drift";
                } else {
                    const bool first = i < opt.n / 2;
                    y = (first ? a : b).apply(x);
                    regime = first ? "A" : "B";
                }
                push(x, y + opt.noise * rng.normal(), regime);
            }
            break;
        }
        case StreamKind::kCyclicAba: {
            // Regime A works two set-points, regime B a third one; the
            // stream visits A, then B, then A again in equal thirds. The B
            // map is deliberately mild so it stays tame outside its home
            // region.
            // A's set-points sit at opposite corners so the first phase
            // already spans the full range of every dimension; B then
            // arrives inside known bounds and the scaling stays put.
            Vec center_a1(static_cast<size_t>(p)), center_a2(static_cast<size_t>(p)),
                center_b(static_cast<size_t>(p));
            for (int j = 0; j < p; ++j) {
                center_a1[static_cast<size_t>(j)] = -5.0;
                center_a2[static_cast<size_t>(j)] = 5.0;
                center_b[static_cast<size_t>(j)] = (p == 1) ? 0.0 : ((j % 2 == 0) ? 5.0 : -5.0);
            }
            LinearMap map_a;
            map_a.slope.resize(static_cast<size_t>(p));
            for (int j = 0; j < p; ++j)
                map_a.slope[static_cast<size_t>(j)] = (j % 2 == 0) ? 1.5 : -1.0;
            map_a.intercept = 2.5 - map_a.apply(center_a1);
            LinearMap map_b;
            map_b.slope.resize(static_cast<size_t>(p));
            for (int j = 0; j < p; ++j) map_b.slope[static_cast<size_t>(j)] = 0.05;
            map_b.intercept = 0.3 - map_b.apply(center_b);
            for (int64_t i = 0; i < opt.n; ++i) {
                const int third = static_cast<int>(3 * i / opt.n);
                const bool is_a = (third != 1);
                const Vec& center =
                    is_a ? (rng.uniform() < 0.5 ? center_a1 : center_a2) : center_b;
                const Vec x = sample_around(rng, center, 0.8);
                const double y =
                    (is_a ? map_a : map_b).apply(x) + opt.noise * rng.normal();
                push(x, y, is_a ? "A" : "B");
            }
            break;
        }
        case StreamKind::kRedundantDuplicates: {
            // First fifth of the stream is unique readings around one
            // operating point; the rest replays those rows verbatim.
            const int64_t uniques = std::max<int64_t>(1, opt.n / 5);
            const LinearMap map = map_for_regime(0, p);
            for (int64_t i = 0; i < opt.n; ++i) {
                if (i < uniques) {
                    Vec x(static_cast<size_t>(p));
                    for (int j = 0; j < p; ++j) x[static_cast<size_t>(j)] = rng.uniform(-5.0, 5.0);
                    const double y = map.apply(x) + opt.noise * rng.normal();
                    push(x, y, "unique");
                } else {
                    const Vec& src = s.rows[static_cast<size_t>((i - uniques) % uniques)];
                    s.rows.push_back(src);
                    s.regimes.push_back("dup");
                }
            }
            break;
        }
    }
    return s;
}

void write_stream_csv(const GeneratedStream& s, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path);
    for (size_t j = 0; j < s.columns.size(); ++j) {
        if (j) out << ',';
        out << s.columns[j];
    }
    out << '\n';
    for (const Vec& row : s.rows) {
        for (size_t j = 0; j < row.size(); ++j) {
            if (j) out << ',';
            out << format_double(row[j]);
        }
        out << '\n';
    }
    if (!out) throw DataError("write failed: " + path);

    std::ofstream reg(path + ".regimes.csv", std::ios::binary);
    if (!reg) throw DataError("cannot write " + path + ".regimes.csv");
    reg << "index,regime\n";
    for (size_t i = 0; i < s.regimes.size(); ++i) reg << i << ',' << s.regimes[i] << '\n';
    if (!reg) throw DataError("write failed: " + path + ".regimes.csv");
}

}  // namespace stream
}  // namespace rift
