#pragma once

// Seeded Rayleigh-fading channel generation over the fixed two-hop geometry.
// All randomness is derived from (seed, trial, link) through splitmix64 so
// realizations are reproducible bit-for-bit across runs and platforms.

#include <Eigen/Dense>
#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "wprelay/common.hpp"
#include "wprelay/model.hpp"

namespace wprelay {

struct Geometry {
    std::vector<double> d_sr;        // source-to-relay distance [m], size K
    std::vector<double> d_rd;        // relay-to-destination distance [m], size K
    double ple = 3.5;                // path-loss exponent
    double reference_gain_db = 0.0;  // gain applied on top of d^-ple at 1 m

    static Geometry uniform(int k_pairs, double src_dist, double dst_dist, double ple,
                            double reference_gain_db = 0.0) {
        Geometry g;
        g.d_sr.assign(k_pairs, src_dist);
        g.d_rd.assign(k_pairs, dst_dist);
        g.ple = ple;
        g.reference_gain_db = reference_gain_db;
        return g;
    }
};

/// Power-law attenuation d^(-ple) scaled by the reference gain.
inline double pathloss(double d, double ple, double reference_gain_db = 0.0) {
    if (d <= 0.0) throw invalid_input("pathloss: distance must be > 0");
    return db_to_linear(reference_gain_db) * std::pow(d, -ple);
}

namespace rng {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Substream key for one link of one trial.
inline std::uint64_t substream(std::uint64_t seed, std::uint64_t trial,
                               std::uint64_t link) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= 0xd1342543de82ef95ULL * (trial + 1);
    (void)splitmix64(s);
    s ^= 0xaf251af3b0f025b5ULL * (link + 1);
    return splitmix64(s);
}

/// Deterministic stream of doubles in (0,1) and normals (Box-Muller),
/// independent of standard-library distribution internals.
class Stream {
public:
    explicit Stream(std::uint64_t key) : state_(key) {}

    double uniform() {
        // 53-bit mantissa, strictly inside (0,1).
        const std::uint64_t bits = splitmix64(state_) >> 11;
        return (static_cast<double>(bits) + 0.5) * (1.0 / 9007199254740992.0);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double phi = 2.0 * M_PI * u2;
        spare_ = r * std::sin(phi);
        have_spare_ = true;
        return r * std::cos(phi);
    }

private:
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rng

/// i.i.d. circularly-symmetric complex Gaussian vector with per-entry
/// variance `variance`; expected squared norm is n * variance.
inline Eigen::VectorXcd sample_channel(rng::Stream& stream, int n, double variance) {
    if (n < 1) throw invalid_input("sample_channel: n must be >= 1");
    Eigen::VectorXcd h(n);
    const double scale = std::sqrt(variance / 2.0);
    for (int i = 0; i < n; ++i) {
        const double re = stream.normal();
        const double im = stream.normal();
        h[i] = std::complex<double>(scale * re, scale * im);
    }
    return h;
}

/// Draws all 2K links for one trial and re-indexes the pairs so uplink
/// gains ascend. A pair's downlink moves together with its uplink.
inline ChannelSet generate(std::uint64_t seed, std::uint64_t trial, const Geometry& geom,
                           const SystemParams& params) {
    const int k_pairs = params.num_pairs;
    const int n = params.num_antennas;
    if (static_cast<int>(geom.d_sr.size()) != k_pairs ||
        static_cast<int>(geom.d_rd.size()) != k_pairs)
        throw invalid_input("generate: geometry must be sized K");

    std::vector<Eigen::VectorXcd> h(k_pairs);
    std::vector<Eigen::RowVectorXcd> g(k_pairs);
    for (int k = 0; k < k_pairs; ++k) {
        rng::Stream up(rng::substream(seed, trial, 2 * k));
        rng::Stream down(rng::substream(seed, trial, 2 * k + 1));
        h[k] = sample_channel(up, n, pathloss(geom.d_sr[k], geom.ple, geom.reference_gain_db));
        g[k] = sample_channel(down, n, pathloss(geom.d_rd[k], geom.ple, geom.reference_gain_db))
                   .transpose();
    }

    std::vector<int> order(k_pairs);
    std::iota(order.begin(), order.end(), 0);
    // Stable sort by gain; original index breaks ties.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return h[a].squaredNorm() < h[b].squaredNorm();
    });

    ChannelSet out;
    out.uplink.reserve(k_pairs);
    out.downlink.reserve(k_pairs);
    out.gain.reserve(k_pairs);
    for (int idx : order) {
        out.uplink.push_back(h[idx]);
        out.downlink.push_back(g[idx]);
        out.gain.push_back(h[idx].squaredNorm());
    }
    return out;
}

}  // namespace wprelay
