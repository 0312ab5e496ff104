// Small Monte Carlo bookkeeping shared by the bare and resummed samplers:
// estimate records, matrix-valued accumulators, and a deterministic
// chunk-parallel driver. Chunks are fixed-size regardless of thread count,
// each owns a keyed random stream, and partial sums are merged in chunk
// order, so results are bit-identical for any --threads value.

#pragma once

#include <atomic>
#include <thread>
#include <vector>

#include "sbdyn/mat2.hpp"

namespace sbdyn::mc {

struct MCEstimate {
    cplx mean{};
    double std_error = 0.0;  // sqrt(E|X|^2 - |EX|^2) / sqrt(n)
    long long samples = 0;
};

// sum of X and of |X|^2, entrywise
struct MatAccumulator {
    Mat2 sum{};
    double abs2_00 = 0.0, abs2_01 = 0.0, abs2_10 = 0.0, abs2_11 = 0.0;
    long long count = 0;

    void add(const Mat2& x) {
        sum += x;
        abs2_00 += std::norm(x.a00);
        abs2_01 += std::norm(x.a01);
        abs2_10 += std::norm(x.a10);
        abs2_11 += std::norm(x.a11);
        ++count;
    }
    void merge(const MatAccumulator& o) {
        sum += o.sum;
        abs2_00 += o.abs2_00;
        abs2_01 += o.abs2_01;
        abs2_10 += o.abs2_10;
        abs2_11 += o.abs2_11;
        count += o.count;
    }
    Mat2 mean() const { return sum * cplx(1.0 / static_cast<double>(count)); }
    // sum over entries of Var(mean estimator entry)
    double mean_variance() const {
        auto n = static_cast<double>(count);
        Mat2 m = mean();
        double v = (abs2_00 / n - std::norm(m.a00)) + (abs2_01 / n - std::norm(m.a01)) +
                   (abs2_10 / n - std::norm(m.a10)) + (abs2_11 / n - std::norm(m.a11));
        return std::max(v, 0.0) / n;
    }
};

struct ScalarAccumulator {
    cplx sum{};
    double abs2 = 0.0;
    long long count = 0;

    void add(cplx x) {
        sum += x;
        abs2 += std::norm(x);
        ++count;
    }
    void merge(const ScalarAccumulator& o) {
        sum += o.sum;
        abs2 += o.abs2;
        count += o.count;
    }
    cplx mean() const { return sum / static_cast<double>(count); }
    double sample_variance() const {
        auto n = static_cast<double>(count);
        return std::max(abs2 / n - std::norm(mean()), 0.0);
    }
};

constexpr long long kChunkSamples = 8192;

inline int chunk_count(long long samples) {
    return static_cast<int>((samples + kChunkSamples - 1) / kChunkSamples);
}

inline long long chunk_begin(int chunk) { return chunk * kChunkSamples; }
inline long long chunk_end(int chunk, long long samples) {
    return std::min<long long>((chunk + 1) * kChunkSamples, samples);
}

// fn(chunk_index) for every chunk, on up to `threads` workers
template <typename Fn>
void run_chunks(int n_chunks, int threads, Fn&& fn) {
    if (threads <= 1 || n_chunks <= 1) {
        for (int c = 0; c < n_chunks; ++c) fn(c);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            int c = next.fetch_add(1);
            if (c >= n_chunks) return;
            fn(c);
        }
    };
    int n_workers = std::min(threads, n_chunks);
    std::vector<std::thread> pool;
    pool.reserve(n_workers - 1);
    for (int i = 1; i < n_workers; ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

}  // namespace sbdyn::mc
