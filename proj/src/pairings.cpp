#include "sbdyn/pairings.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sbdyn::pairings {

namespace {

void enumerate_rec(std::vector<int>& unmatched, Pairing& current,
                   std::vector<Pairing>& out) {
    if (unmatched.empty()) {
        out.push_back(current);
        return;
    }
    int first = unmatched.front();
    for (std::size_t i = 1; i < unmatched.size(); ++i) {
        int partner = unmatched[i];
        std::vector<int> rest;
        rest.reserve(unmatched.size() - 2);
        for (std::size_t j = 1; j < unmatched.size(); ++j)
            if (j != i) rest.push_back(unmatched[j]);
        current.pairs.emplace_back(first, partner);
        enumerate_rec(rest, current, out);
        current.pairs.pop_back();
    }
}

}  // namespace

PairingFamily enumerate_pairings(int m) {
    if (m < 0 || m % 2 != 0)
        throw std::invalid_argument("enumerate_pairings: point count must be even, got " +
                                    std::to_string(m));
    if (m > 16)
        throw std::invalid_argument("enumerate_pairings: enumeration is factorial, capped at 16 points");
    PairingFamily family;
    family.points = m;
    if (m == 0) {
        family.members.push_back(Pairing{});  // the empty product
        return family;
    }
    std::vector<int> indices(m);
    for (int i = 0; i < m; ++i) indices[i] = i;
    Pairing current;
    enumerate_rec(indices, current, family.members);
    return family;
}

bool pairs_linked(const IndexPair& p, const IndexPair& q) {
    // p starts inside q and ends outside, or vice versa; ties cannot occur
    // for distinct indices
    return (p.first <= q.first && q.first <= p.second && p.second <= q.second) ||
           (q.first <= p.first && p.first <= q.second && q.second <= p.second);
}

std::vector<Pairing> linked_components(const Pairing& q) {
    int n = static_cast<int>(q.pairs.size());
    std::vector<int> component(n, -1);
    int n_components = 0;
    for (int seed = 0; seed < n; ++seed) {
        if (component[seed] >= 0) continue;
        int label = n_components++;
        std::vector<int> stack{seed};
        component[seed] = label;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w = 0; w < n; ++w) {
                if (component[w] < 0 && pairs_linked(q.pairs[v], q.pairs[w])) {
                    component[w] = label;
                    stack.push_back(w);
                }
            }
        }
    }
    std::vector<Pairing> blocks(n_components);
    for (int v = 0; v < n; ++v) blocks[component[v]].pairs.push_back(q.pairs[v]);
    return blocks;
}

bool is_inchworm_proper(const Pairing& q, int split) {
    for (const auto& block : linked_components(q)) {
        bool reaches = false;
        for (const auto& [a, b] : block.pairs)
            if (a >= split || b >= split) {
                reaches = true;
                break;
            }
        if (!reaches) return false;
    }
    return true;
}

PairingFamily enumerate_connected(int total_points) {
    PairingFamily all = enumerate_pairings(total_points);
    PairingFamily connected;
    connected.points = total_points;
    for (auto& member : all.members)
        if (linked_components(member).size() == 1) connected.members.push_back(std::move(member));
    return connected;
}

long long count_connected(int m) {
    if (m < 1 || m % 2 == 0)
        throw std::invalid_argument("count_connected: order must be odd, got " + std::to_string(m));
    std::vector<long long> n(m + 1, 0);
    n[1] = 1;
    for (int k = 3; k <= m; k += 2) {
        long long sum = 0;
        for (int j = 1; j <= k - 2; j += 2) sum += n[j] * n[k - 1 - j];
        n[k] = (k - 1) / 2 * sum;
    }
    return n[m];
}

ConnectedSampler::ConnectedSampler(int cap) : cap_(cap), families_(cap + 1) {
    if (cap < 1 || cap % 2 == 0)
        throw std::invalid_argument("ConnectedSampler: cap must be odd and >= 1");
    for (int m = 1; m <= cap; m += 2) families_[m] = enumerate_connected(m + 1);
}

const PairingFamily& ConnectedSampler::family(int m) const {
    if (m < 1 || m > cap_ || m % 2 == 0)
        throw std::invalid_argument("ConnectedSampler: unsupported order " + std::to_string(m) +
                                    " (cap " + std::to_string(cap_) + ")");
    return families_[m];
}

const Pairing& ConnectedSampler::sample(RngStream& rng, int m) const {
    const PairingFamily& fam = family(m);
    if (fam.members.size() == 1) return fam.members.front();
    return fam.members[rng.below(fam.members.size())];
}

}  // namespace sbdyn::pairings
