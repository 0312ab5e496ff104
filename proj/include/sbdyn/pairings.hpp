// Perfect matchings ("pairings") of ordered contour-time indices, their
// linked-component structure, and the connected families used by the
// resummed diagram sums. Times never appear here: the definitions depend
// only on the order of the points, so everything works on indices 0..m-1.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sbdyn/rng.hpp"

namespace sbdyn::pairings {

using IndexPair = std::pair<int, int>;  // (a, b) with a < b

struct Pairing {
    std::vector<IndexPair> pairs;

    bool operator==(const Pairing&) const = default;
};

struct PairingFamily {
    int points = 0;
    std::vector<Pairing> members;
};

// All perfect matchings on {0,...,m-1}; m even, count (m-1)!!.
// Deterministic order: recurse on the smallest unmatched index, partners
// ascending.
PairingFamily enumerate_pairings(int m);

// Interleaving test: true iff one pair starts inside the other and ends
// outside it. Nested or disjoint pairs are not linked.
bool pairs_linked(const IndexPair& p, const IndexPair& q);

// Connected components of the graph on pairs with pairs_linked edges.
// Components come out ordered by their smallest index.
std::vector<Pairing> linked_components(const Pairing& q);

// True iff every linked component contains an index >= split.
bool is_inchworm_proper(const Pairing& q, int split);

// Matchings on {0,...,total_points-1} whose link graph is connected.
PairingFamily enumerate_connected(int total_points);

// Number of connected matchings on m+1 points (m odd: m interior points plus
// the head), by the recurrence N_1 = 1, N_m = (m-1)/2 * sum_j N_j N_{m-1-j}.
long long count_connected(int m);

// Uniform sampling from the connected family on m+1 points. Families up to
// the cap are enumerated once at construction; afterwards sampling is a
// single random index, safe for concurrent use.
class ConnectedSampler {
  public:
    explicit ConnectedSampler(int cap = 9);

    int cap() const { return cap_; }
    const PairingFamily& family(int m) const;  // m odd, <= cap
    const Pairing& sample(RngStream& rng, int m) const;

  private:
    int cap_;
    std::vector<PairingFamily> families_;  // indexed by m
};

}  // namespace sbdyn::pairings
