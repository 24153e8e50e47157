#pragma once

#include "bicm/ldpc.hpp"
#include "bicm/rng.hpp"

namespace bicm {

// Progressive edge-growth construction. Variable nodes are processed in
// ascending target degree; every new edge goes to a check node at maximal
// BFS depth in the subgraph grown so far (unreached checks count as depth
// infinity), ties broken by lowest current check degree, then lowest index.
// Check degrees are capped at ceil(E / n_checks), which keeps the check side
// concentrated. Degree-2 variable nodes are additionally kept from closing
// length-4 cycles among themselves when any other candidate exists.
// The rng only permutes the order of vns within the same degree class.
TannerGraph peg_construct(int n, std::vector<int> vn_degrees, int n_checks, Rng& rng);

// Shortest cycle length in the bipartite graph (0 if acyclic).
int girth(const TannerGraph& g);

}  // namespace bicm
