#pragma once

#include <cstdint>
#include <vector>

#include "cransim/ensemble.hpp"
#include "cransim/rng.hpp"

namespace cransim {

// Sparse parity-check matrix: one sorted set of participating column indices
// per check row.
struct ParityCheckMatrix {
  std::vector<std::vector<int>> rows;
  int n = 0;

  int k() const { return n - static_cast<int>(rows.size()); }
};

enum class Symbol : std::uint8_t { zero, one, erased };

struct ReceivedWord {
  std::vector<Symbol> symbols;
};

struct PeelResult {
  std::vector<Symbol> decoded;
  int passes = 0;  // full check sweeps that applied at least one correction
  bool success = false;
};

// Erasure peeling with a flooding schedule: every pass solves each check that
// has exactly one erased participant; corrections are applied between passes.
// Stops when no erasures remain (success) or a pass makes no progress.
// Never alters a non-erased received symbol.
PeelResult peel(const ParityCheckMatrix& H, const ReceivedWord& word);

// Configuration-model realization of the ensemble at block length n: node
// counts apportioned from the edge fractions, sockets paired by a random
// permutation, duplicate edges removed by re-pairing passes (residual
// duplicates collapse to a single entry).
ParityCheckMatrix sample_graph(const DegreeDistribution& dist, int n, rng::Prng& rng);

struct PeelTrial {
  bool success;
  int passes;
};

// One Monte Carlo trial: fresh graph, all-zero codeword, i.i.d. erasures at
// rate eps0, then peel.
PeelTrial peel_mc_trial(const DegreeDistribution& dist, int n, double eps0, std::uint64_t seed);

}  // namespace cransim
