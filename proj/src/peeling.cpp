#include "cransim/peeling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace cransim {

PeelResult peel(const ParityCheckMatrix& H, const ReceivedWord& word) {
  if (static_cast<int>(word.symbols.size()) != H.n) {
    throw std::invalid_argument("received word length does not match the code length");
  }
  PeelResult res;
  res.decoded = word.symbols;
  int erased = static_cast<int>(std::count(res.decoded.begin(), res.decoded.end(), Symbol::erased));

  while (erased > 0) {
    // Flooding schedule: find all solvable checks against the current state,
    // then apply the corrections together.
    std::vector<std::pair<int, Symbol>> fixes;
    for (const auto& row : H.rows) {
      int erased_pos = -1;
      int erased_count = 0;
      int parity = 0;
      for (int col : row) {
        const Symbol s = res.decoded[col];
        if (s == Symbol::erased) {
          ++erased_count;
          if (erased_count > 1) break;
          erased_pos = col;
        } else if (s == Symbol::one) {
          parity ^= 1;
        }
      }
      if (erased_count == 1) {
        fixes.emplace_back(erased_pos, parity ? Symbol::one : Symbol::zero);
      }
    }
    if (fixes.empty()) break;
    for (const auto& [col, value] : fixes) {
      if (res.decoded[col] == Symbol::erased) {
        res.decoded[col] = value;
        --erased;
      }
    }
    ++res.passes;
  }
  res.success = erased == 0;
  return res;
}

ParityCheckMatrix sample_graph(const DegreeDistribution& dist, int n, rng::Prng& rng) {
  if (n < 2) throw std::invalid_argument("sample_graph: n too small");

  // Node counts per degree by largest-remainder apportionment of the
  // edge-perspective fractions (node fraction of degree i ~ lambda_i / i).
  struct DegCount {
    int degree;
    double exact;
    int count;
  };
  auto apportion = [](std::vector<DegCount>& items, int total) {
    int assigned = 0;
    for (auto& it : items) {
      it.count = static_cast<int>(it.exact);
      assigned += it.count;
    }
    std::vector<std::size_t> order(items.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return items[a].exact - std::floor(items[a].exact) >
             items[b].exact - std::floor(items[b].exact);
    });
    for (std::size_t i = 0; assigned < total; ++i) {
      items[order[i % order.size()]].count += 1;
      ++assigned;
    }
    while (assigned > total) {
      for (auto& it : items) {
        if (assigned == total) break;
        if (it.count > 0) {
          it.count -= 1;
          --assigned;
        }
      }
    }
  };

  const double edges_exact = n / dist.lambda_integral();
  std::vector<DegCount> var_nodes;
  for (const auto& [deg, frac] : dist.lambda()) {
    var_nodes.push_back({deg, edges_exact * frac / deg, 0});
  }
  apportion(var_nodes, n);
  long var_sockets = 0;
  for (const auto& it : var_nodes) var_sockets += static_cast<long>(it.degree) * it.count;

  // Check side must consume exactly var_sockets edge sockets.
  std::vector<DegCount> check_nodes;
  if (auto dc = dist.check_degree()) {
    if (var_sockets % *dc != 0) {
      // Re-degree a few variable nodes until the socket count divides d_c.
      // BFS over socket-count residues using the available single-node moves
      // finds the shortest move sequence (at most d_c - 1 moves).
      const int mod = *dc;
      struct Step {
        int from, to;  // indices into var_nodes
      };
      const int start_res = static_cast<int>(var_sockets % mod);
      std::vector<int> prev_res(mod, -1);
      std::vector<Step> prev_step(mod, {-1, -1});
      std::vector<int> queue{start_res};
      prev_res[start_res] = start_res;
      for (std::size_t q = 0; q < queue.size() && prev_res[0] < 0; ++q) {
        const int r = queue[q];
        for (std::size_t f = 0; f < var_nodes.size(); ++f) {
          for (std::size_t t = 0; t < var_nodes.size(); ++t) {
            if (f == t || var_nodes[f].count == 0) continue;
            const int nr = static_cast<int>(
                ((r + var_nodes[t].degree - var_nodes[f].degree) % mod + mod) % mod);
            if (prev_res[nr] < 0) {
              prev_res[nr] = r;
              prev_step[nr] = {static_cast<int>(f), static_cast<int>(t)};
              queue.push_back(nr);
            }
          }
        }
      }
      if (prev_res[0] < 0) {
        throw std::runtime_error("sample_graph: cannot balance socket counts for d_c");
      }
      for (int r = 0; r != start_res; r = prev_res[r]) {
        const Step s = prev_step[r];
        if (var_nodes[s.from].count == 0) {
          throw std::runtime_error("sample_graph: cannot balance socket counts for d_c");
        }
        var_nodes[s.from].count -= 1;
        var_nodes[s.to].count += 1;
        var_sockets += var_nodes[s.to].degree - var_nodes[s.from].degree;
      }
      if (var_sockets % mod != 0) {
        throw std::runtime_error("sample_graph: cannot balance socket counts for d_c");
      }
    }
    check_nodes.push_back({*dc, 0.0, static_cast<int>(var_sockets / *dc)});
  } else {
    const double check_edges = static_cast<double>(var_sockets);
    for (const auto& [deg, frac] : dist.rho()) {
      check_nodes.push_back({deg, check_edges * frac / deg, 0});
    }
    // Apportion check nodes, then repair any socket mismatch by bumping
    // counts of the largest degree present.
    int total_checks = 0;
    for (const auto& it : check_nodes) total_checks += static_cast<int>(std::lround(it.exact));
    apportion(check_nodes, total_checks);
    long check_sockets = 0;
    for (const auto& it : check_nodes) check_sockets += static_cast<long>(it.degree) * it.count;
    int guard = 0;
    while (check_sockets != var_sockets) {
      if (++guard > 4 * static_cast<int>(check_nodes.size()) + 16) {
        throw std::runtime_error("sample_graph: cannot balance socket counts");
      }
      long diff = var_sockets - check_sockets;
      bool moved = false;
      for (auto& it : check_nodes) {
        if (diff > 0 && diff >= it.degree) {
          it.count += 1;
          check_sockets += it.degree;
          moved = true;
          break;
        }
        if (diff < 0 && it.count > 0 && -diff >= it.degree) {
          it.count -= 1;
          check_sockets -= it.degree;
          moved = true;
          break;
        }
      }
      if (!moved) {
        // Residual smaller than any degree: swap one node between two degrees
        // whose difference matches.
        for (auto& a : check_nodes) {
          for (auto& b : check_nodes) {
            if (a.count > 0 && b.degree - a.degree == diff) {
              a.count -= 1;
              b.count += 1;
              check_sockets += diff;
              moved = true;
              break;
            }
          }
          if (moved) break;
        }
        if (!moved) throw std::runtime_error("sample_graph: cannot balance socket counts");
      }
    }
  }

  // Socket lists.
  std::vector<int> vsock;
  vsock.reserve(var_sockets);
  {
    int node = 0;
    for (const auto& it : var_nodes) {
      for (int c = 0; c < it.count; ++c, ++node) {
        for (int s = 0; s < it.degree; ++s) vsock.push_back(node);
      }
    }
  }
  std::vector<int> csock;
  csock.reserve(var_sockets);
  int n_checks = 0;
  {
    for (const auto& it : check_nodes) {
      for (int c = 0; c < it.count; ++c, ++n_checks) {
        for (int s = 0; s < it.degree; ++s) csock.push_back(n_checks);
      }
    }
  }

  // Fisher-Yates on the variable sockets pairs them with the check sockets.
  for (std::size_t i = vsock.size(); i > 1; --i) {
    std::swap(vsock[i - 1], vsock[rng.uniform_index(i)]);
  }

  // Duplicate-edge removal: re-pair offending sockets with random partners.
  auto is_dup = [&](std::size_t t, std::set<std::pair<int, int>>& seen) {
    return !seen.insert({csock[t], vsock[t]}).second;
  };
  for (int pass = 0; pass < 20; ++pass) {
    std::set<std::pair<int, int>> seen;
    std::vector<std::size_t> dups;
    for (std::size_t t = 0; t < vsock.size(); ++t) {
      if (is_dup(t, seen)) dups.push_back(t);
    }
    if (dups.empty()) break;
    for (std::size_t t : dups) {
      std::swap(vsock[t], vsock[rng.uniform_index(vsock.size())]);
    }
  }

  ParityCheckMatrix H;
  H.n = n;
  H.rows.assign(n_checks, {});
  for (std::size_t t = 0; t < vsock.size(); ++t) {
    H.rows[csock[t]].push_back(vsock[t]);
  }
  for (auto& row : H.rows) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());  // residual duplicates
  }
  return H;
}

PeelTrial peel_mc_trial(const DegreeDistribution& dist, int n, double eps0, std::uint64_t seed) {
  rng::Prng rng(seed);
  ParityCheckMatrix H = sample_graph(dist, n, rng);
  ReceivedWord word;
  word.symbols.assign(n, Symbol::zero);
  for (auto& s : word.symbols) {
    if (rng.bernoulli(eps0)) s = Symbol::erased;
  }
  PeelResult res = peel(H, word);
  return {res.success, res.passes};
}

}  // namespace cransim
