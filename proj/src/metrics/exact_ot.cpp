// Copyright 2026 The dpiw Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense transportation simplex. Costs are arbitrary nonnegative reals;
// supplies and demands are balanced and slightly perturbed to keep every
// basis nondegenerate, which rules out cycling.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "dpiw/core/error.hpp"
#include "dpiw/metrics/metrics.hpp"

namespace dpiw::metrics {

namespace {

struct BasicCell {
  std::uint32_t row;
  std::uint32_t col;
  double flow;
};

class TransportSimplex {
 public:
  TransportSimplex(std::vector<double> cost, std::vector<double> supply,
                   std::vector<double> demand)
      : cost_(std::move(cost)),
        supply_(std::move(supply)),
        demand_(std::move(demand)),
        m_(supply_.size()),
        n_(demand_.size()) {
    balance_and_perturb();
    northwest_corner();
  }

  double solve() {
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    const std::size_t max_pivots = 400 * (m_ + n_) + 20000;
    for (std::size_t pivot = 0; pivot < max_pivots; ++pivot) {
      compute_duals();
      const auto [best_rc, er, ec] = find_entering();
      if (best_rc >= -1e-12) return objective();
      pivot_in(er, ec);
    }
    throw NonConvergenceError("transport simplex exceeded its pivot budget", 0.0);
  }

 private:
  void balance_and_perturb() {
    double total_supply = 0.0, total_demand = 0.0;
    for (double s : supply_) total_supply += s;
    for (double d : demand_) total_demand += d;
    if (!(total_supply > 0.0) || !(total_demand > 0.0))
      throw InputError("transport masses must be positive");
    for (double& s : supply_) s /= total_supply;
    for (double& d : demand_) d /= total_demand;

    // Strictly increasing perturbation of the supplies, absorbed by the
    // last demand, keeps all basic flows positive (nondegenerate pivots).
    const double eps = 1e-13;
    double added = 0.0;
    for (std::size_t i = 0; i < m_; ++i) {
      const double bump = eps * static_cast<double>(i + 1);
      supply_[i] += bump;
      added += bump;
    }
    demand_[n_ - 1] += added;
  }

  void northwest_corner() {
    basis_.reserve(m_ + n_ - 1);
    cell_index_.assign(m_ * n_, -1);
    std::vector<double> s = supply_;
    std::vector<double> d = demand_;
    std::size_t i = 0, j = 0;
    while (i < m_ && j < n_) {
      const double f = std::min(s[i], d[j]);
      add_basic(i, j, f);
      s[i] -= f;
      d[j] -= f;
      if (i + 1 == m_ && j + 1 == n_) break;
      if (s[i] <= d[j])
        ++i;
      else
        ++j;
    }
  }

  void add_basic(std::size_t i, std::size_t j, double flow) {
    cell_index_[i * n_ + j] = static_cast<long>(basis_.size());
    basis_.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j), flow});
  }

  // Tree solve for the duals: u_r + v_c = cost(r, c) on basic cells.
  void compute_duals() {
    row_cells_.assign(m_, {});
    col_cells_.assign(n_, {});
    for (std::size_t k = 0; k < basis_.size(); ++k) {
      row_cells_[basis_[k].row].push_back(k);
      col_cells_[basis_[k].col].push_back(k);
    }
    std::vector<char> row_done(m_, 0), col_done(n_, 0);
    std::vector<std::size_t> stack;
    u_[0] = 0.0;
    row_done[0] = 1;
    stack.push_back(0);  // encoded: row r -> r, col c -> m_ + c
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node < m_) {
        for (std::size_t k : row_cells_[node]) {
          const auto c = basis_[k].col;
          if (!col_done[c]) {
            v_[c] = cost_[node * n_ + c] - u_[node];
            col_done[c] = 1;
            stack.push_back(m_ + c);
          }
        }
      } else {
        const std::size_t c = node - m_;
        for (std::size_t k : col_cells_[c]) {
          const auto r = basis_[k].row;
          if (!row_done[r]) {
            u_[r] = cost_[r * n_ + c] - v_[c];
            row_done[r] = 1;
            stack.push_back(r);
          }
        }
      }
    }
  }

  // Block pricing: scan rows in rotation and enter the most negative
  // reduced cost seen within the first block that has one. Optimality is
  // only declared after a clean full sweep; nondegenerate flows (the mass
  // perturbation) rule out cycling under any pricing order.
  std::tuple<double, std::size_t, std::size_t> find_entering() {
    constexpr std::size_t kBlockRows = 48;
    double best = 0.0;
    std::size_t br = 0, bc = 0;
    std::size_t scanned = 0;
    while (scanned < m_) {
      const std::size_t stop = std::min(scanned + kBlockRows, m_);
      for (; scanned < stop; ++scanned) {
        const std::size_t r = (cursor_ + scanned) % m_;
        const double ur = u_[r];
        const double* crow = cost_.data() + r * n_;
        for (std::size_t c = 0; c < n_; ++c) {
          const double rc = crow[c] - ur - v_[c];
          if (rc < best) {
            best = rc;
            br = r;
            bc = c;
          }
        }
      }
      if (best < -1e-12) {
        cursor_ = (cursor_ + scanned) % m_;
        return {best, br, bc};
      }
    }
    return {best, br, bc};
  }

  // Finds the unique alternating cycle the entering cell closes, shifts
  // flow around it and swaps the vanishing leaving cell out of the basis.
  void pivot_in(std::size_t er, std::size_t ec) {
    // Parent pointers over the basis tree from row er to column ec.
    std::vector<long> parent_edge(m_ + n_, -1);
    std::vector<char> visited(m_ + n_, 0);
    std::vector<std::size_t> queue{er};
    visited[er] = 1;
    for (std::size_t q = 0; q < queue.size() && !visited[m_ + ec]; ++q) {
      const std::size_t node = queue[q];
      if (node < m_) {
        for (std::size_t k : row_cells_[node]) {
          const std::size_t next = m_ + basis_[k].col;
          if (!visited[next]) {
            visited[next] = 1;
            parent_edge[next] = static_cast<long>(k);
            queue.push_back(next);
          }
        }
      } else {
        for (std::size_t k : col_cells_[node - m_]) {
          const std::size_t next = basis_[k].row;
          if (!visited[next]) {
            visited[next] = 1;
            parent_edge[next] = static_cast<long>(k);
            queue.push_back(next);
          }
        }
      }
    }
    if (!visited[m_ + ec]) throw Error("transport basis lost connectivity");

    // Walk back col ec -> row er; edges alternate minus/plus starting at
    // the edge adjacent to the entering column.
    std::vector<std::size_t> path;
    std::size_t node = m_ + ec;
    while (node != er) {
      const auto k = static_cast<std::size_t>(parent_edge[node]);
      path.push_back(k);
      node = (node >= m_) ? basis_[k].row : m_ + basis_[k].col;
    }

    double delta = std::numeric_limits<double>::infinity();
    std::size_t leaving = 0;
    for (std::size_t step = 0; step < path.size(); step += 2) {
      if (basis_[path[step]].flow < delta) {
        delta = basis_[path[step]].flow;
        leaving = path[step];
      }
    }
    for (std::size_t step = 0; step < path.size(); ++step)
      basis_[path[step]].flow += (step % 2 == 0) ? -delta : delta;

    // Replace the leaving cell in place.
    cell_index_[basis_[leaving].row * n_ + basis_[leaving].col] = -1;
    cell_index_[er * n_ + ec] = static_cast<long>(leaving);
    basis_[leaving] = {static_cast<std::uint32_t>(er), static_cast<std::uint32_t>(ec), delta};
  }

  double objective() const {
    double total = 0.0;
    for (const auto& cell : basis_) total += cell.flow * cost_[cell.row * n_ + cell.col];
    return total;
  }

  std::vector<double> cost_;
  std::vector<double> supply_;
  std::vector<double> demand_;
  std::size_t m_, n_;
  std::vector<BasicCell> basis_;
  std::vector<long> cell_index_;
  std::vector<std::vector<std::size_t>> row_cells_, col_cells_;
  std::vector<double> u_, v_;
  std::size_t cursor_ = 0;
};

}  // namespace

namespace detail {

std::vector<double> pairwise_distances(const Dataset& a, const Dataset& b);

double transport_cost_exact(std::vector<double> cost, std::vector<double> supply,
                            std::vector<double> demand) {
  TransportSimplex simplex(std::move(cost), std::move(supply), std::move(demand));
  return simplex.solve();
}

}  // namespace detail

double exact_wasserstein1(const Dataset& a, const std::vector<double>& mass_a, const Dataset& b,
                          const std::vector<double>& mass_b) {
  if (mass_a.size() != a.rows() || mass_b.size() != b.rows())
    throw InputError("mass vectors must match point counts");
  return detail::transport_cost_exact(detail::pairwise_distances(a, b), mass_a, mass_b);
}

}  // namespace dpiw::metrics
