#include "greenrec/graph.hpp"

#include <algorithm>
#include <deque>
#include <istream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "greenrec/errors.hpp"
#include "greenrec/rng.hpp"

namespace greenrec {

RootedGraph::RootedGraph(std::size_t n_vertices) : adj_(n_vertices) {}

void RootedGraph::add_edge(std::uint32_t u, std::uint32_t v, double weight) {
  if (u >= adj_.size() || v >= adj_.size())
    throw std::invalid_argument("RootedGraph::add_edge: vertex out of range");
  adj_[u].emplace_back(v, weight);
  if (u != v) adj_[v].emplace_back(u, weight);
}

std::size_t RootedGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& nb : adj_) d = std::max(d, nb.size());
  return d;
}

RootedGraph RootedGraph::half_line(std::size_t sites) {
  RootedGraph g(sites);
  for (std::size_t i = 0; i + 1 < sites; ++i) g.add_edge(i, i + 1);
  return g;
}

namespace {

// vertices level by level: level n starts at (k^n - 1)/(k - 1)
std::size_t tree_size(std::size_t k, std::size_t depth) {
  std::size_t total = 0, level = 1;
  for (std::size_t n = 0; n <= depth; ++n) {
    total += level;
    level *= k;
  }
  return total;
}

}  // namespace

RootedGraph RootedGraph::kary_tree(std::size_t k, std::size_t depth) {
  if (k < 1) throw std::invalid_argument("kary_tree: k must be >= 1");
  RootedGraph g(tree_size(k, depth));
  std::size_t level_start = 0, level_size = 1;
  for (std::size_t n = 0; n < depth; ++n) {
    const std::size_t next_start = level_start + level_size;
    for (std::size_t j = 0; j < level_size; ++j)
      for (std::size_t c = 0; c < k; ++c)
        g.add_edge(static_cast<std::uint32_t>(level_start + j),
                   static_cast<std::uint32_t>(next_start + j * k + c));
    level_start = next_start;
    level_size *= k;
  }
  return g;
}

RootedGraph RootedGraph::box(std::size_t dims, std::size_t side) {
  if (dims < 1 || side < 1) throw std::invalid_argument("box: need dims >= 1, side >= 1");
  std::size_t total = 1;
  for (std::size_t i = 0; i < dims; ++i) total *= side;
  RootedGraph g(total);
  // row-major index; the origin gets id 0
  for (std::size_t v = 0; v < total; ++v) {
    std::size_t rem = v, stride = 1;
    for (std::size_t axis = 0; axis < dims; ++axis) {
      const std::size_t coord = rem % side;
      rem /= side;
      if (coord + 1 < side)
        g.add_edge(static_cast<std::uint32_t>(v), static_cast<std::uint32_t>(v + stride));
      stride *= side;
    }
  }
  return g;
}

RootedGraph RootedGraph::regular_loop_tree(double gamma, std::size_t depth) {
  if (gamma < 0.0) throw std::invalid_argument("regular_loop_tree: gamma < 0");
  RootedGraph g = kary_tree(2, depth);
  std::size_t level_start = 1, level_size = 2;
  for (std::size_t n = 1; n <= depth; ++n) {
    if (gamma != 0.0) {
      if (level_size == 2) {
        g.add_edge(static_cast<std::uint32_t>(level_start),
                   static_cast<std::uint32_t>(level_start + 1), 2.0 * gamma);
      } else {
        for (std::size_t j = 0; j < level_size; ++j)
          g.add_edge(static_cast<std::uint32_t>(level_start + j),
                     static_cast<std::uint32_t>(level_start + (j + 1) % level_size), gamma);
      }
    }
    level_start += level_size;
    level_size *= 2;
  }
  return g;
}

RootedGraph RootedGraph::meanfield_loop_tree(double gamma, std::size_t depth,
                                             bool include_diagonal) {
  if (gamma < 0.0) throw std::invalid_argument("meanfield_loop_tree: gamma < 0");
  RootedGraph g = kary_tree(2, depth);
  std::size_t level_start = 0, level_size = 1;
  for (std::size_t n = 0; n <= depth; ++n) {
    const double w = gamma / double(level_size);  // gamma * 2^-n
    if (gamma != 0.0) {
      for (std::size_t a = 0; a < level_size; ++a) {
        for (std::size_t b = a + 1; b < level_size; ++b)
          g.add_edge(static_cast<std::uint32_t>(level_start + a),
                     static_cast<std::uint32_t>(level_start + b), w);
        if (include_diagonal)
          g.add_edge(static_cast<std::uint32_t>(level_start + a),
                     static_cast<std::uint32_t>(level_start + a), w);
      }
    }
    level_start += level_size;
    level_size *= 2;
  }
  return g;
}

RootedGraph RootedGraph::percolation_tree_sample(double q_del, std::size_t depth,
                                                 std::uint64_t seed) {
  if (q_del < 0.0 || q_del > 1.0)
    throw std::invalid_argument("percolation_tree_sample: q_del outside [0,1]");
  // grow level by level, drawing the kept-forward-edge outcome per vertex
  std::vector<std::vector<std::uint32_t>> levels{{0}};
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::uint32_t next_id = 1;
  for (std::size_t n = 0; n < depth; ++n) {
    std::vector<std::uint32_t> next;
    for (std::uint32_t v : levels[n]) {
      SubStream rng(seed, v);
      const double u = rng.uniform01();
      int children = 2;
      if (u < q_del) children = 1;  // exactly one forward edge deleted
      for (int c = 0; c < children; ++c) {
        edges.emplace_back(v, next_id);
        next.push_back(next_id++);
      }
    }
    levels.push_back(std::move(next));
  }
  RootedGraph g(next_id);
  for (const auto& [u, v] : edges) g.add_edge(u, v);
  return g;
}

RootedGraph RootedGraph::from_edge_list(std::istream& in) {
  std::vector<std::tuple<std::uint32_t, std::uint32_t, double>> edges;
  std::size_t max_id = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long u, v;
    double w = 1.0;
    if (!(ls >> u >> v))
      throw std::invalid_argument("edge list: parse error at line " + std::to_string(line_no));
    ls >> w;
    if (u < 0 || v < 0)
      throw std::invalid_argument("edge list: negative vertex id at line " +
                                  std::to_string(line_no));
    edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v), w);
    max_id = std::max({max_id, static_cast<std::size_t>(u), static_cast<std::size_t>(v)});
  }
  if (edges.empty()) throw std::invalid_argument("edge list: no edges");
  RootedGraph g(max_id + 1);
  for (const auto& [u, v, w] : edges) g.add_edge(u, v, w);
  return g;
}

SphereDecomposition decompose_spheres(const RootedGraph& g, std::size_t depth) {
  const std::size_t n = g.size();
  std::vector<std::int64_t> dist(n, -1);
  std::deque<std::uint32_t> queue{0};
  dist[0] = 0;
  std::vector<std::vector<std::uint32_t>> all_spheres{{0}};
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    for (const auto& [w, wt] : g.neighbors(v)) {
      (void)wt;
      if (w == v || dist[w] >= 0) continue;
      dist[w] = dist[v] + 1;
      if (all_spheres.size() <= static_cast<std::size_t>(dist[w])) all_spheres.emplace_back();
      all_spheres[dist[w]].push_back(w);
      queue.push_back(w);
    }
  }
  SphereDecomposition dec;
  for (std::size_t lvl = 0; lvl < all_spheres.size() && lvl <= depth; ++lvl)
    dec.spheres.push_back(std::move(all_spheres[lvl]));
  for (std::size_t v = 0; v < n; ++v)
    if (dist[v] < 0) ++dec.unreachable;

  // position of each vertex inside its sphere
  std::vector<std::uint32_t> pos(n, 0);
  for (const auto& sphere : dec.spheres)
    for (std::size_t i = 0; i < sphere.size(); ++i) pos[sphere[i]] = static_cast<std::uint32_t>(i);

  const std::size_t n_levels = dec.spheres.size();
  dec.intra.resize(n_levels);
  dec.forward.resize(n_levels > 0 ? n_levels - 1 : 0);
  using Triplet = Eigen::Triplet<double>;
  for (std::size_t lvl = 0; lvl < n_levels; ++lvl) {
    std::vector<Triplet> d_trip, e_trip;
    for (std::uint32_t v : dec.spheres[lvl]) {
      for (const auto& [w, wt] : g.neighbors(v)) {
        if (dist[w] == static_cast<std::int64_t>(lvl)) {
          if (v == w) {
            d_trip.emplace_back(pos[v], pos[v], wt);  // self-loop: counted once
          } else {
            d_trip.emplace_back(pos[v], pos[w], wt);
          }
        } else if (lvl + 1 < n_levels && dist[w] == static_cast<std::int64_t>(lvl) + 1) {
          e_trip.emplace_back(pos[w], pos[v], wt);  // E_n rows live on S_{n+1}
        }
      }
    }
    Eigen::SparseMatrix<double> d(dec.spheres[lvl].size(), dec.spheres[lvl].size());
    d.setFromTriplets(d_trip.begin(), d_trip.end());
    dec.intra[lvl] = std::move(d);
    if (lvl + 1 < n_levels) {
      Eigen::SparseMatrix<double> e(dec.spheres[lvl + 1].size(), dec.spheres[lvl].size());
      e.setFromTriplets(e_trip.begin(), e_trip.end());
      dec.forward[lvl] = std::move(e);
    }
  }
  return dec;
}

}  // namespace greenrec
