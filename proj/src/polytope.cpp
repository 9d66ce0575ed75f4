#include "quadest/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>

#include "quadest/error.hpp"

namespace quadest {

namespace {

// Relative scale of the degeneracy window and of the initial offset nudge.
constexpr double kDegeneracyTol = 1e-9;
constexpr double kPerturbationStart = 1e-9;
constexpr int kMaxPerturbationRounds = 40;

}  // namespace

void validate(const Halfspace& h) {
  if (h.normal.size() == 0) throw ValidationError("halfspace has an empty normal");
  if (!h.normal.allFinite() || !std::isfinite(h.offset)) {
    throw ValidationError("halfspace has non-finite entries");
  }
  if (h.normal.isZero(0.0)) throw ValidationError("halfspace normal is zero");
}

Polytope Polytope::from_box(const BoxDomain& box) {
  const int d = box.dim();
  if (d == 0) throw ValidationError("box must have at least one coordinate");
  // Re-check: a default-constructed or moved-from box bypasses the constructor.
  for (int i = 0; i < d; ++i) {
    if (!(box.lower(i) < box.upper(i))) {
      throw ValidationError("degenerate interval for coordinate " + std::to_string(i));
    }
  }
  std::vector<Halfspace> hs;
  hs.reserve(2 * d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(d);
    lo[i] = -1.0;
    hs.push_back({lo, box.lower(i)});  // -x_i + l_i <= 0
    Eigen::VectorXd up = Eigen::VectorXd::Zero(d);
    up[i] = 1.0;
    hs.push_back({up, -box.upper(i)});  // x_i - u_i <= 0
  }
  Polytope p(d, std::move(hs));
  std::vector<VertexId> ids;
  for (unsigned mask = 0; mask < (1u << d); ++mask) {
    Eigen::VectorXd v(d);
    std::vector<int> active(d);
    for (int i = 0; i < d; ++i) {
      const bool upper = (mask >> i) & 1u;
      v[i] = upper ? box.upper(i) : box.lower(i);
      active[i] = 2 * i + (upper ? 1 : 0);
    }
    ids.push_back(p.add_vertex(std::move(v), std::move(active)));
  }
  p.connect_by_active_sets(ids);
  return p;
}

Polytope Polytope::lift(const Polytope& base, double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw ValidationError("lift interval must be finite with lo < hi");
  }
  const int d = base.dim_ + 1;
  std::vector<Halfspace> hs;
  hs.reserve(base.halfspaces_.size() + 2);
  for (const auto& h : base.halfspaces_) {
    Eigen::VectorXd n = Eigen::VectorXd::Zero(d);
    n.head(base.dim_) = h.normal;
    hs.push_back({n, h.offset});
  }
  const int lo_index = static_cast<int>(hs.size());
  Eigen::VectorXd n_lo = Eigen::VectorXd::Zero(d);
  n_lo[d - 1] = -1.0;
  hs.push_back({n_lo, lo});
  const int hi_index = lo_index + 1;
  Eigen::VectorXd n_hi = Eigen::VectorXd::Zero(d);
  n_hi[d - 1] = 1.0;
  hs.push_back({n_hi, -hi});

  Polytope p(d, std::move(hs));
  std::vector<VertexId> ids;
  for (VertexId id : base.alive_) {
    const Vertex& v = base.slots_[id];
    for (int level = 0; level < 2; ++level) {
      Eigen::VectorXd c(d);
      c.head(base.dim_) = v.coords;
      c[d - 1] = level == 0 ? lo : hi;
      std::vector<int> active = v.active;
      active.push_back(level == 0 ? lo_index : hi_index);  // larger than any base index
      ids.push_back(p.add_vertex(std::move(c), std::move(active)));
    }
  }
  p.connect_by_active_sets(ids);
  return p;
}

VertexId Polytope::add_vertex(Eigen::VectorXd coords, std::vector<int> active) {
  const auto id = static_cast<VertexId>(slots_.size());
  Vertex v;
  v.id = id;
  v.coords = std::move(coords);
  v.active = std::move(active);
  slots_.push_back(std::move(v));
  live_.push_back(true);
  alive_.push_back(id);
  return id;
}

void Polytope::connect_by_active_sets(const std::vector<VertexId>& ids) {
  // Vertices sharing dim-1 active halfspaces are the two ends of an edge.
  std::map<std::vector<int>, std::vector<VertexId>> by_face;
  for (VertexId id : ids) {
    const auto& act = slots_[id].active;
    for (std::size_t drop = 0; drop < act.size(); ++drop) {
      std::vector<int> key;
      key.reserve(act.size() - 1);
      for (std::size_t k = 0; k < act.size(); ++k) {
        if (k != drop) key.push_back(act[k]);
      }
      by_face[std::move(key)].push_back(id);
    }
  }
  for (const auto& [key, members] : by_face) {
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = i + 1; j < members.size(); ++j) {
        slots_[members[i]].neighbors.push_back(members[j]);
        slots_[members[j]].neighbors.push_back(members[i]);
      }
    }
  }
}

std::size_t Polytope::edge_count() const {
  std::size_t degree_sum = 0;
  for (VertexId id : alive_) degree_sum += slots_[id].neighbors.size();
  return degree_sum / 2;
}

bool Polytope::contains_vertex(VertexId id) const { return id < live_.size() && live_[id]; }

const Vertex& Polytope::vertex(VertexId id) const {
  if (!contains_vertex(id)) throw ValidationError("no live vertex with id " + std::to_string(id));
  return slots_[id];
}

Vertex& Polytope::vertex(VertexId id) {
  if (!contains_vertex(id)) throw ValidationError("no live vertex with id " + std::to_string(id));
  return slots_[id];
}

std::vector<VertexId> Polytope::vertices_violating(const Halfspace& h) const {
  if (h.dim() != dim_) throw ValidationError("halfspace dimension mismatch");
  std::vector<VertexId> out;
  for (VertexId id : alive_) {
    if (h.eval(slots_[id].coords) > 0.0) out.push_back(id);
  }
  return out;
}

CutReport Polytope::cut(const Halfspace& h) {
  validate(h);
  if (h.dim() != dim_) throw ValidationError("halfspace dimension mismatch");
  CutReport report;
  if (alive_.empty()) {
    report.status = CutStatus::kEmpty;
    return report;
  }

  const double tol = kDegeneracyTol * (1.0 + h.normal.norm());
  std::vector<double> side(slots_.size(), 0.0);
  double max_side = -std::numeric_limits<double>::infinity();
  bool degenerate = false;
  for (VertexId id : alive_) {
    side[id] = h.eval(slots_[id].coords);
    max_side = std::max(max_side, side[id]);
    degenerate = degenerate || std::fabs(side[id]) <= tol;
  }
  if (max_side <= tol) {
    report.status = CutStatus::kRedundant;
    return report;
  }

  double shift = 0.0;
  if (degenerate) {
    double delta = kPerturbationStart * (1.0 + std::fabs(h.offset));
    for (int round = 0;; ++round) {
      if (round == kMaxPerturbationRounds) throw SolverError("could not perturb cut out of degeneracy");
      bool clear = std::all_of(alive_.begin(), alive_.end(),
                               [&](VertexId id) { return std::fabs(side[id] + delta) > tol; });
      if (clear) break;
      delta *= 10.0;
    }
    shift = delta;
    for (VertexId id : alive_) side[id] += shift;
  }

  std::vector<VertexId> removed;
  for (VertexId id : alive_) {
    if (side[id] > 0.0) removed.push_back(id);
  }
  if (removed.size() == alive_.size()) {
    report.status = CutStatus::kEmpty;
    return report;
  }

  const int index = static_cast<int>(halfspaces_.size());
  halfspaces_.push_back({h.normal, h.offset + shift});
  report.status = CutStatus::kApplied;
  report.halfspace_index = index;
  report.offset_shift = shift;

  for (VertexId r : removed) live_[r] = false;

  std::vector<VertexId> created;
  for (VertexId r : removed) {
    // Copy: add_vertex may reallocate slots_.
    const std::vector<VertexId> around = slots_[r].neighbors;
    for (VertexId k : around) {
      if (!live_[k]) continue;
      const double lambda = side[r] / (side[r] - side[k]);
      Eigen::VectorXd c = slots_[r].coords + lambda * (slots_[k].coords - slots_[r].coords);
      std::vector<int> active;
      std::set_intersection(slots_[r].active.begin(), slots_[r].active.end(), slots_[k].active.begin(),
                            slots_[k].active.end(), std::back_inserter(active));
      if (static_cast<int>(active.size()) != dim_ - 1) {
        throw SolverError("edge endpoints do not share dim-1 halfspaces; polytope not simple");
      }
      active.push_back(index);  // index is the largest so far
      const VertexId v = add_vertex(std::move(c), std::move(active));
      slots_[v].neighbors.push_back(k);
      std::replace(slots_[k].neighbors.begin(), slots_[k].neighbors.end(), r, v);
      created.push_back(v);
    }
  }
  connect_by_active_sets(created);

  report.removed.reserve(removed.size());
  for (VertexId r : removed) {
    report.removed.push_back(slots_[r]);
    slots_[r].coords.resize(0);
    slots_[r].neighbors.clear();
    slots_[r].neighbors.shrink_to_fit();
  }
  std::erase_if(alive_, [&](VertexId id) { return !live_[id]; });
  report.created = std::move(created);
  return report;
}

std::string Polytope::dump() const {
  std::ostringstream os;
  os.precision(17);
  for (VertexId id : alive_) {
    const Vertex& v = slots_[id];
    os << id << ':';
    for (int i = 0; i < v.coords.size(); ++i) os << ' ' << v.coords[i];
    os << " |";
    for (int a : v.active) os << ' ' << a;
    os << '\n';
  }
  return os.str();
}

}  // namespace quadest
