#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "quadest/box.hpp"

namespace quadest {

/// Closed halfspace  { v : normal . v + offset <= 0 }.
struct Halfspace {
  Eigen::VectorXd normal;
  double offset = 0.0;

  double eval(const Eigen::VectorXd& v) const { return normal.dot(v) + offset; }
  int dim() const { return static_cast<int>(normal.size()); }
};

/// Throws ValidationError for a zero or non-finite halfspace.
void validate(const Halfspace& h);

using VertexId = std::uint32_t;

struct Vertex {
  VertexId id = 0;
  Eigen::VectorXd coords;
  std::vector<int> active;          // sorted halfspace indices, exactly dim() of them
  std::vector<VertexId> neighbors;  // adjacent vertex ids
  std::uint64_t payload = 0;        // free for caller bookkeeping
};

enum class CutStatus {
  kApplied,    // some vertices removed, new ones created
  kRedundant,  // no vertex violates the halfspace; nothing stored
  kEmpty,      // every vertex violates; polytope left unchanged
};

struct CutReport {
  CutStatus status = CutStatus::kRedundant;
  std::vector<Vertex> removed;     // H-: copies of the vertices cut away
  std::vector<VertexId> created;   // H+: ids of the new vertices
  int halfspace_index = -1;        // index of the stored halfspace when applied
  double offset_shift = 0.0;       // perturbation added to the offset (0 when none)
};

/// Bounded simple polytope kept in vertex form, refined by halfspace cuts.
///
/// Every vertex lies on exactly dim() stored halfspaces. Two vertices are
/// adjacent iff their active sets share dim()-1 indices. Simplicity is
/// maintained by nudging the offset of an incoming cut whenever a current
/// vertex lies (within tolerance) on its boundary hyperplane; the nudge
/// tightens the cut so that near-boundary vertices are cut away.
///
/// Vertex ids are never reused and increase with creation time, so iteration
/// order (ascending id) is deterministic.
class Polytope {
 public:
  /// Throws ValidationError for degenerate or non-finite boxes.
  static Polytope from_box(const BoxDomain& box);

  /// Product of `base` with the interval [lo, hi] in a new trailing coordinate.
  static Polytope lift(const Polytope& base, double lo, double hi);

  int dim() const { return dim_; }
  const std::vector<Halfspace>& halfspaces() const { return halfspaces_; }

  std::size_t vertex_count() const { return alive_.size(); }
  std::size_t edge_count() const;
  /// Live vertex ids in ascending order.
  const std::vector<VertexId>& vertex_ids() const { return alive_; }
  const Vertex& vertex(VertexId id) const;
  Vertex& vertex(VertexId id);
  bool contains_vertex(VertexId id) const;

  /// Total number of vertices ever created, including the initial ones.
  std::size_t vertices_created() const { return slots_.size(); }

  CutReport cut(const Halfspace& h);

  /// Vertices with h.eval(v) > 0.
  std::vector<VertexId> vertices_violating(const Halfspace& h) const;

  /// One line per vertex: "id: c0 c1 ... | a0 a1 ...". Debug aid only.
  std::string dump() const;

 private:
  Polytope(int dim, std::vector<Halfspace> halfspaces) : dim_(dim), halfspaces_(std::move(halfspaces)) {}

  VertexId add_vertex(Eigen::VectorXd coords, std::vector<int> active);
  void connect_by_active_sets(const std::vector<VertexId>& ids);

  int dim_ = 0;
  std::vector<Halfspace> halfspaces_;
  std::vector<Vertex> slots_;     // indexed by id
  std::vector<bool> live_;        // indexed by id
  std::vector<VertexId> alive_;   // ascending
};

}  // namespace quadest
