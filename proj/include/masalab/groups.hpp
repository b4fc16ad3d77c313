#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "masalab/common.hpp"

namespace masalab::groups {

using Int = boost::multiprecision::cpp_int;

// ---------------------------------------------------------------------------
// Elements.  Normal forms are unique per model kind:
//   Word     reduced syllable list (free groups)
//   Vec      coordinate vector, torsion components reduced mod n_i (abelian)
//   SemiElem (vector, power) pair for Z^d x| Z
//   Tuple    componentwise (direct products)
//   FPWord   alternating syllables (factor, nontrivial factor element)
// ---------------------------------------------------------------------------

struct Elem;

using Syllable = std::pair<int, long long>;  // (generator index, exponent != 0)
using Word = std::vector<Syllable>;
using Vec = std::vector<Int>;

struct SemiElem {
  Vec vec;
  Int power;
};

using Tuple = std::vector<Elem>;

struct FPWord {
  std::vector<std::pair<int, Elem>> syllables;
};

struct Elem {
  std::variant<Word, Vec, SemiElem, Tuple, FPWord> v;
};

int elem_cmp(const Elem& a, const Elem& b);
inline bool operator==(const Elem& a, const Elem& b) { return elem_cmp(a, b) == 0; }
inline bool operator<(const Elem& a, const Elem& b) { return elem_cmp(a, b) < 0; }

// ---------------------------------------------------------------------------
// Group kinds
// ---------------------------------------------------------------------------

class Group {
 public:
  virtual ~Group() = default;

  virtual std::string kind() const = 0;
  virtual Elem identity() const = 0;
  virtual Elem mul(const Elem& g, const Elem& h) const = 0;
  virtual Elem inv(const Elem& g) const = 0;
  virtual std::vector<Elem> generators() const = 0;
  // word-length proxy used for search guards
  virtual long long length(const Elem& g) const = 0;
  virtual std::string format(const Elem& g) const = 0;
  virtual Elem parse(const std::string& text) const = 0;

  bool is_identity(const Elem& g) const { return g == identity(); }
  Elem pow(const Elem& g, const Int& k) const;
};

using GroupPtr = std::shared_ptr<const Group>;

GroupPtr make_free(int rank);
GroupPtr make_abelian(std::vector<Int> invariants);  // 0 entries are Z factors
GroupPtr make_finite_cyclic(long long n);
GroupPtr make_direct_product(std::vector<GroupPtr> factors);
GroupPtr make_free_product(std::vector<GroupPtr> factors);
GroupPtr make_semidirect(std::vector<std::vector<long long>> matrix);  // A in GL_d(Z)

// ---------------------------------------------------------------------------
// Marked abelian subgroup
// ---------------------------------------------------------------------------

// Coordinates of a subgroup element with respect to the marked generators,
// which are required to be independent (the subgroup is their internal direct
// sum).  Free entries are exponents of infinite-order generators; torsion
// entries are (residue, order) for finite-order generators.
struct SubgroupCoords {
  std::vector<Int> free;
  std::vector<std::pair<long long, long long>> torsion;
};

class MarkedSubgroup {
 public:
  virtual ~MarkedSubgroup() = default;
  virtual bool contains(const Elem& g) const = 0;
  virtual std::vector<Elem> generators() const = 0;
  virtual std::optional<SubgroupCoords> coordinates(const Elem& g) const = 0;
  // number of infinite-order / finite-order generator slots
  virtual std::size_t free_rank() const = 0;
  virtual std::vector<long long> torsion_orders() const = 0;
  bool is_finite() const { return free_rank() == 0; }
};

using SubgroupPtr = std::shared_ptr<const MarkedSubgroup>;

// ---------------------------------------------------------------------------
// Model = ambient group + marked abelian subgroup
// ---------------------------------------------------------------------------

struct GroupModel {
  GroupPtr group;
  SubgroupPtr marked;

  bool in_marked(const Elem& g) const { return marked->contains(g); }
};

// Marked subgroup builders; each verifies commutativity of the generators.
SubgroupPtr mark_cyclic(GroupPtr ambient, const Elem& generator);        // free kinds
SubgroupPtr mark_lattice(GroupPtr ambient, std::vector<Elem> basis);     // abelian ambient
SubgroupPtr mark_acting_z(GroupPtr ambient);                             // semidirect
SubgroupPtr mark_componentwise(GroupPtr ambient, std::vector<Elem> generators);  // products

// Dispatches on the ambient kind.
SubgroupPtr mark_subgroup(GroupPtr ambient, const std::vector<Elem>& generators);

// All elements of word length <= R in the standard generators, with the
// radius at which each was first reached.
std::vector<std::pair<Elem, int>> ball_with_radius(const Group& group,
                                                   const std::vector<Elem>& generators, int R);
std::vector<Elem> ball(const Group& group, int R);
// Same, within the marked subgroup (its generators).
std::vector<std::pair<Elem, int>> marked_ball(const GroupModel& model, int R);

// JSON: {"kind":"free","rank":2,"marked":["a"]},
//       {"kind":"semidirect","matrix":[[2,1],[1,1]],"marked":"acting_Z"},
//       {"kind":"direct_product","factors":[...],"marked":["(a,0)","(e,1)"]}, ...
GroupModel model_from_json(const std::string& text);
std::string model_to_json(const GroupModel& model);

}  // namespace masalab::groups
