#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rlab/grid.hpp"

namespace rlab {

using Params = std::map<std::string, double>;

/// A closed-form test function. Gradients are optional.
class Expression {
 public:
  virtual ~Expression() = default;
  virtual double value(const Point& x) const = 0;
  virtual std::optional<Point> gradient(const Point&) const { return std::nullopt; }
  /// False for functions (constants, linear maps) used only with the
  /// compact-support margin waived.
  virtual bool compactly_supported() const { return true; }
  /// Radius of a ball about the origin that contains the support.
  virtual double support_radius() const { return INFINITY; }
};

/// Identifiers of the built-in test-function corpus.
std::vector<std::string> corpus_ids();

/// Builds a corpus expression. Unknown ids throw std::invalid_argument.
std::shared_ptr<const Expression> make_expression(const std::string& id, const Params& params,
                                                  int dim);

/// Samples a corpus expression at the cell centres of box. The margin check
/// (values vanish on the outer two cell layers) applies to compactly
/// supported members unless waived.
GridFunction sample(const std::string& id, const Params& params, const Box& box,
                    int resolution, bool waive_margin = false);

/// Outer-layer check used by sample(): true if every value within `cells`
/// of a face is zero.
bool vanishes_near_boundary(const GridFunction& f, int cells = 2);

}  // namespace rlab
