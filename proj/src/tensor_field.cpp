#include "tensorcit/tensor_field.hpp"

namespace tct {

SymTensorField SymTensorField::constant_field(std::shared_ptr<const Mesh> m, TensorLayout l,
                                              const SymTensor2& value) {
  SymTensorField f(std::move(m), l);
  for (auto& v : f.values) v = value;
  return f;
}

SymTensorField SymTensorField::from_function(std::shared_ptr<const Mesh> m, TensorLayout l,
                                             const TensorFunction& fn) {
  SymTensorField f(std::move(m), l);
  for (int t = 0; t < f.mesh->triangle_count(); ++t)
    for (int k = 0; k < f.nodes_per_triangle(); ++k) f.at(t, k) = fn(f.node_location(t, k));
  return f;
}

}  // namespace tct
