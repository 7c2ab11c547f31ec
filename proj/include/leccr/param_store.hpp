#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "leccr/dense_matrix.hpp"
#include "leccr/tape.hpp"

namespace leccr {

// Persistent model parameters. Modules hold slot indices; each training or
// evaluation step binds the store into a fresh tape.
class ParamStore {
public:
  struct Entry {
    std::string name;
    DenseMatrix value;
    bool trainable = true;
  };

  std::size_t add(std::string name, DenseMatrix init, bool trainable = true) {
    entries_.push_back({std::move(name), std::move(init), trainable});
    return entries_.size() - 1;
  }

  std::size_t size() const { return entries_.size(); }
  Entry& operator[](std::size_t i) { return entries_[i]; }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }

  std::size_t trainable_scalar_count() const {
    std::size_t n = 0;
    for (const auto& e : entries_)
      if (e.trainable) n += e.value.size();
    return n;
  }

private:
  std::vector<Entry> entries_;
};

// One forward/backward pass worth of graph state.
struct GraphContext {
  Tape tape;
  std::vector<Var> params;

  explicit GraphContext(const ParamStore& store, bool with_grad = true) {
    params.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i)
      params.push_back(tape.leaf(store[i].value, with_grad && store[i].trainable));
  }

  Var p(std::size_t slot) const { return params[slot]; }
};

}  // namespace leccr
