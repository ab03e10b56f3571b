#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace ehbp {

// Node ids are 1-based, commodity ids are 1-based.
using NodeId = int;
using CommodityId = int;

// Dense per-node storage addressed by 1-based node id.
template <typename T>
class NodeMap {
 public:
  NodeMap() = default;
  NodeMap(int node_count, const T& init) : data_(static_cast<std::size_t>(node_count), init) {}

  T& operator[](NodeId i) {
    assert(i >= 1 && static_cast<std::size_t>(i) <= data_.size());
    return data_[static_cast<std::size_t>(i - 1)];
  }
  const T& operator[](NodeId i) const {
    assert(i >= 1 && static_cast<std::size_t>(i) <= data_.size());
    return data_[static_cast<std::size_t>(i - 1)];
  }

  int size() const { return static_cast<int>(data_.size()); }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool operator==(const NodeMap&) const = default;

 private:
  std::vector<T> data_;
};

// Dense (node, commodity) storage, row-major by node.
template <typename T>
class NodeCommodityMap {
 public:
  NodeCommodityMap() = default;
  NodeCommodityMap(int node_count, int commodity_count, const T& init)
      : nodes_(node_count),
        commodities_(commodity_count),
        data_(static_cast<std::size_t>(node_count) * static_cast<std::size_t>(commodity_count), init) {}

  T& operator()(NodeId i, CommodityId k) { return data_[offset(i, k)]; }
  const T& operator()(NodeId i, CommodityId k) const { return data_[offset(i, k)]; }

  // All commodities of one node.
  std::span<T> row(NodeId i) { return std::span<T>(data_).subspan(offset(i, 1), static_cast<std::size_t>(commodities_)); }
  std::span<const T> row(NodeId i) const {
    return std::span<const T>(data_).subspan(offset(i, 1), static_cast<std::size_t>(commodities_));
  }

  int node_count() const { return nodes_; }
  int commodity_count() const { return commodities_; }
  std::span<T> values() { return data_; }
  std::span<const T> values() const { return data_; }

  bool operator==(const NodeCommodityMap&) const = default;

 private:
  std::size_t offset(NodeId i, CommodityId k) const {
    assert(i >= 1 && i <= nodes_ && k >= 1 && k <= commodities_);
    return static_cast<std::size_t>(i - 1) * static_cast<std::size_t>(commodities_) + static_cast<std::size_t>(k - 1);
  }

  int nodes_ = 0;
  int commodities_ = 0;
  std::vector<T> data_;
};

}  // namespace ehbp
