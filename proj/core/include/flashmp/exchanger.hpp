#pragma once

#include <vector>

#include "flashmp/grid.hpp"
#include "flashmp/partition.hpp"
#include "flashmp/transport.hpp"

namespace flashmp {

/// Overlap halo exchange in three steps: pack the owned cells each neighbor's
/// extended box needs, send/receive them, and unpack owned plus received data
/// into the extended field.
class Exchanger {
 public:
  Exchanger(Partition partition, Transport& transport);

  [[nodiscard]] const Partition& partition() const { return partition_; }

  /// Collective over all ranks. `owned[r]` lives on rank r's owned box, `extended[r]`
  /// is resized to its extended box.
  void exchange(const std::vector<FieldVector>& owned, std::vector<FieldVector>& extended);
  [[nodiscard]] std::vector<FieldVector> exchange(const std::vector<FieldVector>& owned);

  /// Number of messages a single exchange sends.
  [[nodiscard]] std::size_t messages_per_exchange() const;

 private:
  struct Link {
    int peer = 0;
    Region region;  // global coordinates
  };

  Partition partition_;
  Transport& transport_;
  std::vector<std::vector<Link>> sends_;
  std::vector<std::vector<Link>> recvs_;
};

/// Packs a region of a field (component, then k, j, i) into a contiguous buffer.
void pack_region(const Region& region, const Region& source, std::span<const double> field,
                 std::vector<double>& buffer);
void unpack_region(const Region& region, std::span<const double> buffer, const Region& target,
                   std::span<double> field);

}  // namespace flashmp
