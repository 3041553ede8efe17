#include "flashmp/exchanger.hpp"

#include <string>

#include "flashmp/errors.hpp"

namespace flashmp {

void pack_region(const Region& region, const Region& source, std::span<const double> field,
                 std::vector<double>& buffer) {
  buffer.resize(3 * region.box.volume());
  const std::size_t v = source.box.volume();
  std::size_t t = 0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < region.box.nz; ++k)
      for (int j = 0; j < region.box.ny; ++j) {
        const std::size_t base =
            c * v + source.box.point(region.offset[0] - source.offset[0],
                                     region.offset[1] + j - source.offset[1],
                                     region.offset[2] + k - source.offset[2]);
        for (int i = 0; i < region.box.nx; ++i) buffer[t++] = field[base + i];
      }
}

void unpack_region(const Region& region, std::span<const double> buffer, const Region& target,
                   std::span<double> field) {
  if (buffer.size() != 3 * region.box.volume()) {
    throw CommunicationError("halo message has " + std::to_string(buffer.size()) +
                             " values, expected " + std::to_string(3 * region.box.volume()));
  }
  const std::size_t v = target.box.volume();
  std::size_t t = 0;
  for (int c = 0; c < 3; ++c)
    for (int k = 0; k < region.box.nz; ++k)
      for (int j = 0; j < region.box.ny; ++j) {
        const std::size_t base =
            c * v + target.box.point(region.offset[0] - target.offset[0],
                                     region.offset[1] + j - target.offset[1],
                                     region.offset[2] + k - target.offset[2]);
        for (int i = 0; i < region.box.nx; ++i) field[base + i] = buffer[t++];
      }
}

Exchanger::Exchanger(Partition partition, Transport& transport)
    : partition_(std::move(partition)), transport_(transport) {
  if (transport_.ranks() != partition_.size()) {
    throw CommunicationError("transport has " + std::to_string(transport_.ranks()) +
                             " ranks, partition has " + std::to_string(partition_.size()));
  }
  const auto n = static_cast<std::size_t>(partition_.size());
  sends_.resize(n);
  recvs_.resize(n);
  if (partition_.overlap() == 0) return;
  for (const RankLayout& me : partition_.ranks()) {
    for (const Neighbor& nb : me.neighbors) {
      const RankLayout& other = partition_.rank(nb.rank);
      // I receive the part of the neighbor's owned box inside my extended box.
      if (auto ov = intersect(other.owned, me.extended); ov.found) {
        recvs_[me.rank].push_back({nb.rank, ov.region});
        sends_[nb.rank].push_back({me.rank, ov.region});
      }
    }
  }
}

std::size_t Exchanger::messages_per_exchange() const {
  std::size_t total = 0;
  for (const auto& s : sends_) total += s.size();
  return total;
}

void Exchanger::exchange(const std::vector<FieldVector>& owned, std::vector<FieldVector>& extended) {
  const int n = partition_.size();
  if (static_cast<int>(owned.size()) != n) {
    throw CommunicationError("exchange called with " + std::to_string(owned.size()) +
                             " rank fields for " + std::to_string(n) + " ranks");
  }
  extended.resize(static_cast<std::size_t>(n));
  const std::uint64_t epoch = transport_.next_epoch();

  transport_.for_each_rank([&](int r) {
    const RankLayout& me = partition_.rank(r);
    for (const Link& link : sends_[r]) {
      Message msg{r, link.peer, epoch, {}};
      pack_region(link.region, me.owned, owned[r].data(), msg.payload);
      transport_.send(std::move(msg));
    }
  });

  transport_.for_each_rank([&](int r) {
    const RankLayout& me = partition_.rank(r);
    FieldVector& ext = extended[r];
    if (!(ext.box() == me.extended.box)) ext = FieldVector(me.extended.box);
    copy_region(me.owned, me.owned, owned[r].data(), me.extended, ext.data());
    for (const Link& link : recvs_[r]) {
      const auto payload = transport_.receive(r, link.peer, epoch);
      unpack_region(link.region, payload, me.extended, ext.data());
    }
  });
}

std::vector<FieldVector> Exchanger::exchange(const std::vector<FieldVector>& owned) {
  std::vector<FieldVector> extended;
  exchange(owned, extended);
  return extended;
}

}  // namespace flashmp
