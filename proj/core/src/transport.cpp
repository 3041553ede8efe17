#include "flashmp/transport.hpp"

#include <algorithm>
#include <chrono>
#include <tuple>
#include <ostream>
#include <string>

#include "flashmp/errors.hpp"

namespace flashmp {

Transport::Transport(int ranks) : ranks_(ranks) {
  if (ranks < 1) throw CommunicationError("transport needs at least one rank");
}

void Transport::send(Message msg) {
  if (msg.src < 0 || msg.src >= ranks_ || msg.dst < 0 || msg.dst >= ranks_) {
    throw CommunicationError("send between unknown ranks " + std::to_string(msg.src) + " -> " +
                             std::to_string(msg.dst));
  }
  {
    std::lock_guard lock(mutex_);
    const std::size_t bytes = msg.payload.size() * sizeof(double);
    sent_ += bytes;
    if (tracing_) trace_.push_back({msg.epoch, msg.src, msg.dst, bytes});
    auto [it, inserted] = mailbox_.try_emplace(Key{msg.dst, msg.src, msg.epoch}, std::move(msg.payload));
    if (!inserted) {
      throw CommunicationError("duplicate message " + std::to_string(msg.src) + " -> " +
                               std::to_string(msg.dst) + " in epoch " + std::to_string(msg.epoch));
    }
  }
  arrived_.notify_all();
}

std::vector<double> Transport::receive(int dst, int src, std::uint64_t epoch) {
  std::unique_lock lock(mutex_);
  const Key key{dst, src, epoch};
  auto ready = [&] { return mailbox_.count(key) > 0; };
  if (!ready()) {
    if (!may_block() ||
        !arrived_.wait_for(lock, std::chrono::seconds(60), ready)) {
      throw CommunicationError("message " + std::to_string(src) + " -> " + std::to_string(dst) +
                               " in epoch " + std::to_string(epoch) + " never arrived");
    }
  }
  auto node = mailbox_.extract(key);
  received_ += node.mapped().size() * sizeof(double);
  return std::move(node.mapped());
}

void Transport::enable_trace(bool on) {
  std::lock_guard lock(mutex_);
  tracing_ = on;
}

std::vector<TransferRecord> Transport::trace() const {
  std::lock_guard lock(mutex_);
  return trace_;
}

std::size_t Transport::bytes_sent() const {
  std::lock_guard lock(mutex_);
  return sent_;
}

std::size_t Transport::bytes_received() const {
  std::lock_guard lock(mutex_);
  return received_;
}

std::size_t Transport::pending() const {
  std::lock_guard lock(mutex_);
  return mailbox_.size();
}

void SerialTransport::for_each_rank(const std::function<void(int)>& body) {
  for (int r = 0; r < ranks(); ++r) body(r);
}

ThreadTransport::ThreadTransport(int ranks) : Transport(ranks) {
  workers_.reserve(static_cast<std::size_t>(ranks));
  for (int r = 0; r < ranks; ++r) workers_.emplace_back([this, r] { worker(r); });
}

ThreadTransport::~ThreadTransport() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_.notify_all();
  for (auto& t : workers_) t.join();
}

void ThreadTransport::worker(int rank) {
  std::uint64_t seen = 0;
  for (;;) {
    const std::function<void(int)>* job = nullptr;
    {
      std::unique_lock lock(mutex_);
      start_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      job = job_;
    }
    std::exception_ptr err;
    try {
      (*job)(rank);
    } catch (...) {
      err = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      if (err && !error_) error_ = err;
      if (--remaining_ == 0) done_.notify_all();
    }
  }
}

void ThreadTransport::for_each_rank(const std::function<void(int)>& body) {
  std::unique_lock lock(mutex_);
  job_ = &body;
  remaining_ = ranks();
  error_ = nullptr;
  ++generation_;
  start_.notify_all();
  done_.wait(lock, [&] { return remaining_ == 0; });
  job_ = nullptr;
  if (error_) std::rethrow_exception(std::exchange(error_, nullptr));
}

std::unique_ptr<Transport> make_transport(TransportKind kind, int ranks) {
  if (kind == TransportKind::serial) return std::make_unique<SerialTransport>(ranks);
  return std::make_unique<ThreadTransport>(ranks);
}

void write_transfer_trace(std::ostream& os, std::vector<TransferRecord> records) {
  std::sort(records.begin(), records.end(), [](const TransferRecord& a, const TransferRecord& b) {
    return std::tie(a.epoch, a.src, a.dst) < std::tie(b.epoch, b.src, b.dst);
  });
  os << "epoch,src_rank,dst_rank,bytes\n";
  for (const auto& r : records) os << r.epoch << ',' << r.src << ',' << r.dst << ',' << r.bytes << '\n';
}

}  // namespace flashmp
