#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

namespace flashmp {

struct Message {
  int src = 0;
  int dst = 0;
  std::uint64_t epoch = 0;
  std::vector<double> payload;
};

struct TransferRecord {
  std::uint64_t epoch = 0;
  int src = 0;
  int dst = 0;
  std::size_t bytes = 0;
};

/// Moves messages between logical ranks and schedules per-rank work.
/// for_each_rank is a collective: it returns once every rank finished `body`,
/// which acts as the barrier between exchange phases.
class Transport {
 public:
  explicit Transport(int ranks);
  virtual ~Transport() = default;
  Transport(const Transport&) = delete;
  Transport& operator=(const Transport&) = delete;

  [[nodiscard]] int ranks() const { return ranks_; }
  [[nodiscard]] virtual std::string_view name() const = 0;

  virtual void for_each_rank(const std::function<void(int)>& body) = 0;

  /// Non-blocking send.
  void send(Message msg);
  /// Receives the message (src -> dst) of `epoch`. Throws CommunicationError if
  /// it does not arrive.
  [[nodiscard]] std::vector<double> receive(int dst, int src, std::uint64_t epoch);

  void enable_trace(bool on);
  [[nodiscard]] std::vector<TransferRecord> trace() const;
  [[nodiscard]] std::size_t bytes_sent() const;
  [[nodiscard]] std::size_t bytes_received() const;
  [[nodiscard]] std::size_t pending() const;

  /// Fresh tag for one collective exchange.
  [[nodiscard]] std::uint64_t next_epoch() { return ++epoch_; }

 protected:
  /// Whether receive may wait for a message from a concurrently running rank.
  [[nodiscard]] virtual bool may_block() const = 0;

 private:
  using Key = std::tuple<int, int, std::uint64_t>;  // dst, src, epoch
  int ranks_;
  mutable std::mutex mutex_;
  std::condition_variable arrived_;
  std::map<Key, std::vector<double>> mailbox_;
  bool tracing_ = false;
  std::vector<TransferRecord> trace_;
  std::size_t sent_ = 0;
  std::size_t received_ = 0;
  std::atomic<std::uint64_t> epoch_{0};
};

/// Ranks run one after another on the calling thread.
class SerialTransport final : public Transport {
 public:
  explicit SerialTransport(int ranks) : Transport(ranks) {}
  [[nodiscard]] std::string_view name() const override { return "serial"; }
  void for_each_rank(const std::function<void(int)>& body) override;

 protected:
  [[nodiscard]] bool may_block() const override { return false; }
};

/// One persistent worker thread per rank.
class ThreadTransport final : public Transport {
 public:
  explicit ThreadTransport(int ranks);
  ~ThreadTransport() override;
  [[nodiscard]] std::string_view name() const override { return "threads"; }
  void for_each_rank(const std::function<void(int)>& body) override;

 protected:
  [[nodiscard]] bool may_block() const override { return true; }

 private:
  void worker(int rank);

  std::mutex mutex_;
  std::condition_variable start_;
  std::condition_variable done_;
  const std::function<void(int)>* job_ = nullptr;
  std::uint64_t generation_ = 0;
  int remaining_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
  std::vector<std::thread> workers_;
};

enum class TransportKind { threads, serial };

[[nodiscard]] std::unique_ptr<Transport> make_transport(TransportKind kind, int ranks);

/// CSV with header `epoch,src_rank,dst_rank,bytes`, rows sorted by (epoch, src, dst).
void write_transfer_trace(std::ostream& os, std::vector<TransferRecord> records);

}  // namespace flashmp
