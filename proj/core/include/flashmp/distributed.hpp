#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flashmp/exchanger.hpp"
#include "flashmp/grid.hpp"
#include "flashmp/partition.hpp"
#include "flashmp/sparse_operator.hpp"
#include "flashmp/transport.hpp"

namespace flashmp {

/// Timing categories of a solve.
inline constexpr std::array<std::string_view, 7> kBreakdownCategories{
    "reorder", "asm_comm", "fast_solve", "spmv", "p2p", "reduction", "axpy_dot"};

/// Accumulated wall-clock seconds per category (monotonic clock).
class PhaseTimers {
 public:
  class Scope {
   public:
    Scope(PhaseTimers& timers, std::string_view category)
        : timers_(timers), category_(category), start_(std::chrono::steady_clock::now()) {}
    ~Scope() {
      timers_.add(category_, std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count());
    }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;

   private:
    PhaseTimers& timers_;
    std::string_view category_;
    std::chrono::steady_clock::time_point start_;
  };

  PhaseTimers();
  void add(std::string_view category, double seconds);
  [[nodiscard]] double seconds(std::string_view category) const;
  [[nodiscard]] const std::map<std::string, double, std::less<>>& all() const { return seconds_; }
  void reset();

 private:
  std::map<std::string, double, std::less<>> seconds_;
};

/// Operation counts attributed at the Krylov call sites.
struct WorkCounts {
  std::uint64_t precond = 0;
  std::uint64_t spmv = 0;
  std::uint64_t dot = 0;
  std::uint64_t axpy = 0;

  WorkCounts& operator+=(const WorkCounts& o) {
    precond += o.precond;
    spmv += o.spmv;
    dot += o.dot;
    axpy += o.axpy;
    return *this;
  }
  friend bool operator==(const WorkCounts&, const WorkCounts&) = default;
};

/// A global field held as one owned-box piece per rank.
struct DistributedField {
  std::vector<FieldVector> parts;
};

[[nodiscard]] DistributedField make_distributed(const Partition& partition);
[[nodiscard]] DistributedField scatter(const Partition& partition, const FieldVector& global);
[[nodiscard]] FieldVector gather(const Partition& partition, const DistributedField& field);

/// Fixed-order (rank-ascending, left to right) sum of per-rank partials.
[[nodiscard]] double reduce_dot(std::span<const double> partials);

/// Execution context for distributed vector algebra: owned layout, transport,
/// timers, and the sink receiving dot/axpy counts.
class DistributedContext {
 public:
  DistributedContext(Partition owned_layout, Transport& transport);

  [[nodiscard]] const Partition& partition() const { return partition_; }
  [[nodiscard]] Transport& transport() { return transport_; }
  [[nodiscard]] PhaseTimers& timers() { return timers_; }

  void set_sink(WorkCounts* sink) { sink_ = sink; }
  void count_spmv() { if (sink_) ++sink_->spmv; }
  void count_precond() { if (sink_) ++sink_->precond; }

  [[nodiscard]] DistributedField zeros() const { return make_distributed(partition_); }

  [[nodiscard]] double dot(const DistributedField& a, const DistributedField& b);
  [[nodiscard]] double norm(const DistributedField& a);
  /// y += a x
  void axpy(double a, const DistributedField& x, DistributedField& y);
  /// y = x + a y
  void xpay(const DistributedField& x, double a, DistributedField& y);
  /// w = a x + y
  void waxpy(DistributedField& w, double a, const DistributedField& x, const DistributedField& y);
  /// Uncounted helpers.
  void copy(const DistributedField& src, DistributedField& dst);
  void scale(double a, DistributedField& x);
  void fill(DistributedField& x, double value);

 private:
  Partition partition_;
  Transport& transport_;
  PhaseTimers timers_;
  WorkCounts* sink_ = nullptr;
  std::vector<double> partials_;
};

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual void apply(const DistributedField& x, DistributedField& y) = 0;
};

/// Global I + alpha M (+ alpha Lambda) applied to a distributed field: a width-1
/// halo exchange followed by a local SpMV on each rank's grown box.
class DistributedOperator final : public LinearOperator {
 public:
  DistributedOperator(DistributedContext& ctx, double alpha, bool with_boundary);

  void apply(const DistributedField& x, DistributedField& y) override;
  [[nodiscard]] double alpha() const { return alpha_; }
  [[nodiscard]] bool with_boundary() const { return with_boundary_; }

 private:
  DistributedContext& ctx_;
  double alpha_;
  bool with_boundary_;
  Partition halo_layout_;
  Exchanger halo_;
  std::vector<SparseOperator> local_;
  std::vector<FieldVector> ext_in_;
  std::vector<FieldVector> ext_out_;
};

class Preconditioner {
 public:
  virtual ~Preconditioner() = default;
  virtual void apply(const DistributedField& r, DistributedField& z) = 0;
};

}  // namespace flashmp
