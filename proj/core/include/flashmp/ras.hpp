#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "flashmp/distributed.hpp"
#include "flashmp/exchanger.hpp"
#include "flashmp/subdomain_solver.hpp"

namespace flashmp {

/// Precomputed subdomain solvers shared between ranks with identical local
/// problems (same extents, alpha and corrected faces).
class SolverCache {
 public:
  std::shared_ptr<const SubdomainSolverData> get(const OperatorParams& params);
  [[nodiscard]] std::size_t size() const;

 private:
  using Key = std::tuple<int, int, int, double, bool, bool, bool>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const SubdomainSolverData>> entries_;
};

/// Restricted additive Schwarz: exchange the residual onto each extended box,
/// solve the local problem there, keep only the owned part of the correction.
class RasPreconditioner final : public Preconditioner {
 public:
  /// `overlapped` must share the owned decomposition of `ctx`.
  RasPreconditioner(DistributedContext& ctx, const Partition& overlapped, double alpha,
                    bool global_with_boundary, SolverCache& cache);

  void apply(const DistributedField& r, DistributedField& z) override;

  [[nodiscard]] const SubdomainSolverData& subdomain(int rank) const { return *solvers_.at(rank); }
  [[nodiscard]] const Partition& partition() const { return exchanger_.partition(); }

 private:
  DistributedContext& ctx_;
  Exchanger exchanger_;
  std::vector<std::shared_ptr<const SubdomainSolverData>> solvers_;
  std::vector<SolverWorkspace> ws_;
  std::vector<FieldVector> ext_in_;
  std::vector<FieldVector> ext_out_;
};

/// z = r; the unpreconditioned baseline.
class IdentityPreconditioner final : public Preconditioner {
 public:
  void apply(const DistributedField& r, DistributedField& z) override { z = r; }
};

}  // namespace flashmp
