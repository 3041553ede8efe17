#include "flashmp/distributed.hpp"

#include <cmath>
#include <string>

#include "flashmp/errors.hpp"

namespace flashmp {

PhaseTimers::PhaseTimers() { reset(); }

void PhaseTimers::add(std::string_view category, double seconds) {
  auto it = seconds_.find(category);
  if (it == seconds_.end()) {
    seconds_.emplace(std::string(category), seconds);
  } else {
    it->second += seconds;
  }
}

double PhaseTimers::seconds(std::string_view category) const {
  auto it = seconds_.find(category);
  return it == seconds_.end() ? 0.0 : it->second;
}

void PhaseTimers::reset() {
  seconds_.clear();
  for (auto c : kBreakdownCategories) seconds_.emplace(std::string(c), 0.0);
}

DistributedField make_distributed(const Partition& partition) {
  DistributedField f;
  f.parts.reserve(static_cast<std::size_t>(partition.size()));
  for (const auto& r : partition.ranks()) f.parts.emplace_back(r.owned.box);
  return f;
}

DistributedField scatter(const Partition& partition, const FieldVector& global) {
  if (!(global.box() == partition.global_box())) throw DimensionError("scatter: global box mismatch");
  DistributedField f = make_distributed(partition);
  const Region whole{{0, 0, 0}, partition.global_box()};
  for (const auto& r : partition.ranks()) {
    copy_region(r.owned, whole, global.data(), r.owned, f.parts[r.rank].data());
  }
  return f;
}

FieldVector gather(const Partition& partition, const DistributedField& field) {
  FieldVector global(partition.global_box());
  const Region whole{{0, 0, 0}, partition.global_box()};
  for (const auto& r : partition.ranks()) {
    copy_region(r.owned, r.owned, field.parts[r.rank].data(), whole, global.data());
  }
  return global;
}

double reduce_dot(std::span<const double> partials) {
  double sum = 0.0;
  for (double p : partials) sum += p;
  return sum;
}

DistributedContext::DistributedContext(Partition owned_layout, Transport& transport)
    : partition_(std::move(owned_layout)), transport_(transport),
      partials_(static_cast<std::size_t>(partition_.size()), 0.0) {
  if (transport_.ranks() != partition_.size()) {
    throw CommunicationError("transport rank count does not match the partition");
  }
}

double DistributedContext::dot(const DistributedField& a, const DistributedField& b) {
  {
    PhaseTimers::Scope t(timers_, "axpy_dot");
    transport_.for_each_rank([&](int r) {
      const auto x = a.parts[r].data();
      const auto y = b.parts[r].data();
      double acc = 0.0;
      for (std::size_t p = 0; p < x.size(); ++p) acc += x[p] * y[p];
      partials_[r] = acc;
    });
  }
  if (sink_) ++sink_->dot;
  PhaseTimers::Scope t(timers_, "reduction");
  return reduce_dot(partials_);
}

double DistributedContext::norm(const DistributedField& a) { return std::sqrt(dot(a, a)); }

void DistributedContext::axpy(double a, const DistributedField& x, DistributedField& y) {
  PhaseTimers::Scope t(timers_, "axpy_dot");
  transport_.for_each_rank([&](int r) {
    const auto xs = x.parts[r].data();
    auto ys = y.parts[r].data();
    for (std::size_t p = 0; p < xs.size(); ++p) ys[p] += a * xs[p];
  });
  if (sink_) ++sink_->axpy;
}

void DistributedContext::xpay(const DistributedField& x, double a, DistributedField& y) {
  PhaseTimers::Scope t(timers_, "axpy_dot");
  transport_.for_each_rank([&](int r) {
    const auto xs = x.parts[r].data();
    auto ys = y.parts[r].data();
    for (std::size_t p = 0; p < xs.size(); ++p) ys[p] = xs[p] + a * ys[p];
  });
  if (sink_) ++sink_->axpy;
}

void DistributedContext::waxpy(DistributedField& w, double a, const DistributedField& x,
                               const DistributedField& y) {
  PhaseTimers::Scope t(timers_, "axpy_dot");
  transport_.for_each_rank([&](int r) {
    const auto xs = x.parts[r].data();
    const auto ys = y.parts[r].data();
    auto ws = w.parts[r].data();
    for (std::size_t p = 0; p < xs.size(); ++p) ws[p] = a * xs[p] + ys[p];
  });
  if (sink_) ++sink_->axpy;
}

void DistributedContext::copy(const DistributedField& src, DistributedField& dst) {
  PhaseTimers::Scope t(timers_, "axpy_dot");
  dst.parts.resize(src.parts.size());
  transport_.for_each_rank([&](int r) { dst.parts[r] = src.parts[r]; });
}

void DistributedContext::scale(double a, DistributedField& x) {
  PhaseTimers::Scope t(timers_, "axpy_dot");
  transport_.for_each_rank([&](int r) {
    for (double& v : x.parts[r].data()) v *= a;
  });
}

void DistributedContext::fill(DistributedField& x, double value) {
  transport_.for_each_rank([&](int r) {
    for (double& v : x.parts[r].data()) v = value;
  });
}

DistributedOperator::DistributedOperator(DistributedContext& ctx, double alpha, bool with_boundary)
    : ctx_(ctx),
      alpha_(alpha),
      with_boundary_(with_boundary),
      halo_layout_(ctx.partition().with_overlap(1)),
      halo_(halo_layout_, ctx.transport()) {
  for (const auto& r : halo_layout_.ranks()) {
    const OperatorParams params(r.extended.box, alpha, halo_layout_.corrected_faces(r.rank, with_boundary));
    local_.push_back(assemble_sparse(params, true));
    ext_out_.emplace_back(r.extended.box);
  }
}

void DistributedOperator::apply(const DistributedField& x, DistributedField& y) {
  {
    PhaseTimers::Scope t(ctx_.timers(), "p2p");
    halo_.exchange(x.parts, ext_in_);
  }
  PhaseTimers::Scope t(ctx_.timers(), "spmv");
  ctx_.transport().for_each_rank([&](int r) {
    const RankLayout& me = halo_layout_.rank(r);
    local_[r].apply(ext_in_[r].data(), ext_out_[r].data());
    copy_region(me.owned, me.extended, ext_out_[r].data(), me.owned, y.parts[r].data());
  });
}

}  // namespace flashmp
