#include "relplane/params.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace relplane {

int ParamStore::add(const std::string& name, Tensor init) {
  if (has(name)) throw std::logic_error("param '" + name + "' already registered");
  Entry e;
  e.name = name;
  e.grad = Tensor::zeros(init.rows, init.cols);
  e.m = Tensor::zeros(init.rows, init.cols);
  e.v = Tensor::zeros(init.rows, init.cols);
  e.value = std::move(init);
  entries_.push_back(std::move(e));
  int id = static_cast<int>(entries_.size()) - 1;
  index_.emplace(name, id);
  return id;
}

ParamStore::Entry& ParamStore::get(const std::string& name) {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::logic_error("unknown param '" + name + "'");
  return entries_[it->second];
}

const ParamStore::Entry& ParamStore::get(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw std::logic_error("unknown param '" + name + "'");
  return entries_[it->second];
}

void ParamStore::zero_grads() {
  for (auto& e : entries_) std::fill(e.grad.v.begin(), e.grad.v.end(), 0.0);
}

void ParamStore::scale_grads(double s) {
  for (auto& e : entries_)
    for (auto& x : e.grad.v) x *= s;
}

double ParamStore::grad_norm() const {
  double acc = 0.0;
  for (const auto& e : entries_)
    for (double x : e.grad.v) acc += x * x;
  return std::sqrt(acc);
}

void ParamStore::clip_grad_norm(double max_norm) {
  double n = grad_norm();
  if (n > max_norm && n > 0.0) scale_grads(max_norm / n);
}

void ParamStore::adamw_step(double lr, double beta1, double beta2, double eps,
                            double weight_decay) {
  ++step_;
  double bc1 = 1.0 - std::pow(beta1, static_cast<double>(step_));
  double bc2 = 1.0 - std::pow(beta2, static_cast<double>(step_));
  for (auto& e : entries_) {
    bool decay = e.value.rows > 1;
    for (std::size_t i = 0; i < e.value.v.size(); ++i) {
      double g = e.grad.v[i];
      e.m.v[i] = beta1 * e.m.v[i] + (1.0 - beta1) * g;
      e.v.v[i] = beta2 * e.v.v[i] + (1.0 - beta2) * g * g;
      double mhat = e.m.v[i] / bc1;
      double vhat = e.v.v[i] / bc2;
      double upd = mhat / (std::sqrt(vhat) + eps);
      if (decay) upd += weight_decay * e.value.v[i];
      e.value.v[i] -= lr * upd;
    }
  }
}

std::size_t ParamStore::count_scalars() const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.value.v.size();
  return n;
}

std::uint64_t ParamStore::value_hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= p[i];
      h *= 1099511628211ULL;
    }
  };
  for (const auto& e : entries_) {
    mix(e.name.data(), e.name.size());
    mix(e.value.v.data(), e.value.v.size() * sizeof(double));
  }
  return h;
}

Graph::NodeId ParamContext::operator[](const std::string& name) {
  auto it = bound_.find(name);
  if (it != bound_.end()) return it->second;
  Graph::NodeId id = graph_->input(store_->get(name).value, needs_grad_);
  bound_.emplace(name, id);
  return id;
}

void ParamContext::harvest() {
  if (!needs_grad_) return;
  for (const auto& [name, node] : bound_) {
    if (!graph_->needs_grad(node)) continue;
    Tensor& dst = store_->get(name).grad;
    const Tensor& src = graph_->grad(node);
    for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += src.v[i];
  }
}

}  // namespace relplane
