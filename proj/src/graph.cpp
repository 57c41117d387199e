#include "relplane/graph.hpp"

#include <cmath>
#include <stdexcept>

namespace relplane {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

double gelu_fn(double x) { return 0.5 * x * (1.0 + std::erf(x * kInvSqrt2)); }

double gelu_grad(double x) {
  return 0.5 * (1.0 + std::erf(x * kInvSqrt2)) +
         x * kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

void require(bool cond, const char* msg) {
  if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

Graph::NodeId Graph::push(Tensor val, bool needs_grad,
                          std::function<void(Graph&, int)> back) {
  Node n;
  n.val = std::move(val);
  n.needs_grad = needs_grad;
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size()) - 1;
}

Tensor& Graph::ensure_grad(NodeId id) {
  Node& n = nodes_[id];
  if (!n.grad_live) {
    n.grad = Tensor::zeros(n.val.rows, n.val.cols);
    n.grad_live = true;
  }
  return n.grad;
}

Tensor& Graph::grad(NodeId id) { return ensure_grad(id); }

void Graph::accumulate(NodeId id, const Tensor& g) {
  if (!nodes_[id].needs_grad) return;
  Tensor& dst = ensure_grad(id);
  for (std::size_t i = 0; i < dst.v.size(); ++i) dst.v[i] += g.v[i];
}

void Graph::backward(NodeId loss_id) {
  const Tensor& l = nodes_[loss_id].val;
  require(l.rows == 1 && l.cols == 1, "backward: loss must be scalar");
  Tensor& g = ensure_grad(loss_id);
  g.v[0] = 1.0;
  for (int id = loss_id; id >= 0; --id) {
    Node& n = nodes_[id];
    if (!n.grad_live || !n.needs_grad || !n.back) continue;
    n.back(*this, id);
  }
}

Graph::NodeId Graph::input(Tensor t, bool needs_grad) {
  return push(std::move(t), needs_grad, nullptr);
}

Graph::NodeId Graph::add(NodeId a, NodeId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  require(ta.same_shape(tb), "add: shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] += tb.v[i];
  bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng, [a, b](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    g.accumulate(a, d);
    g.accumulate(b, d);
  });
}

Graph::NodeId Graph::add_rowvec(NodeId a, NodeId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  require(tb.rows == 1 && tb.cols == ta.cols, "add_rowvec: bias must be 1 x C");
  Tensor out = ta;
  for (int r = 0; r < out.rows; ++r)
    for (int c = 0; c < out.cols; ++c) out.at(r, c) += tb.at(0, c);
  bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng, [a, b](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    g.accumulate(a, d);
    if (g.nodes_[b].needs_grad) {
      Tensor& db = g.ensure_grad(b);
      for (int r = 0; r < d.rows; ++r)
        for (int c = 0; c < d.cols; ++c) db.at(0, c) += d.at(r, c);
    }
  });
}

Graph::NodeId Graph::scale(NodeId a, double s) {
  Tensor out = nodes_[a].val;
  for (auto& x : out.v) x *= s;
  return push(std::move(out), nodes_[a].needs_grad, [a, s](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (std::size_t i = 0; i < d.v.size(); ++i) da.v[i] += s * d.v[i];
  });
}

Graph::NodeId Graph::mul(NodeId a, NodeId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  require(ta.same_shape(tb), "mul: shape mismatch");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= tb.v[i];
  bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng, [a, b](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& va = g.nodes_[a].val;
    const Tensor& vb = g.nodes_[b].val;
    if (g.nodes_[a].needs_grad) {
      Tensor& da = g.ensure_grad(a);
      for (std::size_t i = 0; i < d.v.size(); ++i) da.v[i] += d.v[i] * vb.v[i];
    }
    if (g.nodes_[b].needs_grad) {
      Tensor& db = g.ensure_grad(b);
      for (std::size_t i = 0; i < d.v.size(); ++i) db.v[i] += d.v[i] * va.v[i];
    }
  });
}

Graph::NodeId Graph::matmul(NodeId a, NodeId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  require(ta.cols == tb.rows, "matmul: inner dimension mismatch");
  Tensor out(ta.rows, tb.cols);
  for (int i = 0; i < ta.rows; ++i) {
    const double* arow = ta.row(i);
    double* orow = out.row(i);
    for (int k = 0; k < ta.cols; ++k) {
      double av = arow[k];
      if (av == 0.0) continue;
      const double* brow = tb.row(k);
      for (int j = 0; j < tb.cols; ++j) orow[j] += av * brow[j];
    }
  }
  bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng, [a, b](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& va = g.nodes_[a].val;
    const Tensor& vb = g.nodes_[b].val;
    if (g.nodes_[a].needs_grad) {  // dA = d * B^T
      Tensor& da = g.ensure_grad(a);
      for (int i = 0; i < da.rows; ++i)
        for (int k = 0; k < da.cols; ++k) {
          double acc = 0.0;
          const double* drow = d.row(i);
          const double* brow = vb.row(k);
          for (int j = 0; j < d.cols; ++j) acc += drow[j] * brow[j];
          da.at(i, k) += acc;
        }
    }
    if (g.nodes_[b].needs_grad) {  // dB = A^T * d
      Tensor& db = g.ensure_grad(b);
      for (int i = 0; i < va.rows; ++i) {
        const double* arow = va.row(i);
        const double* drow = d.row(i);
        for (int k = 0; k < va.cols; ++k) {
          double av = arow[k];
          if (av == 0.0) continue;
          double* dbrow = db.row(k);
          for (int j = 0; j < d.cols; ++j) dbrow[j] += av * drow[j];
        }
      }
    }
  });
}

Graph::NodeId Graph::matmul_nt(NodeId a, NodeId b) {
  const Tensor& ta = nodes_[a].val;
  const Tensor& tb = nodes_[b].val;
  require(ta.cols == tb.cols, "matmul_nt: inner dimension mismatch");
  Tensor out(ta.rows, tb.rows);
  for (int i = 0; i < ta.rows; ++i)
    for (int j = 0; j < tb.rows; ++j) {
      double acc = 0.0;
      const double* arow = ta.row(i);
      const double* brow = tb.row(j);
      for (int k = 0; k < ta.cols; ++k) acc += arow[k] * brow[k];
      out.at(i, j) = acc;
    }
  bool ng = nodes_[a].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng, [a, b](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& va = g.nodes_[a].val;
    const Tensor& vb = g.nodes_[b].val;
    if (g.nodes_[a].needs_grad) {  // dA = d * B
      Tensor& da = g.ensure_grad(a);
      for (int i = 0; i < da.rows; ++i)
        for (int j = 0; j < vb.rows; ++j) {
          double dv = d.at(i, j);
          if (dv == 0.0) continue;
          const double* brow = vb.row(j);
          double* darow = da.row(i);
          for (int k = 0; k < da.cols; ++k) darow[k] += dv * brow[k];
        }
    }
    if (g.nodes_[b].needs_grad) {  // dB = d^T * A
      Tensor& db = g.ensure_grad(b);
      for (int i = 0; i < va.rows; ++i)
        for (int j = 0; j < db.rows; ++j) {
          double dv = d.at(i, j);
          if (dv == 0.0) continue;
          const double* arow = va.row(i);
          double* dbrow = db.row(j);
          for (int k = 0; k < db.cols; ++k) dbrow[k] += dv * arow[k];
        }
    }
  });
}

Graph::NodeId Graph::concat_rows(const std::vector<NodeId>& xs) {
  require(!xs.empty(), "concat_rows: empty input");
  int cols = nodes_[xs[0]].val.cols;
  int rows = 0;
  bool ng = false;
  for (NodeId x : xs) {
    require(nodes_[x].val.cols == cols, "concat_rows: column mismatch");
    rows += nodes_[x].val.rows;
    ng = ng || nodes_[x].needs_grad;
  }
  Tensor out(rows, cols);
  int r = 0;
  for (NodeId x : xs) {
    const Tensor& t = nodes_[x].val;
    std::copy(t.v.begin(), t.v.end(), out.row(r));
    r += t.rows;
  }
  return push(std::move(out), ng, [xs](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    int r = 0;
    for (NodeId x : xs) {
      const Tensor& t = g.nodes_[x].val;
      if (g.nodes_[x].needs_grad) {
        Tensor& dx = g.ensure_grad(x);
        for (int i = 0; i < t.rows; ++i)
          for (int c = 0; c < t.cols; ++c) dx.at(i, c) += d.at(r + i, c);
      }
      r += t.rows;
    }
  });
}

Graph::NodeId Graph::concat_cols(const std::vector<NodeId>& xs) {
  require(!xs.empty(), "concat_cols: empty input");
  int rows = nodes_[xs[0]].val.rows;
  int cols = 0;
  bool ng = false;
  for (NodeId x : xs) {
    require(nodes_[x].val.rows == rows, "concat_cols: row mismatch");
    cols += nodes_[x].val.cols;
    ng = ng || nodes_[x].needs_grad;
  }
  Tensor out(rows, cols);
  int c0 = 0;
  for (NodeId x : xs) {
    const Tensor& t = nodes_[x].val;
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < t.cols; ++c) out.at(r, c0 + c) = t.at(r, c);
    c0 += t.cols;
  }
  return push(std::move(out), ng, [xs](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    int c0 = 0;
    for (NodeId x : xs) {
      const Tensor& t = g.nodes_[x].val;
      if (g.nodes_[x].needs_grad) {
        Tensor& dx = g.ensure_grad(x);
        for (int r = 0; r < t.rows; ++r)
          for (int c = 0; c < t.cols; ++c) dx.at(r, c) += d.at(r, c0 + c);
      }
      c0 += t.cols;
    }
  });
}

Graph::NodeId Graph::slice_cols(NodeId a, int c0, int c1) {
  const Tensor& ta = nodes_[a].val;
  require(0 <= c0 && c0 < c1 && c1 <= ta.cols, "slice_cols: bad range");
  Tensor out(ta.rows, c1 - c0);
  for (int r = 0; r < ta.rows; ++r)
    for (int c = c0; c < c1; ++c) out.at(r, c - c0) = ta.at(r, c);
  return push(std::move(out), nodes_[a].needs_grad, [a, c0](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (int r = 0; r < d.rows; ++r)
      for (int c = 0; c < d.cols; ++c) da.at(r, c0 + c) += d.at(r, c);
  });
}

Graph::NodeId Graph::gather_rows(NodeId a, std::vector<int> idx) {
  const Tensor& ta = nodes_[a].val;
  for (int i : idx) require(0 <= i && i < ta.rows, "gather_rows: index out of range");
  Tensor out(static_cast<int>(idx.size()), ta.cols);
  for (std::size_t t = 0; t < idx.size(); ++t) {
    const double* src = ta.row(idx[t]);
    std::copy(src, src + ta.cols, out.row(static_cast<int>(t)));
  }
  return push(std::move(out), nodes_[a].needs_grad,
              [a, idx = std::move(idx)](Graph& g, int self) {
                const Tensor& d = g.nodes_[self].grad;
                if (!g.nodes_[a].needs_grad) return;
                Tensor& da = g.ensure_grad(a);
                for (std::size_t t = 0; t < idx.size(); ++t)
                  for (int c = 0; c < d.cols; ++c)
                    da.at(idx[t], c) += d.at(static_cast<int>(t), c);
              });
}

Graph::NodeId Graph::mean_rows(NodeId a) {
  const Tensor& ta = nodes_[a].val;
  require(ta.rows >= 1, "mean_rows: empty input");
  Tensor out(1, ta.cols);
  for (int r = 0; r < ta.rows; ++r)
    for (int c = 0; c < ta.cols; ++c) out.at(0, c) += ta.at(r, c);
  for (int c = 0; c < ta.cols; ++c) out.at(0, c) /= ta.rows;
  return push(std::move(out), nodes_[a].needs_grad, [a](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    double inv = 1.0 / da.rows;
    for (int r = 0; r < da.rows; ++r)
      for (int c = 0; c < da.cols; ++c) da.at(r, c) += inv * d.at(0, c);
  });
}

Graph::NodeId Graph::sum_all(NodeId a) {
  const Tensor& ta = nodes_[a].val;
  Tensor out(1, 1);
  for (double x : ta.v) out.v[0] += x;
  return push(std::move(out), nodes_[a].needs_grad, [a](Graph& g, int self) {
    double d = g.nodes_[self].grad.v[0];
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (auto& x : da.v) x += d;
  });
}

Graph::NodeId Graph::tanh_op(NodeId a) {
  Tensor out = nodes_[a].val;
  for (auto& x : out.v) x = std::tanh(x);
  return push(std::move(out), nodes_[a].needs_grad, [a](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& y = g.nodes_[self].val;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (std::size_t i = 0; i < d.v.size(); ++i)
      da.v[i] += d.v[i] * (1.0 - y.v[i] * y.v[i]);
  });
}

Graph::NodeId Graph::sigmoid(NodeId a) {
  Tensor out = nodes_[a].val;
  for (auto& x : out.v) x = 1.0 / (1.0 + std::exp(-x));
  return push(std::move(out), nodes_[a].needs_grad, [a](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& y = g.nodes_[self].val;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (std::size_t i = 0; i < d.v.size(); ++i)
      da.v[i] += d.v[i] * y.v[i] * (1.0 - y.v[i]);
  });
}

Graph::NodeId Graph::gelu(NodeId a) {
  Tensor out = nodes_[a].val;
  for (auto& x : out.v) x = gelu_fn(x);
  return push(std::move(out), nodes_[a].needs_grad, [a](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& x = g.nodes_[a].val;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (std::size_t i = 0; i < d.v.size(); ++i)
      da.v[i] += d.v[i] * gelu_grad(x.v[i]);
  });
}

Graph::NodeId Graph::softmax_rows(NodeId a) {
  const Tensor& ta = nodes_[a].val;
  Tensor out(ta.rows, ta.cols);
  for (int r = 0; r < ta.rows; ++r) {
    double m = ta.at(r, 0);
    for (int c = 1; c < ta.cols; ++c) m = std::max(m, ta.at(r, c));
    double z = 0.0;
    for (int c = 0; c < ta.cols; ++c) {
      out.at(r, c) = std::exp(ta.at(r, c) - m);
      z += out.at(r, c);
    }
    for (int c = 0; c < ta.cols; ++c) out.at(r, c) /= z;
  }
  return push(std::move(out), nodes_[a].needs_grad, [a](Graph& g, int self) {
    const Tensor& d = g.nodes_[self].grad;
    const Tensor& y = g.nodes_[self].val;
    if (!g.nodes_[a].needs_grad) return;
    Tensor& da = g.ensure_grad(a);
    for (int r = 0; r < d.rows; ++r) {
      double dot = 0.0;
      for (int c = 0; c < d.cols; ++c) dot += d.at(r, c) * y.at(r, c);
      for (int c = 0; c < d.cols; ++c)
        da.at(r, c) += y.at(r, c) * (d.at(r, c) - dot);
    }
  });
}

Graph::NodeId Graph::standardize_rows(NodeId a, double eps) {
  const Tensor& ta = nodes_[a].val;
  Tensor out(ta.rows, ta.cols);
  std::vector<double> inv_sigma(ta.rows);
  for (int r = 0; r < ta.rows; ++r) {
    double mu = 0.0;
    for (int c = 0; c < ta.cols; ++c) mu += ta.at(r, c);
    mu /= ta.cols;
    double var = 0.0;
    for (int c = 0; c < ta.cols; ++c) {
      double dv = ta.at(r, c) - mu;
      var += dv * dv;
    }
    var /= ta.cols;
    double inv = 1.0 / std::sqrt(var + eps);
    inv_sigma[r] = inv;
    for (int c = 0; c < ta.cols; ++c) out.at(r, c) = (ta.at(r, c) - mu) * inv;
  }
  return push(std::move(out), nodes_[a].needs_grad,
              [a, inv_sigma = std::move(inv_sigma)](Graph& g, int self) {
                const Tensor& d = g.nodes_[self].grad;
                const Tensor& y = g.nodes_[self].val;
                if (!g.nodes_[a].needs_grad) return;
                Tensor& da = g.ensure_grad(a);
                int n = d.cols;
                for (int r = 0; r < d.rows; ++r) {
                  double mean_d = 0.0, mean_dy = 0.0;
                  for (int c = 0; c < n; ++c) {
                    mean_d += d.at(r, c);
                    mean_dy += d.at(r, c) * y.at(r, c);
                  }
                  mean_d /= n;
                  mean_dy /= n;
                  for (int c = 0; c < n; ++c)
                    da.at(r, c) += inv_sigma[r] *
                                   (d.at(r, c) - mean_d - y.at(r, c) * mean_dy);
                }
              });
}

Graph::NodeId Graph::cln_combine(NodeId gain, NodeId bias, NodeId nrm) {
  const Tensor& tg = nodes_[gain].val;
  const Tensor& tb = nodes_[bias].val;
  const Tensor& tn = nodes_[nrm].val;
  require(tg.same_shape(tb) && tg.same_shape(tn), "cln_combine: shape mismatch");
  int m = tg.rows, d = tg.cols;
  Tensor out(m * m, d);
  for (int i = 0; i < m; ++i) {
    const double* grow = tg.row(i);
    const double* brow = tb.row(i);
    for (int j = 0; j < m; ++j) {
      const double* nrow = tn.row(j);
      double* orow = out.row(i * m + j);
      for (int c = 0; c < d; ++c) orow[c] = grow[c] * nrow[c] + brow[c];
    }
  }
  bool ng = nodes_[gain].needs_grad || nodes_[bias].needs_grad ||
            nodes_[nrm].needs_grad;
  return push(std::move(out), ng, [gain, bias, nrm, m, d](Graph& g, int self) {
    const Tensor& dout = g.nodes_[self].grad;
    const Tensor& tg = g.nodes_[gain].val;
    const Tensor& tn = g.nodes_[nrm].val;
    bool want_g = g.nodes_[gain].needs_grad;
    bool want_b = g.nodes_[bias].needs_grad;
    bool want_n = g.nodes_[nrm].needs_grad;
    Tensor* dg = want_g ? &g.ensure_grad(gain) : nullptr;
    Tensor* db = want_b ? &g.ensure_grad(bias) : nullptr;
    Tensor* dn = want_n ? &g.ensure_grad(nrm) : nullptr;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        const double* drow = dout.row(i * m + j);
        for (int c = 0; c < d; ++c) {
          double dv = drow[c];
          if (want_g) dg->at(i, c) += dv * tn.at(j, c);
          if (want_b) db->at(i, c) += dv;
          if (want_n) dn->at(j, c) += dv * tg.at(i, c);
        }
      }
  });
}

Graph::NodeId Graph::plane_inject(NodeId plane, NodeId feats,
                                  std::vector<std::pair<int, int>> cells,
                                  bool replace) {
  const Tensor& tp = nodes_[plane].val;
  const Tensor& tf = nodes_[feats].val;
  require(tf.cols == tp.cols, "plane_inject: feature dimension mismatch");
  for (auto& [k, cell] : cells) {
    require(0 <= k && k < tf.rows, "plane_inject: feature row out of range");
    require(0 <= cell && cell < tp.rows, "plane_inject: cell out of range");
  }
  Tensor out = tp;
  for (auto& [k, cell] : cells) {
    double* orow = out.row(cell);
    const double* frow = tf.row(k);
    if (replace)
      std::copy(frow, frow + tf.cols, orow);
    else
      for (int c = 0; c < tf.cols; ++c) orow[c] += frow[c];
  }
  bool ng = nodes_[plane].needs_grad || nodes_[feats].needs_grad;
  return push(std::move(out), ng,
              [plane, feats, cells = std::move(cells), replace](Graph& g, int self) {
                const Tensor& d = g.nodes_[self].grad;
                if (g.nodes_[feats].needs_grad) {
                  Tensor& df = g.ensure_grad(feats);
                  for (auto& [k, cell] : cells)
                    for (int c = 0; c < d.cols; ++c)
                      df.at(k, c) += d.at(cell, c);
                }
                if (g.nodes_[plane].needs_grad) {
                  Tensor& dp = g.ensure_grad(plane);
                  if (replace) {
                    Tensor masked = d;
                    for (auto& [k, cell] : cells) {
                      (void)k;
                      double* row = masked.row(cell);
                      std::fill(row, row + masked.cols, 0.0);
                    }
                    for (std::size_t i = 0; i < dp.v.size(); ++i)
                      dp.v[i] += masked.v[i];
                  } else {
                    for (std::size_t i = 0; i < dp.v.size(); ++i)
                      dp.v[i] += d.v[i];
                  }
                }
              });
}

Graph::NodeId Graph::conv2d(NodeId x, NodeId w, NodeId b, int m, int dilation) {
  const Tensor& tx = nodes_[x].val;
  const Tensor& tw = nodes_[w].val;
  const Tensor& tb = nodes_[b].val;
  require(m >= 1 && tx.rows == m * m, "conv2d: bad spatial extent");
  require(dilation >= 1, "conv2d: dilation must be positive");
  int cin = tx.cols;
  require(tw.rows == 9 * cin, "conv2d: kernel layout mismatch");
  int cout = tw.cols;
  require(tb.rows == 1 && tb.cols == cout, "conv2d: bias shape mismatch");

  Tensor out(m * m, cout);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      double* orow = out.row(i * m + j);
      for (int oc = 0; oc < cout; ++oc) orow[oc] = tb.at(0, oc);
      for (int ki = 0; ki < 3; ++ki) {
        int ii = i + (ki - 1) * dilation;
        if (ii < 0 || ii >= m) continue;
        for (int kj = 0; kj < 3; ++kj) {
          int jj = j + (kj - 1) * dilation;
          if (jj < 0 || jj >= m) continue;
          const double* xrow = tx.row(ii * m + jj);
          const double* wbase = tw.row((ki * 3 + kj) * cin);
          for (int ic = 0; ic < cin; ++ic) {
            double xv = xrow[ic];
            if (xv == 0.0) continue;
            const double* wrow = wbase + static_cast<std::size_t>(ic) * cout;
            for (int oc = 0; oc < cout; ++oc) orow[oc] += xv * wrow[oc];
          }
        }
      }
    }

  bool ng = nodes_[x].needs_grad || nodes_[w].needs_grad || nodes_[b].needs_grad;
  return push(std::move(out), ng,
              [x, w, b, m, dilation, cin, cout](Graph& g, int self) {
                const Tensor& d = g.nodes_[self].grad;
                const Tensor& tx = g.nodes_[x].val;
                const Tensor& tw = g.nodes_[w].val;
                bool want_x = g.nodes_[x].needs_grad;
                bool want_w = g.nodes_[w].needs_grad;
                bool want_b = g.nodes_[b].needs_grad;
                Tensor* dx = want_x ? &g.ensure_grad(x) : nullptr;
                Tensor* dw = want_w ? &g.ensure_grad(w) : nullptr;
                Tensor* db = want_b ? &g.ensure_grad(b) : nullptr;
                for (int i = 0; i < m; ++i)
                  for (int j = 0; j < m; ++j) {
                    const double* drow = d.row(i * m + j);
                    if (want_b)
                      for (int oc = 0; oc < cout; ++oc)
                        db->at(0, oc) += drow[oc];
                    for (int ki = 0; ki < 3; ++ki) {
                      int ii = i + (ki - 1) * dilation;
                      if (ii < 0 || ii >= m) continue;
                      for (int kj = 0; kj < 3; ++kj) {
                        int jj = j + (kj - 1) * dilation;
                        if (jj < 0 || jj >= m) continue;
                        const double* xrow = tx.row(ii * m + jj);
                        for (int ic = 0; ic < cin; ++ic) {
                          const double* wrow =
                              tw.row((ki * 3 + kj) * cin) +
                              static_cast<std::size_t>(ic) * cout;
                          if (want_x) {
                            double acc = 0.0;
                            for (int oc = 0; oc < cout; ++oc)
                              acc += drow[oc] * wrow[oc];
                            dx->at(ii * m + jj, ic) += acc;
                          }
                          if (want_w) {
                            double xv = xrow[ic];
                            if (xv != 0.0) {
                              double* dwrow =
                                  dw->row((ki * 3 + kj) * cin) +
                                  static_cast<std::size_t>(ic) * cout;
                              for (int oc = 0; oc < cout; ++oc)
                                dwrow[oc] += xv * drow[oc];
                            }
                          }
                        }
                      }
                    }
                  }
              });
}

Graph::NodeId Graph::maxpool_rows(NodeId a) {
  const Tensor& ta = nodes_[a].val;
  require(ta.rows >= 1, "maxpool_rows: empty input");
  Tensor out(1, ta.cols);
  std::vector<int> argmax(ta.cols, 0);
  for (int c = 0; c < ta.cols; ++c) {
    double best = ta.at(0, c);
    int arg = 0;
    for (int r = 1; r < ta.rows; ++r)
      if (ta.at(r, c) > best) {
        best = ta.at(r, c);
        arg = r;
      }
    out.at(0, c) = best;
    argmax[c] = arg;
  }
  return push(std::move(out), nodes_[a].needs_grad,
              [a, argmax = std::move(argmax)](Graph& g, int self) {
                const Tensor& d = g.nodes_[self].grad;
                if (!g.nodes_[a].needs_grad) return;
                Tensor& da = g.ensure_grad(a);
                for (int c = 0; c < d.cols; ++c)
                  da.at(argmax[c], c) += d.at(0, c);
              });
}

Graph::NodeId Graph::cross_entropy_logits(NodeId logits, int gold) {
  const Tensor& tl = nodes_[logits].val;
  require(tl.rows == 1, "cross_entropy_logits: logits must be 1 x K");
  require(0 <= gold && gold < tl.cols, "cross_entropy_logits: gold out of range");
  double m = tl.at(0, 0);
  for (int c = 1; c < tl.cols; ++c) m = std::max(m, tl.at(0, c));
  double z = 0.0;
  for (int c = 0; c < tl.cols; ++c) z += std::exp(tl.at(0, c) - m);
  double lse = m + std::log(z);
  Tensor out(1, 1);
  out.v[0] = lse - tl.at(0, gold);
  return push(std::move(out), nodes_[logits].needs_grad,
              [logits, gold, lse](Graph& g, int self) {
                double d = g.nodes_[self].grad.v[0];
                if (!g.nodes_[logits].needs_grad) return;
                const Tensor& tl = g.nodes_[logits].val;
                Tensor& dl = g.ensure_grad(logits);
                for (int c = 0; c < tl.cols; ++c) {
                  double p = std::exp(tl.at(0, c) - lse);
                  dl.at(0, c) += d * (p - (c == gold ? 1.0 : 0.0));
                }
              });
}

Graph::NodeId Graph::dropout(NodeId a, double rate, Rng& rng) {
  if (rate <= 0.0) return a;
  require(rate < 1.0, "dropout: rate must be below 1");
  const Tensor& ta = nodes_[a].val;
  double keep = 1.0 - rate;
  Tensor mask(ta.rows, ta.cols);
  for (auto& x : mask.v) x = (rng.uniform() < keep) ? 1.0 / keep : 0.0;
  Tensor out = ta;
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] *= mask.v[i];
  return push(std::move(out), nodes_[a].needs_grad,
              [a, mask = std::move(mask)](Graph& g, int self) {
                const Tensor& d = g.nodes_[self].grad;
                if (!g.nodes_[a].needs_grad) return;
                Tensor& da = g.ensure_grad(a);
                for (std::size_t i = 0; i < d.v.size(); ++i)
                  da.v[i] += d.v[i] * mask.v[i];
              });
}

}  // namespace relplane
