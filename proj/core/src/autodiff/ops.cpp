#include "sst/autodiff/ops.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "sst/error.hpp"

namespace sst::ad {
namespace {

Graph& same_graph(std::string_view op, Var a, Var b) {
  if (!a.valid() || !b.valid() || a.graph() != b.graph()) {
    throw Error(std::string(op) + ": operands are not on the same graph");
  }
  return *a.graph();
}

Graph& graph_of(std::string_view op, Var a) {
  if (!a.valid()) throw Error(std::string(op) + ": unbound operand");
  return *a.graph();
}

[[noreturn]] void shape_error(std::string_view op, const Tensor& a, const Tensor& b) {
  std::ostringstream os;
  os << op << ": shape mismatch [" << a.rows() << "x" << a.cols() << "] vs [" << b.rows() << "x"
     << b.cols() << "]";
  throw Error(os.str());
}

using Eigen::Index;

}  // namespace

Var matmul(Var a, Var b) {
  Graph& g = same_graph("matmul", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.rows()) shape_error("matmul", av, bv);
  Tensor out = Tensor::matrix(av.rows(), bv.cols());
  out.mat().noalias() = av.mat() * bv.mat();
  const int ia = a.id(), ib = b.id();
  return g.record("matmul", std::move(out), {ia, ib}, [ia, ib](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    if (g.requires_grad(ia)) g.grad_accumulator(ia).mat().noalias() += dy * g.value_at(ib).mat().transpose();
    if (g.requires_grad(ib)) g.grad_accumulator(ib).mat().noalias() += g.value_at(ia).mat().transpose() * dy;
  });
}

Var matmul_nt(Var a, Var b) {
  Graph& g = same_graph("matmul_nt", a, b);
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.cols() != bv.cols()) shape_error("matmul_nt", av, bv);
  Tensor out = Tensor::matrix(av.rows(), bv.rows());
  out.mat().noalias() = av.mat() * bv.mat().transpose();
  const int ia = a.id(), ib = b.id();
  return g.record("matmul_nt", std::move(out), {ia, ib}, [ia, ib](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    if (g.requires_grad(ia)) g.grad_accumulator(ia).mat().noalias() += dy * g.value_at(ib).mat();
    if (g.requires_grad(ib)) g.grad_accumulator(ib).mat().noalias() += dy.transpose() * g.value_at(ia).mat();
  });
}

Var add(Var a, Var b) {
  Graph& g = same_graph("add", a, b);
  if (!a.value().same_shape(b.value())) shape_error("add", a.value(), b.value());
  Tensor out = a.value();
  out.mat() += b.value().mat();
  const int ia = a.id(), ib = b.id();
  return g.record("add", std::move(out), {ia, ib}, [ia, ib](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    if (g.requires_grad(ia)) g.grad_accumulator(ia).mat() += dy;
    if (g.requires_grad(ib)) g.grad_accumulator(ib).mat() += dy;
  });
}

Var sub(Var a, Var b) {
  Graph& g = same_graph("sub", a, b);
  if (!a.value().same_shape(b.value())) shape_error("sub", a.value(), b.value());
  Tensor out = a.value();
  out.mat() -= b.value().mat();
  const int ia = a.id(), ib = b.id();
  return g.record("sub", std::move(out), {ia, ib}, [ia, ib](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    if (g.requires_grad(ia)) g.grad_accumulator(ia).mat() += dy;
    if (g.requires_grad(ib)) g.grad_accumulator(ib).mat() -= dy;
  });
}

Var mul(Var a, Var b) {
  Graph& g = same_graph("mul", a, b);
  if (!a.value().same_shape(b.value())) shape_error("mul", a.value(), b.value());
  Tensor out = a.value();
  out.mat().array() *= b.value().mat().array();
  const int ia = a.id(), ib = b.id();
  return g.record("mul", std::move(out), {ia, ib}, [ia, ib](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat().array();
    if (g.requires_grad(ia)) g.grad_accumulator(ia).mat().array() += dy * g.value_at(ib).mat().array();
    if (g.requires_grad(ib)) g.grad_accumulator(ib).mat().array() += dy * g.value_at(ia).mat().array();
  });
}

Var add_row(Var a, Var row) {
  Graph& g = same_graph("add_row", a, row);
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  if (rv.rows() != 1 || rv.cols() != av.cols()) shape_error("add_row", av, rv);
  Tensor out = av;
  out.mat().rowwise() += rv.mat().row(0);
  const int ia = a.id(), ir = row.id();
  return g.record("add_row", std::move(out), {ia, ir}, [ia, ir](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    if (g.requires_grad(ia)) g.grad_accumulator(ia).mat() += dy;
    if (g.requires_grad(ir)) g.grad_accumulator(ir).mat() += dy.colwise().sum();
  });
}

Var mul_col(Var col, Var a) {
  Graph& g = same_graph("mul_col", col, a);
  const Tensor& cv = col.value();
  const Tensor& av = a.value();
  if (cv.cols() != 1 || cv.rows() != av.rows()) shape_error("mul_col", cv, av);
  Tensor out = av;
  for (std::size_t r = 0; r < av.rows(); ++r) out.mat().row(static_cast<Index>(r)) *= cv[r];
  const int ic = col.id(), ia = a.id();
  return g.record("mul_col", std::move(out), {ic, ia}, [ic, ia](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    if (g.requires_grad(ic)) {
      g.grad_accumulator(ic).mat() += (dy.array() * g.value_at(ia).mat().array()).rowwise().sum().matrix();
    }
    if (g.requires_grad(ia)) {
      const Tensor& cv = g.value_at(ic);
      auto da = g.grad_accumulator(ia).mat();
      for (Index r = 0; r < da.rows(); ++r) da.row(r) += cv[static_cast<std::size_t>(r)] * dy.row(r);
    }
  });
}

Var repeat_rows(Var row, std::size_t n) {
  Graph& g = graph_of("repeat_rows", row);
  const Tensor& rv = row.value();
  if (rv.rows() != 1) throw Error("repeat_rows: input must be a single row");
  Tensor out = Tensor::matrix(n, rv.cols());
  out.mat().rowwise() = rv.mat().row(0);
  const int ir = row.id();
  return g.record("repeat_rows", std::move(out), {ir}, [ir](Graph& g, int self) {
    g.grad_accumulator(ir).mat() += g.grad_at(self).mat().colwise().sum();
  });
}

Var scale(Var a, double factor) {
  Graph& g = graph_of("scale", a);
  Tensor out = a.value();
  out.mat() *= factor;
  const int ia = a.id();
  return g.record("scale", std::move(out), {ia}, [ia, factor](Graph& g, int self) {
    g.grad_accumulator(ia).mat() += factor * g.grad_at(self).mat();
  });
}

Var add_constant(Var a, const Tensor& c) {
  Graph& g = graph_of("add_constant", a);
  if (!a.value().same_shape(c)) shape_error("add_constant", a.value(), c);
  Tensor out = a.value();
  out.mat() += c.mat();
  const int ia = a.id();
  return g.record("add_constant", std::move(out), {ia}, [ia](Graph& g, int self) {
    g.grad_accumulator(ia).mat() += g.grad_at(self).mat();
  });
}

Var relu(Var a) {
  Graph& g = graph_of("relu", a);
  Tensor out = a.value();
  out.mat() = out.mat().cwiseMax(0.0);
  const int ia = a.id();
  return g.record("relu", std::move(out), {ia}, [ia](Graph& g, int self) {
    const auto x = g.value_at(ia).mat().array();
    g.grad_accumulator(ia).mat().array() += (x > 0.0).select(g.grad_at(self).mat().array(), 0.0);
  });
}

Var gelu(Var a) {
  Graph& g = graph_of("gelu", a);
  Tensor out = a.value();
  for (double& v : out.values()) v = 0.5 * v * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0));
  const int ia = a.id();
  return g.record("gelu", std::move(out), {ia}, [ia](Graph& g, int self) {
    const Tensor& x = g.value_at(ia);
    const Tensor& dy = g.grad_at(self);
    Tensor& dx = g.grad_accumulator(ia);
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double v = x[i];
      const double cdf = 0.5 * (1.0 + std::erf(v * std::numbers::sqrt2 / 2.0));
      const double pdf = inv_sqrt_2pi * std::exp(-0.5 * v * v);
      dx[i] += dy[i] * (cdf + v * pdf);
    }
  });
}

Var exp(Var a) {
  Graph& g = graph_of("exp", a);
  Tensor out = a.value();
  out.mat() = out.mat().array().exp().matrix();
  const int ia = a.id();
  return g.record("exp", std::move(out), {ia}, [ia](Graph& g, int self) {
    g.grad_accumulator(ia).mat().array() += g.grad_at(self).mat().array() * g.value_at(self).mat().array();
  });
}

Var log_sigmoid(Var a) {
  Graph& g = graph_of("log_sigmoid", a);
  Tensor out = a.value();
  for (double& v : out.values()) v = -(std::max(-v, 0.0) + std::log1p(std::exp(-std::abs(v))));
  const int ia = a.id();
  return g.record("log_sigmoid", std::move(out), {ia}, [ia](Graph& g, int self) {
    const Tensor& x = g.value_at(ia);
    const Tensor& dy = g.grad_at(self);
    Tensor& dx = g.grad_accumulator(ia);
    for (std::size_t i = 0; i < x.size(); ++i) dx[i] += dy[i] / (1.0 + std::exp(x[i]));
  });
}

Var softmax_rows(Var a) {
  Graph& g = graph_of("softmax", a);
  Tensor out = a.value();
  auto m = out.mat();
  for (Index r = 0; r < m.rows(); ++r) {
    const double mx = m.row(r).maxCoeff();
    m.row(r) = (m.row(r).array() - mx).exp().matrix();
    m.row(r) /= m.row(r).sum();
  }
  const int ia = a.id();
  return g.record("softmax", std::move(out), {ia}, [ia](Graph& g, int self) {
    const auto y = g.value_at(self).mat();
    const auto dy = g.grad_at(self).mat();
    auto dx = g.grad_accumulator(ia).mat();
    for (Index r = 0; r < y.rows(); ++r) {
      const double dot = y.row(r).dot(dy.row(r));
      dx.row(r).array() += y.row(r).array() * (dy.row(r).array() - dot);
    }
  });
}

Var log_softmax_rows(Var a) {
  Graph& g = graph_of("log_softmax", a);
  Tensor out = a.value();
  auto m = out.mat();
  for (Index r = 0; r < m.rows(); ++r) {
    const double mx = m.row(r).maxCoeff();
    const double lse = mx + std::log((m.row(r).array() - mx).exp().sum());
    m.row(r).array() -= lse;
  }
  const int ia = a.id();
  return g.record("log_softmax", std::move(out), {ia}, [ia](Graph& g, int self) {
    const auto y = g.value_at(self).mat();
    const auto dy = g.grad_at(self).mat();
    auto dx = g.grad_accumulator(ia).mat();
    for (Index r = 0; r < y.rows(); ++r) {
      const double total = dy.row(r).sum();
      dx.row(r).array() += dy.row(r).array() - y.row(r).array().exp() * total;
    }
  });
}

Var layer_norm(Var x, Var gain, Var bias, double eps) {
  Graph& g = same_graph("layer_norm", x, gain);
  same_graph("layer_norm", x, bias);
  const Tensor& xv = x.value();
  const std::size_t n = xv.rows(), d = xv.cols();
  if (gain.value().rows() != 1 || gain.value().cols() != d) shape_error("layer_norm", xv, gain.value());
  if (bias.value().rows() != 1 || bias.value().cols() != d) shape_error("layer_norm", xv, bias.value());
  Tensor xhat = Tensor::matrix(n, d);
  Tensor inv_std = Tensor::matrix(n, 1);
  for (Index r = 0; r < static_cast<Index>(n); ++r) {
    const auto row = xv.mat().row(r);
    const double mu = row.mean();
    const double var = (row.array() - mu).square().mean();
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[static_cast<std::size_t>(r)] = is;
    xhat.mat().row(r) = (row.array() - mu) * is;
  }
  Tensor out = xhat;
  out.mat().array().rowwise() *= gain.value().mat().row(0).array();
  out.mat().rowwise() += bias.value().mat().row(0);
  const int ix = x.id(), ig = gain.id(), ib = bias.id();
  return g.record(
      "layer_norm", std::move(out), {ix, ig, ib},
      [ix, ig, ib, xhat = std::move(xhat), inv_std = std::move(inv_std)](Graph& g, int self) {
        const auto dy = g.grad_at(self).mat();
        const auto xh = xhat.mat();
        if (g.requires_grad(ig)) g.grad_accumulator(ig).mat() += (dy.array() * xh.array()).colwise().sum().matrix();
        if (g.requires_grad(ib)) g.grad_accumulator(ib).mat() += dy.colwise().sum();
        if (g.requires_grad(ix)) {
          const auto gv = g.value_at(ig).mat().row(0).array();
          auto dx = g.grad_accumulator(ix).mat();
          for (Index r = 0; r < dy.rows(); ++r) {
            const Eigen::ArrayXd dxh = (dy.row(r).array() * gv).transpose();
            const Eigen::ArrayXd xr = xh.row(r).array().transpose();
            const double m1 = dxh.mean();
            const double m2 = (dxh * xr).mean();
            dx.row(r).array() += ((dxh - m1 - xr * m2) * inv_std[static_cast<std::size_t>(r)]).transpose();
          }
        }
      });
}

Var embedding(Var table, std::span<const int> ids) {
  Graph& g = graph_of("embedding", table);
  const Tensor& tv = table.value();
  Tensor out = Tensor::matrix(ids.size(), tv.cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || static_cast<std::size_t>(ids[i]) >= tv.rows()) {
      throw Error("embedding: id " + std::to_string(ids[i]) + " out of range for table with " +
                  std::to_string(tv.rows()) + " rows");
    }
    out.mat().row(static_cast<Index>(i)) = tv.mat().row(ids[i]);
  }
  const int it = table.id();
  return g.record("embedding", std::move(out), {it},
                  [it, ids = std::vector<int>(ids.begin(), ids.end())](Graph& g, int self) {
                    const auto dy = g.grad_at(self).mat();
                    auto dt = g.grad_accumulator(it).mat();
                    for (std::size_t i = 0; i < ids.size(); ++i) dt.row(ids[i]) += dy.row(static_cast<Index>(i));
                  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw Error("concat_cols: no inputs");
  Graph& g = graph_of("concat_cols", parts[0]);
  const std::size_t n = parts[0].rows();
  std::size_t total = 0;
  std::vector<int> ids;
  std::vector<std::size_t> widths;
  for (Var p : parts) {
    same_graph("concat_cols", parts[0], p);
    if (p.rows() != n) shape_error("concat_cols", parts[0].value(), p.value());
    ids.push_back(p.id());
    widths.push_back(p.cols());
    total += p.cols();
  }
  Tensor out = Tensor::matrix(n, total);
  std::size_t off = 0;
  for (Var p : parts) {
    out.mat().middleCols(static_cast<Index>(off), static_cast<Index>(p.cols())) = p.value().mat();
    off += p.cols();
  }
  return g.record("concat_cols", std::move(out), ids, [ids, widths](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    std::size_t off = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (g.requires_grad(ids[i])) {
        g.grad_accumulator(ids[i]).mat() += dy.middleCols(static_cast<Index>(off), static_cast<Index>(widths[i]));
      }
      off += widths[i];
    }
  });
}

Var slice_cols(Var a, std::size_t start, std::size_t count) {
  Graph& g = graph_of("slice_cols", a);
  const Tensor& av = a.value();
  if (start + count > av.cols()) throw Error("slice_cols: range exceeds input width");
  Tensor out = Tensor::matrix(av.rows(), count);
  out.mat() = av.mat().middleCols(static_cast<Index>(start), static_cast<Index>(count));
  const int ia = a.id();
  return g.record("slice_cols", std::move(out), {ia}, [ia, start, count](Graph& g, int self) {
    g.grad_accumulator(ia).mat().middleCols(static_cast<Index>(start), static_cast<Index>(count)) +=
        g.grad_at(self).mat();
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw Error("concat_rows: no inputs");
  Graph& g = graph_of("concat_rows", parts[0]);
  const std::size_t m = parts[0].cols();
  std::size_t total = 0;
  std::vector<int> ids;
  std::vector<std::size_t> heights;
  for (Var p : parts) {
    same_graph("concat_rows", parts[0], p);
    if (p.cols() != m) shape_error("concat_rows", parts[0].value(), p.value());
    ids.push_back(p.id());
    heights.push_back(p.rows());
    total += p.rows();
  }
  Tensor out = Tensor::matrix(total, m);
  std::size_t off = 0;
  for (Var p : parts) {
    out.mat().middleRows(static_cast<Index>(off), static_cast<Index>(p.rows())) = p.value().mat();
    off += p.rows();
  }
  return g.record("concat_rows", std::move(out), ids, [ids, heights](Graph& g, int self) {
    const auto dy = g.grad_at(self).mat();
    std::size_t off = 0;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (g.requires_grad(ids[i])) {
        g.grad_accumulator(ids[i]).mat() += dy.middleRows(static_cast<Index>(off), static_cast<Index>(heights[i]));
      }
      off += heights[i];
    }
  });
}

Var slice_rows(Var a, std::size_t start, std::size_t count) {
  Graph& g = graph_of("slice_rows", a);
  const Tensor& av = a.value();
  if (start + count > av.rows()) throw Error("slice_rows: range exceeds input height");
  Tensor out = Tensor::matrix(count, av.cols());
  out.mat() = av.mat().middleRows(static_cast<Index>(start), static_cast<Index>(count));
  const int ia = a.id();
  return g.record("slice_rows", std::move(out), {ia}, [ia, start, count](Graph& g, int self) {
    g.grad_accumulator(ia).mat().middleRows(static_cast<Index>(start), static_cast<Index>(count)) +=
        g.grad_at(self).mat();
  });
}

Var gather_rows(Var a, std::span<const int> rows) {
  Graph& g = graph_of("gather_rows", a);
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(rows.size(), av.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] < 0 || static_cast<std::size_t>(rows[i]) >= av.rows()) {
      throw Error("gather_rows: row " + std::to_string(rows[i]) + " out of range");
    }
    out.mat().row(static_cast<Index>(i)) = av.mat().row(rows[i]);
  }
  const int ia = a.id();
  return g.record("gather_rows", std::move(out), {ia},
                  [ia, rows = std::vector<int>(rows.begin(), rows.end())](Graph& g, int self) {
                    const auto dy = g.grad_at(self).mat();
                    auto dx = g.grad_accumulator(ia).mat();
                    for (std::size_t i = 0; i < rows.size(); ++i) dx.row(rows[i]) += dy.row(static_cast<Index>(i));
                  });
}

Var mean_rows(Var a) {
  Graph& g = graph_of("mean_rows", a);
  const Tensor& av = a.value();
  if (av.rows() == 0) throw Error("mean_rows: empty input");
  Tensor out = Tensor::matrix(1, av.cols());
  out.mat() = av.mat().colwise().mean();
  const int ia = a.id();
  return g.record("mean_rows", std::move(out), {ia}, [ia](Graph& g, int self) {
    auto dx = g.grad_accumulator(ia).mat();
    const double inv = 1.0 / static_cast<double>(dx.rows());
    dx.rowwise() += inv * g.grad_at(self).mat().row(0);
  });
}

Var sum_cols(Var a) {
  Graph& g = graph_of("sum_cols", a);
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(av.rows(), 1);
  out.mat() = av.mat().rowwise().sum();
  const int ia = a.id();
  return g.record("sum_cols", std::move(out), {ia}, [ia](Graph& g, int self) {
    auto dx = g.grad_accumulator(ia).mat();
    const auto dy = g.grad_at(self).mat();
    dx.colwise() += dy.col(0);
  });
}

Var sum(Var a) {
  Graph& g = graph_of("sum", a);
  Tensor out = Tensor::scalar(a.value().mat().sum());
  const int ia = a.id();
  return g.record("sum", std::move(out), {ia}, [ia](Graph& g, int self) {
    g.grad_accumulator(ia).mat().array() += g.grad_at(self)[0];
  });
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw Error("mean: empty input");
  return scale(sum(a), 1.0 / static_cast<double>(n));
}

Var pick(Var a, std::span<const int> cols) {
  Graph& g = graph_of("pick", a);
  const Tensor& av = a.value();
  if (cols.size() != av.rows()) throw Error("pick: need one column index per row");
  Tensor out = Tensor::matrix(av.rows(), 1);
  for (std::size_t r = 0; r < av.rows(); ++r) {
    if (cols[r] < 0 || static_cast<std::size_t>(cols[r]) >= av.cols()) {
      throw Error("pick: column " + std::to_string(cols[r]) + " out of range");
    }
    out[r] = av(r, static_cast<std::size_t>(cols[r]));
  }
  const int ia = a.id();
  return g.record("pick", std::move(out), {ia},
                  [ia, cols = std::vector<int>(cols.begin(), cols.end())](Graph& g, int self) {
                    const Tensor& dy = g.grad_at(self);
                    Tensor& dx = g.grad_accumulator(ia);
                    for (std::size_t r = 0; r < cols.size(); ++r) dx(r, static_cast<std::size_t>(cols[r])) += dy[r];
                  });
}

Var gather_cols(Var a, std::span<const int> cols) {
  Graph& g = graph_of("gather_cols", a);
  const Tensor& av = a.value();
  Tensor out = Tensor::matrix(av.rows(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j] < 0 || static_cast<std::size_t>(cols[j]) >= av.cols()) {
      throw Error("gather_cols: column " + std::to_string(cols[j]) + " out of range");
    }
    out.mat().col(static_cast<Index>(j)) = av.mat().col(cols[j]);
  }
  const int ia = a.id();
  return g.record("gather_cols", std::move(out), {ia},
                  [ia, cols = std::vector<int>(cols.begin(), cols.end())](Graph& g, int self) {
                    const auto dy = g.grad_at(self).mat();
                    auto dx = g.grad_accumulator(ia).mat();
                    for (std::size_t j = 0; j < cols.size(); ++j) dx.col(cols[j]) += dy.col(static_cast<Index>(j));
                  });
}

Var row_min(Var a) {
  Graph& g = graph_of("row_min", a);
  const Tensor& av = a.value();
  if (av.cols() == 0) throw Error("row_min: empty rows");
  Tensor out = Tensor::matrix(av.rows(), 1);
  std::vector<std::size_t> arg(av.rows());
  for (std::size_t r = 0; r < av.rows(); ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < av.cols(); ++c) {
      if (av(r, c) < av(r, best)) best = c;
    }
    arg[r] = best;
    out[r] = av(r, best);
  }
  const int ia = a.id();
  return g.record("row_min", std::move(out), {ia}, [ia, arg = std::move(arg)](Graph& g, int self) {
    const Tensor& dy = g.grad_at(self);
    Tensor& dx = g.grad_accumulator(ia);
    for (std::size_t r = 0; r < arg.size(); ++r) dx(r, arg[r]) += dy[r];
  });
}

Var attention(Var q, Var k, Var v, const Tensor* mask) {
  if (q.cols() != k.cols()) shape_error("attention(q,k)", q.value(), k.value());
  if (k.rows() != v.rows()) shape_error("attention(k,v)", k.value(), v.value());
  Var scores = scale(matmul_nt(q, k), 1.0 / std::sqrt(static_cast<double>(q.cols())));
  if (mask != nullptr) scores = add_constant(scores, *mask);
  return matmul(softmax_rows(scores), v);
}

Var cross_entropy(Var logits, std::span<const int> targets, std::span<const double> weights) {
  Graph& g = graph_of("cross_entropy", logits);
  Var nll = pick(log_softmax_rows(logits), targets);
  if (!weights.empty()) {
    if (weights.size() != targets.size()) throw Error("cross_entropy: weight count mismatch");
    Tensor w = Tensor::matrix(weights.size(), 1);
    std::copy(weights.begin(), weights.end(), w.values().begin());
    nll = mul(nll, g.constant(std::move(w), "ce_weights"));
  }
  return scale(sum(nll), -1.0);
}

Var bce_with_logits(Var logits, const Tensor& targets) {
  Graph& g = graph_of("bce_with_logits", logits);
  const Tensor& x = logits.value();
  if (!x.same_shape(targets)) shape_error("bce_with_logits", x, targets);
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    total += std::max(v, 0.0) - v * targets[i] + std::log1p(std::exp(-std::abs(v)));
  }
  const double n = static_cast<double>(x.size());
  const int ix = logits.id();
  return g.record("bce_with_logits", Tensor::scalar(total / n), {ix},
                  [ix, targets, n](Graph& g, int self) {
                    const Tensor& x = g.value_at(ix);
                    Tensor& dx = g.grad_accumulator(ix);
                    const double dy = g.grad_at(self)[0];
                    for (std::size_t i = 0; i < x.size(); ++i) {
                      const double s = 1.0 / (1.0 + std::exp(-x[i]));
                      dx[i] += dy * (s - targets[i]) / n;
                    }
                  });
}

Var mse(Var prediction, const Tensor& target) {
  Graph& g = graph_of("mse", prediction);
  const Tensor& p = prediction.value();
  if (!p.same_shape(target)) shape_error("mse", p, target);
  const double n = static_cast<double>(p.size());
  const double total = (p.mat() - target.mat()).squaredNorm();
  const int ip = prediction.id();
  return g.record("mse", Tensor::scalar(total / n), {ip}, [ip, target, n](Graph& g, int self) {
    const double dy = g.grad_at(self)[0];
    g.grad_accumulator(ip).mat() += (2.0 * dy / n) * (g.value_at(ip).mat() - target.mat());
  });
}

}  // namespace sst::ad
