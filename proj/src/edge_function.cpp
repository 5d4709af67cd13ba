#include "mgt/edge_function.hpp"

#include <algorithm>
#include <cmath>

#include "mgt/poly.hpp"

namespace mgt {

EdgeFunction EdgeFunction::poly(GraphPtr g, std::vector<std::vector<double>> coeffs) {
  if (static_cast<int>(coeffs.size()) != g->edge_count())
    fail(errc::bad_document, "poly data must cover every edge exactly once");
  for (auto& c : coeffs) {
    if (c.empty()) c = {0.0};
    if (static_cast<int>(c.size()) > kMaxPolyDegree + 1)
      fail(errc::bad_document, "polynomial degree exceeds cap " + std::to_string(kMaxPolyDegree));
  }
  return EdgeFunction(std::move(g), Rep::poly, std::move(coeffs));
}

EdgeFunction EdgeFunction::sampled(GraphPtr g, std::vector<std::vector<double>> values) {
  if (static_cast<int>(values.size()) != g->edge_count())
    fail(errc::bad_document, "sample data must cover every edge exactly once");
  size_t n = values.empty() ? 0 : values.front().size();
  if (n < 2) fail(errc::bad_document, "sampled representation needs at least 2 samples per edge");
  for (auto& v : values)
    if (v.size() != n) fail(errc::bad_document, "sample count must be uniform across edges");
  return EdgeFunction(std::move(g), Rep::sampled, std::move(values));
}

EdgeFunction EdgeFunction::constant(GraphPtr g, double value, Rep rep, int n) {
  int ne = g->edge_count();
  std::vector<std::vector<double>> data(ne);
  for (auto& d : data) d = rep == Rep::poly ? std::vector<double>{value} : std::vector<double>(n + 1, value);
  return EdgeFunction(std::move(g), rep, std::move(data));
}

EdgeFunction EdgeFunction::edge_constants(GraphPtr g, const std::vector<double>& values, Rep rep, int n) {
  if (static_cast<int>(values.size()) != g->edge_count()) fail(errc::dimension_mismatch, "edge constant vector length");
  std::vector<std::vector<double>> data(values.size());
  for (size_t e = 0; e < values.size(); ++e)
    data[e] = rep == Rep::poly ? std::vector<double>{values[e]} : std::vector<double>(n + 1, values[e]);
  return EdgeFunction(std::move(g), rep, std::move(data));
}

double EdgeFunction::eval(int e, double x) const {
  const auto& d = data_[e];
  if (rep_ == Rep::poly) return poly::eval(d, x);
  int n = static_cast<int>(d.size()) - 1;
  double t = x * n;
  int k = std::clamp(static_cast<int>(std::floor(t)), 0, n - 1);
  double s = t - k;
  return d[k] * (1.0 - s) + d[k + 1] * s;
}

double EdgeFunction::value0(int e) const { return rep_ == Rep::poly ? data_[e].front() : data_[e].front(); }

double EdgeFunction::value1(int e) const {
  return rep_ == Rep::poly ? poly::eval(data_[e], 1.0) : data_[e].back();
}

double EdgeFunction::mean(int e) const {
  const auto& d = data_[e];
  if (rep_ == Rep::poly) return poly::integral01(d);
  int n = static_cast<int>(d.size()) - 1;
  double s = 0.5 * (d.front() + d.back());
  for (int k = 1; k < n; ++k) s += d[k];
  return s / n;
}

EdgeFunction EdgeFunction::derivative() const {
  std::vector<std::vector<double>> out(data_.size());
  if (rep_ == Rep::poly) {
    for (size_t e = 0; e < data_.size(); ++e) out[e] = poly::derivative(data_[e]);
    return EdgeFunction(graph_, Rep::poly, std::move(out));
  }
  for (size_t e = 0; e < data_.size(); ++e) {
    const auto& d = data_[e];
    int n = static_cast<int>(d.size()) - 1;
    std::vector<double> g(n + 1);
    g[0] = (d[1] - d[0]) * n;
    g[n] = (d[n] - d[n - 1]) * n;
    for (int k = 1; k < n; ++k) g[k] = (d[k + 1] - d[k - 1]) * n / 2.0;
    out[e] = std::move(g);
  }
  return EdgeFunction(graph_, Rep::sampled, std::move(out));
}

EdgeFunction EdgeFunction::to_sampled(int n) const {
  if (rep_ == Rep::sampled && sample_cells() == n) return *this;
  std::vector<std::vector<double>> out(data_.size());
  for (size_t e = 0; e < data_.size(); ++e) {
    std::vector<double> v(n + 1);
    for (int k = 0; k <= n; ++k) v[k] = eval(static_cast<int>(e), double(k) / n);
    out[e] = std::move(v);
  }
  return EdgeFunction(graph_, Rep::sampled, std::move(out));
}

bool EdgeFunction::is_edge_constant(double tol) const {
  for (size_t e = 0; e < data_.size(); ++e) {
    const auto& d = data_[e];
    if (rep_ == Rep::poly) {
      for (size_t k = 1; k < d.size(); ++k)
        if (std::abs(d[k]) > tol) return false;
    } else {
      for (size_t k = 1; k < d.size(); ++k)
        if (std::abs(d[k] - d[0]) > tol) return false;
    }
  }
  return true;
}

std::vector<double> EdgeFunction::edge_constant_values() const {
  std::vector<double> v(data_.size());
  for (size_t e = 0; e < data_.size(); ++e) v[e] = data_[e][0];
  return v;
}

EdgeFunction& EdgeFunction::operator+=(const EdgeFunction& o) {
  require_same_graph(*this, o);
  require_same_rep(*this, o);
  for (size_t e = 0; e < data_.size(); ++e) {
    auto& a = data_[e];
    const auto& b = o.data_[e];
    if (rep_ == Rep::poly) {
      if (b.size() > a.size()) a.resize(b.size(), 0.0);
      for (size_t k = 0; k < b.size(); ++k) a[k] += b[k];
    } else {
      if (a.size() != b.size()) fail(errc::representation_mismatch, "sample counts differ");
      for (size_t k = 0; k < b.size(); ++k) a[k] += b[k];
    }
  }
  return *this;
}

EdgeFunction& EdgeFunction::operator-=(const EdgeFunction& o) {
  EdgeFunction neg = o;
  neg *= -1.0;
  return *this += neg;
}

EdgeFunction& EdgeFunction::operator*=(double s) {
  for (auto& d : data_)
    for (double& x : d) x *= s;
  return *this;
}

double EdgeFunction::max_abs_value() const {
  double m = 0.0;
  if (rep_ == Rep::sampled) {
    for (auto& d : data_)
      for (double x : d) m = std::max(m, std::abs(x));
    return m;
  }
  for (size_t e = 0; e < data_.size(); ++e)
    for (int k = 0; k <= 64; ++k) m = std::max(m, std::abs(eval(static_cast<int>(e), k / 64.0)));
  return m;
}

double EdgeFunction::min_sample_value() const {
  if (rep_ != Rep::sampled) fail(errc::representation_mismatch, "min_sample_value needs SAMPLED data");
  double m = data_[0][0];
  for (auto& d : data_)
    for (double x : d) m = std::min(m, x);
  return m;
}

nlohmann::ordered_json EdgeFunction::to_json() const {
  nlohmann::ordered_json j;
  j["representation"] = rep_ == Rep::poly ? "poly" : "sampled";
  nlohmann::ordered_json edges;
  for (size_t e = 0; e < data_.size(); ++e) edges[graph_->edge(static_cast<int>(e)).id] = data_[e];
  j["edges"] = edges;
  return j;
}

EdgeFunction EdgeFunction::from_json(GraphPtr g, const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("representation") || !j.contains("edges"))
    fail(errc::bad_document, "edge function document needs 'representation' and 'edges'");
  std::string rep = j["representation"].get<std::string>();
  std::vector<std::vector<double>> data(g->edge_count());
  std::vector<char> seen(g->edge_count(), 0);
  for (auto& [eid, arr] : j["edges"].items()) {
    int e = g->edge_index(eid);
    data[e] = arr.get<std::vector<double>>();
    seen[e] = 1;
  }
  for (int e = 0; e < g->edge_count(); ++e)
    if (!seen[e]) fail(errc::bad_document, "edge '" + g->edge(e).id + "' missing from function document");
  if (rep == "poly") {
    for (const auto& c : data)
      if (static_cast<int>(c.size()) > kDefaultPolyDegree + 1)
        fail(errc::bad_document, "document polynomials are capped at degree " +
                                     std::to_string(kDefaultPolyDegree));
    return poly(std::move(g), std::move(data));
  }
  if (rep == "sampled") return sampled(std::move(g), std::move(data));
  fail(errc::bad_document, "unknown representation '" + rep + "'");
}

TraceMeanVector trace_mean(const EdgeFunction& f) {
  TraceMeanVector tm(f.graph()->edge_count());
  for (int e = 0; e < f.graph()->edge_count(); ++e) tm[e] = {f.value0(e), f.value1(e), f.mean(e)};
  return tm;
}

ContinuousFunction ContinuousFunction::interpolate(GraphPtr g, std::vector<double> vertex_values, Rep rep, int n) {
  if (static_cast<int>(vertex_values.size()) != g->vertex_count())
    fail(errc::dimension_mismatch, "vertex value vector length");
  std::vector<std::vector<double>> data(g->edge_count());
  for (int e = 0; e < g->edge_count(); ++e) {
    double a = vertex_values[g->edge(e).tail], b = vertex_values[g->edge(e).head];
    if (rep == Rep::poly) {
      data[e] = {a, b - a};
    } else {
      std::vector<double> v(n + 1);
      for (int k = 0; k <= n; ++k) v[k] = a + (b - a) * k / n;
      data[e] = std::move(v);
    }
  }
  EdgeFunction f = rep == Rep::poly ? EdgeFunction::poly(g, std::move(data)) : EdgeFunction::sampled(g, std::move(data));
  return attach(std::move(f), std::move(vertex_values));
}

ContinuousFunction ContinuousFunction::attach(EdgeFunction f, std::vector<double> vertex_values) {
  const auto& g = f.graph();
  if (static_cast<int>(vertex_values.size()) != g->vertex_count())
    fail(errc::dimension_mismatch, "vertex value vector length");
  for (int e = 0; e < g->edge_count(); ++e) {
    double d0 = vertex_values[g->edge(e).tail] - f.value0(e);
    double d1 = vertex_values[g->edge(e).head] - f.value1(e);
    auto& data = f.edge_data(e);
    if (f.rep() == Rep::poly) {
      if (data.size() < 2) data.resize(2, 0.0);
      data[0] += d0;
      data[1] += d1 - d0;
      // force bit-exact traces; the residual corrections are below roundoff
      data[0] = vertex_values[g->edge(e).tail] - (poly::eval(data, 0.0) - data[0]);
      for (int it = 0; it < 8; ++it) {
        double r1 = vertex_values[g->edge(e).head] - poly::eval(data, 1.0);
        if (r1 == 0.0) break;
        data[1] += r1;
      }
    } else {
      int n = static_cast<int>(data.size()) - 1;
      for (int k = 0; k <= n; ++k) data[k] += d0 + (d1 - d0) * k / n;
      data[0] = vertex_values[g->edge(e).tail];
      data[n] = vertex_values[g->edge(e).head];
    }
  }
  return ContinuousFunction(std::move(f), std::move(vertex_values));
}

double ContinuousFunction::max_trace_defect() const {
  const auto& g = f_.graph();
  double m = 0.0;
  for (int e = 0; e < g->edge_count(); ++e) {
    m = std::max(m, std::abs(f_.value0(e) - vertex_values_[g->edge(e).tail]));
    m = std::max(m, std::abs(f_.value1(e) - vertex_values_[g->edge(e).head]));
  }
  return m;
}

ContinuousFunction& ContinuousFunction::operator+=(const ContinuousFunction& o) {
  f_ += o.f_;
  for (size_t v = 0; v < vertex_values_.size(); ++v) vertex_values_[v] += o.vertex_values_[v];
  return *this;
}

ContinuousFunction& ContinuousFunction::operator*=(double s) {
  f_ *= s;
  for (double& v : vertex_values_) v *= s;
  return *this;
}

void require_same_graph(const EdgeFunction& a, const EdgeFunction& b) {
  if (a.graph().get() != b.graph().get()) fail(errc::graph_mismatch, "functions live on different graphs");
}

void require_same_rep(const EdgeFunction& a, const EdgeFunction& b) {
  if (a.rep() != b.rep()) fail(errc::representation_mismatch, "poly/sampled mix");
  if (a.rep() == Rep::sampled && a.sample_cells() != b.sample_cells())
    fail(errc::representation_mismatch, "sample counts differ");
}

double weighted_inner(const EdgeFunction& f1, const EdgeFunction& f2, const std::vector<double>& weights) {
  require_same_graph(f1, f2);
  require_same_rep(f1, f2);
  double s = 0.0;
  for (int e = 0; e < f1.graph()->edge_count(); ++e) {
    if (weights[e] == 0.0) continue;
    if (f1.rep() == Rep::poly) {
      s += weights[e] * poly::inner01(f1.edge_data(e), f2.edge_data(e));
    } else {
      const auto& a = f1.edge_data(e);
      const auto& b = f2.edge_data(e);
      int n = static_cast<int>(a.size()) - 1;
      double t = 0.5 * (a.front() * b.front() + a.back() * b.back());
      for (int k = 1; k < n; ++k) t += a[k] * b[k];
      s += weights[e] * t / n;
    }
  }
  return s;
}

double weighted_inner_consistent(const EdgeFunction& f1, const EdgeFunction& f2, const std::vector<double>& weights) {
  require_same_graph(f1, f2);
  require_same_rep(f1, f2);
  if (f1.rep() == Rep::poly) return weighted_inner(f1, f2, weights);
  double s = 0.0;
  for (int e = 0; e < f1.graph()->edge_count(); ++e) {
    if (weights[e] == 0.0) continue;
    const auto& a = f1.edge_data(e);
    const auto& b = f2.edge_data(e);
    int n = static_cast<int>(a.size()) - 1;
    double t = 0.0;
    for (int k = 0; k < n; ++k)
      t += 2.0 * a[k] * b[k] + a[k] * b[k + 1] + a[k + 1] * b[k] + 2.0 * a[k + 1] * b[k + 1];
    s += weights[e] * t / (6.0 * n);
  }
  return s;
}

double h_inner(const EdgeFunction& v1, const EdgeFunction& v2) {
  std::vector<double> c(v1.graph()->edge_count());
  for (int e = 0; e < v1.graph()->edge_count(); ++e) c[e] = v1.graph()->edge(e).conductance;
  return weighted_inner(v1, v2, c);
}

double field_pairing(const EdgeFunction& f, const ContinuousFunction& phi, const std::vector<double>& b) {
  require_same_graph(f, phi.edge_function());
  const auto& g = f.graph();
  double s = 0.0;
  for (int e = 0; e < g->edge_count(); ++e) {
    double w = g->edge(e).conductance * b[e];
    if (w == 0.0) continue;
    if (f.rep() == Rep::poly && phi.edge_function().rep() == Rep::poly) {
      s += w * poly::inner01(f.edge_data(e), poly::derivative(phi.edge_function().edge_data(e)));
    } else {
      // exact for piecewise-linear f against piecewise-linear phi
      EdgeFunction fs = f.rep() == Rep::sampled ? f : f.to_sampled(kDefaultSamples);
      const auto& a = fs.edge_data(e);
      int n = static_cast<int>(a.size()) - 1;
      double t = 0.0;
      for (int k = 0; k < n; ++k) {
        double dphi = phi.eval(e, double(k + 1) / n) - phi.eval(e, double(k) / n);
        t += 0.5 * (a[k] + a[k + 1]) * dphi;
      }
      s += w * t;
    }
  }
  return s;
}

double dirichlet_energy(const ContinuousFunction& f) {
  const auto& g = f.graph();
  double s = 0.0;
  for (int e = 0; e < g->edge_count(); ++e) {
    double c = g->edge(e).conductance;
    if (f.edge_function().rep() == Rep::poly) {
      auto d = poly::derivative(f.edge_function().edge_data(e));
      s += c * poly::inner01(d, d);
    } else {
      const auto& a = f.edge_function().edge_data(e);
      int n = static_cast<int>(a.size()) - 1;
      double t = 0.0;
      for (int k = 0; k < n; ++k) {
        double d = (a[k + 1] - a[k]) * n;
        t += d * d / n;
      }
      s += c * t;
    }
  }
  return s;
}

}  // namespace mgt
