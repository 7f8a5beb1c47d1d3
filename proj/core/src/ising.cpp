#include "qamht/ising.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <cmath>
#include <numbers>
#include <string>

#include "qamht/errors.hpp"

namespace qamht {

IsingProblem::IsingProblem(std::size_t n) : fields_(n, 0.0), couplings_(n * n, 0.0) {}

IsingProblem::IsingProblem(std::vector<double> fields, const std::vector<Coupling>& couplings,
                           double offset)
    : IsingProblem(fields.size()) {
  for (std::size_t k = 0; k < fields.size(); ++k) set_field(k, fields[k]);
  for (const auto& c : couplings) set_coupling(c.i, c.j, c.value);
  set_offset(offset);
}

double IsingProblem::coupling(std::size_t i, std::size_t j) const {
  if (i >= size() || j >= size()) throw InputError("coupling index out of range");
  return couplings_[i * size() + j];
}

void IsingProblem::set_field(std::size_t k, double value) {
  if (k >= size()) throw InputError("field index " + std::to_string(k) + " out of range");
  if (!std::isfinite(value)) throw InputError("field " + std::to_string(k) + " is not finite");
  fields_[k] = value;
}

void IsingProblem::set_coupling(std::size_t i, std::size_t j, double value) {
  if (i >= size() || j >= size()) throw InputError("coupling index out of range");
  if (i == j) throw InputError("diagonal coupling J_" + std::to_string(i) + std::to_string(i));
  if (!std::isfinite(value)) throw InputError("coupling is not finite");
  couplings_[i * size() + j] = value;
  couplings_[j * size() + i] = value;
}

void IsingProblem::set_offset(double value) {
  if (!std::isfinite(value)) throw InputError("offset is not finite");
  offset_ = value;
}

std::vector<Coupling> IsingProblem::couplings() const {
  std::vector<Coupling> out;
  const std::size_t n = size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (couplings_[i * n + j] != 0.0) out.push_back({i, j, couplings_[i * n + j]});
    }
  }
  return out;
}

double IsingProblem::energy_scale() const {
  double s = 0.0;
  for (double f : fields_) s += std::abs(f);
  for (const auto& c : couplings()) s += std::abs(c.value);
  return s;
}

IsingProblem IsingProblem::scaled(double factor) const {
  IsingProblem out = *this;
  for (double& f : out.fields_) f *= factor;
  for (double& c : out.couplings_) c *= factor;
  out.offset_ *= factor;
  return out;
}

double ising_energy(const IsingProblem& p, const Spins& spins) {
  const std::size_t n = p.size();
  if (spins.size() != n) {
    throw InputError("spin vector has length " + std::to_string(spins.size()) + ", problem has " +
                     std::to_string(n) + " spins");
  }
  double e = p.offset();
  for (std::size_t k = 0; k < n; ++k) {
    const double* row = p.row(k);
    double local = p.field(k);
    for (std::size_t j = k + 1; j < n; ++j) local += row[j] * spins[j];
    e += local * spins[k];
  }
  return e;
}

namespace {

void check_exhaustive_size(const IsingProblem& p) {
  if (p.size() > kExhaustiveMaxSpins) {
    throw CapacityError("exhaustive ground-state search supports at most " +
                        std::to_string(kExhaustiveMaxSpins) + " spins, got " +
                        std::to_string(p.size()));
  }
}

Spins spins_of(std::uint32_t index, std::size_t n) {
  Spins s(n);
  for (std::size_t k = 0; k < n; ++k) s[k] = (index >> k) & 1U ? +1 : -1;
  return s;
}

// Gray-code walk over all configurations; calls visit(index, energy).
template <class Visit>
void enumerate_energies(const IsingProblem& p, Visit&& visit) {
  const std::size_t n = p.size();
  Spins s(n, -1);
  double e = ising_energy(p, s);
  std::uint32_t index = 0;
  visit(index, e);
  // Local field h_k = Omega_k + sum_j J_kj s_j, kept incrementally.
  std::vector<double> local(n);
  for (std::size_t k = 0; k < n; ++k) {
    double h = p.field(k);
    for (std::size_t j = 0; j < n; ++j) h += p.row(k)[j] * s[j];
    local[k] = h;
  }
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t step = 1; step < total; ++step) {
    const auto k = static_cast<std::size_t>(std::countr_zero(step));
    e -= 2.0 * s[k] * local[k];
    s[k] = -s[k];
    const double* row = p.row(k);
    for (std::size_t j = 0; j < n; ++j) local[j] += 2.0 * row[j] * s[k];
    index ^= (1U << k);
    visit(index, e);
  }
}

double tie_tolerance(const IsingProblem& p) { return 1e-12 * (1.0 + p.energy_scale()); }

}  // namespace

GroundState ground_state_exhaustive(const IsingProblem& p) {
  check_exhaustive_size(p);
  double min_e = 0.0;
  bool have = false;
  enumerate_energies(p, [&](std::uint32_t, double e) {
    if (!have || e < min_e) min_e = e;
    have = true;
  });
  const double tol = tie_tolerance(p);
  auto best_index = std::numeric_limits<std::uint32_t>::max();
  enumerate_energies(p, [&](std::uint32_t index, double e) {
    if (e <= min_e + tol) best_index = std::min(best_index, index);
  });
  GroundState gs{spins_of(best_index, p.size()), 0.0};
  gs.energy = ising_energy(p, gs.spins);
  return gs;
}

std::vector<Spins> degenerate_ground_states(const IsingProblem& p, double tolerance) {
  check_exhaustive_size(p);
  const double e0 = ground_state_exhaustive(p).energy;
  std::vector<std::uint32_t> hits;
  enumerate_energies(p, [&](std::uint32_t index, double e) {
    if (e <= e0 + tolerance) hits.push_back(index);
  });
  std::sort(hits.begin(), hits.end());
  std::vector<Spins> out;
  for (auto index : hits) {
    Spins s = spins_of(index, p.size());
    if (ising_energy(p, s) <= e0 + tolerance) out.push_back(std::move(s));
  }
  return out;
}

double default_penalty(const WeightedGraph& g) { return 2.0 * g.max_weight(); }

Encoding encode_mwis(const WeightedGraph& g, double penalty) {
  double max_w = 0.0;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (!(g.weight(v) > 0.0)) {
      throw InputError("encode_mwis requires positive weights (vertex " + std::to_string(v) + ")");
    }
    max_w = std::max(max_w, g.weight(v));
  }
  if (!(penalty > max_w)) {
    throw InputError("penalty " + std::to_string(penalty) + " must exceed the largest weight " +
                     std::to_string(max_w));
  }
  const std::size_t n = g.size();
  const double quarter = penalty / 4.0;
  IsingProblem p(n);
  double offset = static_cast<double>(g.edges().size()) * quarter;
  for (Vertex v = 0; v < n; ++v) {
    p.set_field(v, -g.weight(v) / 2.0 + quarter * static_cast<double>(g.degree(v)));
    offset -= g.weight(v) / 2.0;
  }
  for (const auto& [a, b] : g.edges()) p.set_coupling(a, b, quarter);
  p.set_offset(offset);

  DecodeMap map;
  map.vertex_count = n;
  map.spin_to_vertex.resize(n);
  for (Vertex v = 0; v < n; ++v) map.spin_to_vertex[v] = v;
  return {std::move(p), std::move(map)};
}

Encoding encode_mwis_positive_part(const WeightedGraph& g) {
  const SubGraph sub = drop_nonpositive(g);
  Encoding enc = sub.graph.empty() ? Encoding{} : encode_mwis(sub.graph);
  enc.map.spin_to_vertex = sub.index_map;
  enc.map.vertex_count = g.size();
  return enc;
}

VertexSet decode_spins(const Spins& spins, const DecodeMap& map) {
  if (spins.size() != map.spin_to_vertex.size()) {
    throw InputError("spin vector has length " + std::to_string(spins.size()) +
                     ", decode map expects " + std::to_string(map.spin_to_vertex.size()));
  }
  VertexSet out;
  for (std::size_t k = 0; k < spins.size(); ++k) {
    if (spins[k] == map.selected_value) out.push_back(map.spin_to_vertex[k]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Spins encode_set(const VertexSet& set, const DecodeMap& map) {
  Spins s(map.spin_to_vertex.size(), -map.selected_value);
  for (std::size_t k = 0; k < s.size(); ++k) {
    if (std::binary_search(set.begin(), set.end(), map.spin_to_vertex[k])) s[k] = map.selected_value;
  }
  return s;
}

VertexSet repair_independent(const WeightedGraph& g, VertexSet set) {
  set = make_vertex_set(std::move(set), g.size());
  std::vector<char> in(g.size(), 0);
  for (Vertex v : set) in[v] = 1;
  for (const auto& [a, b] : g.edges()) {
    if (in[a] && in[b]) {
      const bool drop_a = g.weight(a) < g.weight(b) || (g.weight(a) == g.weight(b) && a > b);
      in[drop_a ? a : b] = 0;
    }
  }
  VertexSet out;
  for (Vertex v = 0; v < g.size(); ++v) {
    if (in[v]) out.push_back(v);
  }
  return out;
}

Envelope schedule_eval(const Schedule& s, double t) {
  const double slack = 1e-12 * s.t_final;
  if (!(t >= -slack && t <= s.t_final + slack)) {
    throw InputError("schedule time " + std::to_string(t) + " outside [0, " +
                     std::to_string(s.t_final) + "]");
  }
  const double x = std::clamp(t / s.t_final, 0.0, 1.0);
  switch (s.shape) {
    case ScheduleShape::linear:
      return {1.0 - x, x};
    case ScheduleShape::smooth: {
      const double c = std::cos(std::numbers::pi * x / 2.0);
      const double sn = std::sin(std::numbers::pi * x / 2.0);
      return {c * c, sn * sn};
    }
  }
  throw InputError("unknown schedule shape");
}

Envelope schedule_rate(const Schedule& s, double t) {
  (void)schedule_eval(s, t);
  const double x = std::clamp(t / s.t_final, 0.0, 1.0);
  switch (s.shape) {
    case ScheduleShape::linear:
      return {-1.0 / s.t_final, 1.0 / s.t_final};
    case ScheduleShape::smooth: {
      // d/dt sin^2(pi t / 2tf) = (pi / 2tf) sin(pi t / tf)
      const double r = std::numbers::pi / (2.0 * s.t_final) * std::sin(std::numbers::pi * x);
      return {-r, r};
    }
  }
  throw InputError("unknown schedule shape");
}

const char* to_string(ScheduleShape shape) {
  return shape == ScheduleShape::linear ? "linear" : "smooth";
}

ScheduleShape schedule_shape_from_string(const std::string& name) {
  if (name == "linear") return ScheduleShape::linear;
  if (name == "smooth") return ScheduleShape::smooth;
  throw InputError("unknown schedule shape '" + name + "' (expected linear|smooth)");
}

nlohmann::json to_json(const IsingProblem& p) {
  nlohmann::json couplings = nlohmann::json::array();
  for (const auto& c : p.couplings()) couplings.push_back({c.i, c.j, c.value});
  return {{"n", p.size()}, {"fields", p.fields()}, {"couplings", std::move(couplings)},
          {"offset", p.offset()}};
}

IsingProblem ising_from_json(const nlohmann::json& j) {
  try {
    const auto n = j.at("n").get<std::size_t>();
    auto fields = j.at("fields").get<std::vector<double>>();
    if (fields.size() != n) throw InputError("Ising JSON: \"fields\" length differs from n");
    std::vector<Coupling> couplings;
    for (const auto& c : j.value("couplings", nlohmann::json::array())) {
      if (!c.is_array() || c.size() != 3) throw InputError("Ising JSON: couplings are [i, j, J]");
      couplings.push_back({c[0].get<std::size_t>(), c[1].get<std::size_t>(), c[2].get<double>()});
    }
    return IsingProblem(std::move(fields), couplings, j.value("offset", 0.0));
  } catch (const nlohmann::json::exception& ex) {
    throw InputError(std::string("Ising JSON: ") + ex.what());
  }
}

}  // namespace qamht
