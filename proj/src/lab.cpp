#include "yamabe/lab.hpp"

#include "yamabe/bubble.hpp"
#include "yamabe/concentration.hpp"
#include "yamabe/elliptic.hpp"
#include "yamabe/errors.hpp"
#include "yamabe/groundstate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

namespace yamabe {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::ground: return "ground";
    case ExperimentKind::sweep_m: return "sweep_m";
    case ExperimentKind::sweep_d: return "sweep_d";
    case ExperimentKind::multiplicity: return "multiplicity";
    case ExperimentKind::diagnose: return "diagnose";
  }
  return "ground";
}

ExperimentKind experiment_kind_from_string(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '-', '_');
  for (ExperimentKind k : {ExperimentKind::ground, ExperimentKind::sweep_m,
                           ExperimentKind::sweep_d, ExperimentKind::multiplicity,
                           ExperimentKind::diagnose})
    if (to_string(k) == t) return k;
  throw ConfigError("unknown experiment kind '" + s + "'");
}

namespace {

void say(const RunOptions& o, const std::string& msg) {
  if (o.log) o.log(msg);
}

std::vector<double> to_vec(const Point& p) { return {p.data(), p.data() + p.size()}; }

Point to_point(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

ManifoldPtr make_manifold(const ExperimentConfig& c) {
  return std::make_shared<const TorusManifold>(c.lengths, c.grid);
}

// Runs fn(i) for i in [0, n) on up to `jobs` threads; every task writes only
// to its own slot, so the result is independent of scheduling.
template <class Fn>
void parallel_for(std::size_t n, int jobs, Fn fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct RunResult {
  SolutionRecord record;
  Field field;
  std::vector<FlowSample> samples;
};

void audit_trace(SolutionRecord& r, const FlowTrace& tr, double alpha, double nodal_tol) {
  for (const FlowSample& s : tr.samples) {
    if (s.sign_changing && s.part_residual_plus <= nodal_tol &&
        s.part_residual_minus <= nodal_tol) {
      ++r.nodal_set_hits;
      if (!(s.gap_plus > alpha && s.gap_minus > alpha)) ++r.nodal_set_violations;
    }
  }
  r.max_gap_plus = std::max(r.max_gap_plus, tr.max_gap_plus);
}

// Projected stage, then the plain polish from its end point.
RunResult run_seed(const Field& u0, const ExperimentConfig& c, const EpsParams& params,
                   double alpha, SolutionRecord rec) {
  RunResult out;
  out.record = std::move(rec);
  SolutionRecord& r = out.record;
  try {
    FlowConfig fc = c.flow;
    fc.mode = FlowMode::nehari_projected;
    fc.alpha = alpha;
    FlowResult stage = flow_run(u0, fc, params);
    audit_trace(r, stage.trace, alpha, c.tol.nodal_set);
    r.steps = stage.trace.steps;
    out.samples = stage.trace.samples;
    FlowOutcome outcome = stage.trace.outcome;
    if (outcome == FlowOutcome::converged && c.polish) {
      FlowConfig pc = c.flow;
      pc.mode = FlowMode::plain;
      pc.alpha = alpha;
      FlowResult polish = flow_run(stage.field, pc, params);
      audit_trace(r, polish.trace, alpha, c.tol.nodal_set);
      r.steps += polish.trace.steps;
      out.samples.insert(out.samples.end(), polish.trace.samples.begin(),
                         polish.trace.samples.end());
      outcome = polish.trace.outcome;
      stage = std::move(polish);
    }
    r.outcome = to_string(outcome);
    r.converged = outcome == FlowOutcome::converged;
    out.field = std::move(stage.field);
    fill_diagnostics(r, out.field, params, alpha, c);
  } catch (const Error& e) {
    r.outcome = std::string("error:") + e.tag();
    r.error = e.what();
    r.converged = false;
  }
  return out;
}

// The node nearest the middle of the torus. On coarse lattices a bubble
// centred between nodes is held there by symmetry and converges to the
// inter-site saddle, whose energy exceeds the node-centred minimum.
Point default_center(const TorusManifold& m) {
  Point c(m.dim());
  for (int k = 0; k < m.dim(); ++k) c[k] = 0.5 * m.length(k);
  return m.node_point(m.nearest_node(c));
}

double alpha_from_mE(double mE, double p) {
  // Inverts m = (p-2)/(2p) S^{p/(p-2)}.
  const double S = std::pow(2.0 * p * mE / (p - 2.0), (p - 2.0) / p);
  return constants_from_S(S, p).alpha;
}

void write_trace(const fs::path& path, const std::vector<FlowSample>& samples) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  for (const FlowSample& s : samples) {
    json j = {{"step", s.step},
              {"energy", s.energy.total},
              {"quadratic", s.energy.quadratic},
              {"potential", s.energy.potential},
              {"nehari_residual", s.energy.nehari_residual},
              {"grad_norm", s.energy.grad_norm},
              {"gap_plus", s.gap_plus},
              {"gap_minus", s.gap_minus},
              {"part_residual_plus", s.part_residual_plus},
              {"part_residual_minus", s.part_residual_minus},
              {"region", to_string(s.region)},
              {"step_size", s.step_size}};
    out << j.dump() << '\n';
  }
}

Point part_center(const SolutionRecord& r, const Field& u, bool plus) {
  if (r.cm) return to_point(plus ? r.cm->c_plus : r.cm->c_minus);
  Eigen::Index i = 0;
  if (plus)
    u.values().maxCoeff(&i);
  else
    u.values().minCoeff(&i);
  return u.manifold().node_point(static_cast<std::size_t>(i));
}

json ground_json(const RadialProfile& prof) {
  return {{"n", prof.n},         {"q", prof.q},
          {"u0", prof.u0},       {"mE", prof.mE},
          {"decay_rate", prof.decay_rate}, {"decay_amplitude", prof.decay_amplitude},
          {"r_max", prof.r_max}, {"samples", prof.samples.size()}};
}

}  // namespace

double seed_cutoff(const ExperimentConfig& c, const TorusManifold& m) {
  return c.seeds.cutoff > 0.0 ? std::min(c.seeds.cutoff, m.injectivity_radius())
                              : default_cutoff_radius(m);
}

std::vector<SeedSpec> make_seeds(const ExperimentConfig& c, const TorusManifold& m, double eps,
                                 std::size_t eps_index, double r_cut) {
  std::vector<SeedSpec> out;
  const double need = std::max(2.0 * r_cut * (1.0 - 1e-12), 2.0 * eps * m.diameter());
  switch (c.seeds.strategy) {
    case SeedStrategy::explicit_list: {
      int i = 0;
      for (const auto& [x, y] : c.seeds.pairs) out.push_back({i++, to_point(x), to_point(y)});
      break;
    }
    case SeedStrategy::random: {
      std::seed_seq seq{static_cast<std::uint32_t>(c.seeds.random_seed),
                        static_cast<std::uint32_t>(c.seeds.random_seed >> 32),
                        static_cast<std::uint32_t>(eps_index)};
      std::mt19937_64 rng(seq);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      auto draw = [&] {
        Point p(m.dim());
        for (int k = 0; k < m.dim(); ++k) p[k] = unit(rng) * m.length(k);
        return p;
      };
      const long max_attempts = 10000L * std::max(c.seeds.count, 1);
      long attempts = 0;
      while (static_cast<int>(out.size()) < c.seeds.count) {
        if (++attempts > max_attempts)
          throw ConfigError("could not draw admissible random seed pairs; lower seeds.cutoff");
        Point x = draw(), y = draw();
        if (m.dist(x, y) >= need) out.push_back({static_cast<int>(out.size()), x, y});
      }
      break;
    }
    case SeedStrategy::net: {
      SeparatedNet net = m.separated_net(c.seeds.net_scale * eps * m.diameter());
      for (std::size_t i = 0; i < net.nodes.size(); ++i)
        for (std::size_t j = i + 1; j < net.nodes.size(); ++j) {
          if (c.seeds.count > 0 && static_cast<int>(out.size()) >= c.seeds.count) break;
          if (m.node_dist(net.nodes[i], net.nodes[j]) < need) continue;
          out.push_back({static_cast<int>(out.size()), m.node_point(net.nodes[i]),
                         m.node_point(net.nodes[j])});
        }
      break;
    }
  }
  return out;
}

double pde_residual_l2(const Field& u, const EpsParams& params) {
  Field res = apply_operator(u, params) - nonlinearity(u, params.p());
  return std::sqrt(l2_pairing(res, res, params));
}

double pde_residual(const Field& u, const EpsParams& params, double tol) {
  Field res = apply_operator(u, params) - nonlinearity(u, params.p());
  if (res.values().isZero(0.0)) return 0.0;
  Field w = solve_K(res, params, tol).first;
  return std::sqrt(std::max(0.0, l2_pairing(res, w, params)));
}

void fill_diagnostics(SolutionRecord& r, const Field& u, const EpsParams& params, double alpha,
                      const ExperimentConfig& c) {
  r.energy = j_eps(u, params, 1e-12);
  SignSplit s = sign_split(u, params);
  r.gap_plus = s.gap_plus;
  r.gap_minus = s.gap_minus;
  r.region = alpha > 0.0 ? classify_region(u, alpha, params) : RegionTag::z_candidate;
  r.sign_changing = is_sign_changing(u);
  r.part_residual_plus = relative_nehari_residual(s.plus, params);
  r.part_residual_minus = relative_nehari_residual(s.minus, params);
  r.pde_residual = pde_residual(u, params);
  r.pde_residual_l2 = pde_residual_l2(u, params);
  r.pde_ok = r.pde_residual <= c.tol.pde_residual_factor * std::sqrt(c.flow.stop_delta);

  const double radius = c.tol.concentration_radius * params.eps();
  auto captured = [&](const Field& part) {
    if (part.values().isZero(0.0)) return 0.0;
    Field f = part;
    f.values() = part.values().array().pow(params.p()).matrix();
    return conc(f, radius).coefficient;
  };
  r.captured_plus = captured(s.plus);
  r.captured_minus = captured(s.minus);

  r.cm.reset();
  r.cm_error.clear();
  if (r.sign_changing) {
    try {
      CenterPair cp = cm_pair(u, c.tol.concentration_radius, c.tol.eta, params);
      r.cm = CenterPairRecord{to_vec(cp.c_plus), to_vec(cp.c_minus), cp.separation, cp.radius};
    } catch (const Error& e) {
      r.cm_error = std::string(e.tag()) + ": " + e.what();
    }
  }
}

double aligned_distance(const Field& u, const Point& u_c_plus, const Field& v,
                        const Point& v_c_plus, const Point& v_c_minus, const EpsParams& params) {
  const TorusManifold& m = u.manifold();
  auto shift_to = [&](const Point& from, const Point& to) {
    MultiIndex s{0, 0, 0};
    for (int k = 0; k < m.dim(); ++k)
      s[k] = std::lround(std::remainder(to[k] - from[k], m.length(k)) / m.spacing(k));
    return s;
  };
  const double scale = std::max(eps_norm(u, params), eps_norm(v, params));
  if (scale == 0.0) return 0.0;
  Field direct = u - v.translated(shift_to(v_c_plus, u_c_plus));
  Field swapped = u + v.translated(shift_to(v_c_minus, u_c_plus));
  return std::min(eps_norm(direct, params), eps_norm(swapped, params)) / scale;
}

int cluster_solutions(SolutionArchive& a, const std::vector<Field>& fields, double energy_tol,
                      double shape_tol) {
  if (fields.size() != a.records.size())
    throw InvalidParameter("cluster_solutions needs one field per record");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    a.records[i].cluster_id = -1;
    const SolutionRecord& r = a.records[i];
    if (r.kind == RecordKind::nodal && r.converged && r.sign_changing && fields[i].size() > 0)
      idx.push_back(i);
  }
  if (idx.empty()) return 0;
  const double eps = a.records[idx.front()].eps;
  for (std::size_t i : idx)
    if (a.records[i].eps != eps) throw MixedEps("cluster_solutions needs records of one eps");

  const nlohmann::json& cfg = a.config;
  const EpsParams params(eps, fields[idx.front()].manifold().dim(),
                         cfg.contains("params") ? cfg["params"]["m"].get<int>() : 3,
                         cfg.contains("params") ? cfg["params"]["scalar_curvature"].get<double>() : 0.0);

  std::vector<std::size_t> parent(idx.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<Point> cp(idx.size()), cm(idx.size());
  for (std::size_t k = 0; k < idx.size(); ++k) {
    cp[k] = part_center(a.records[idx[k]], fields[idx[k]], true);
    cm[k] = part_center(a.records[idx[k]], fields[idx[k]], false);
  }
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size(); ++j) {
      if (find(i) == find(j)) continue;
      const double J1 = a.records[idx[i]].energy.total, J2 = a.records[idx[j]].energy.total;
      if (std::abs(J1 - J2) > energy_tol * std::max(std::abs(J1), 1.0)) continue;
      const double d = aligned_distance(fields[idx[i]], cp[i], fields[idx[j]], cp[j], cm[j], params);
      if (d <= shape_tol) parent[find(j)] = find(i);
    }
  std::vector<int> label(idx.size(), -1);
  int count = 0;
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t root = find(k);
    if (label[root] < 0) label[root] = count++;
    a.records[idx[k]].cluster_id = label[root];
  }
  return count;
}

// Clusters each eps separately; returns (eps, class count) pairs.
std::vector<std::pair<double, int>> cluster_by_eps(SolutionArchive& a,
                                                   const std::vector<Field>& fields,
                                                   const ExperimentConfig& c) {
  std::vector<double> eps_list;
  for (const auto& r : a.records)
    if (std::find(eps_list.begin(), eps_list.end(), r.eps) == eps_list.end())
      eps_list.push_back(r.eps);
  std::vector<std::pair<double, int>> counts;
  for (double eps : eps_list) {
    SolutionArchive part;
    part.config = a.config;
    std::vector<Field> pf;
    std::vector<std::size_t> where;
    for (std::size_t i = 0; i < a.records.size(); ++i)
      if (a.records[i].eps == eps) {
        part.records.push_back(a.records[i]);
        pf.push_back(fields[i]);
        where.push_back(i);
      }
    counts.emplace_back(eps, cluster_solutions(part, pf, c.tol.cluster_energy,
                                               c.tol.cluster_shape));
    for (std::size_t k = 0; k < where.size(); ++k)
      a.records[where[k]].cluster_id = part.records[k].cluster_id;
  }
  return counts;
}

SolutionArchive run_experiment(const ExperimentConfig& c, ExperimentKind kind,
                               const RunOptions& opt) {
  if (kind == ExperimentKind::diagnose) return diagnose(c.output_dir, opt);
  c.validate();
  const fs::path dir(c.output_dir);
  fs::create_directories(dir);

  SolutionArchive a;
  a.kind = to_string(kind);
  a.config = to_json(c);

  const EpsParams probe(c.eps.front(), c.dimension, c.fiber_dim, c.scalar_curvature);
  const double p = probe.p();
  RadialProfile prof = shoot(c.dimension, p, c.shoot_tol, c.shoot);
  const double mE = m_E(prof);
  a.ground = ground_json(prof);
  say(opt, "ground state: U(0) = " + std::to_string(prof.u0) + ", m(E) = " + std::to_string(mE));

  if (kind == ExperimentKind::ground) {
    Eigen::VectorXd samples = Eigen::Map<const Eigen::VectorXd>(
        prof.samples.data(), static_cast<Eigen::Index>(prof.samples.size()));
    write_snapshot((dir / "profile.f64").string(), samples,
                   SnapshotMeta{{static_cast<long>(prof.samples.size())}, {prof.r_max}, 0.0,
                                kSchemaVersion});
    save_archive(a, c.output_dir);
    return a;
  }

  ManifoldPtr man = make_manifold(c);
  const double r_cut = seed_cutoff(c, *man);
  const bool nodal = kind == ExperimentKind::sweep_d || kind == ExperimentKind::multiplicity;
  std::vector<Field> fields;

  for (std::size_t ei = 0; ei < c.eps.size(); ++ei) {
    const double eps = c.eps[ei];
    const EpsParams params(eps, c.dimension, c.fiber_dim, c.scalar_curvature);

    // Positive bubble: gives m_hat and the tube radius for this eps.
    SolutionRecord pos;
    pos.eps = eps;
    pos.kind = RecordKind::positive;
    pos.seed_strategy = "positive";
    const Point center = c.seeds.positive_center.empty() ? default_center(*man)
                                                         : to_point(c.seeds.positive_center);
    pos.seed_x = to_vec(center);
    pos.seed_admissible = true;
    RunResult pr;
    try {
      pr = run_seed(projected_bubble(center, prof, man, params, r_cut), c, params, 0.0, pos);
    } catch (const Error& e) {
      pr.record = pos;
      pr.record.outcome = std::string("error:") + e.tag();
      pr.record.error = e.what();
    }
    double alpha = alpha_from_mE(mE, p);
    if (pr.record.converged) alpha = constants(pr.field, params).alpha;
    if (pr.field.size() > 0) fill_diagnostics(pr.record, pr.field, params, alpha, c);
    a.alpha.emplace_back(eps, alpha);
    say(opt, "eps " + std::to_string(eps) + ": positive " + pr.record.outcome +
                 ", J = " + std::to_string(pr.record.energy.total));

    std::vector<RunResult> results;
    results.push_back(std::move(pr));

    if (nodal) {
      const std::vector<SeedSpec> seeds = make_seeds(c, *man, eps, ei, r_cut);
      std::vector<RunResult> runs(seeds.size());
      parallel_for(seeds.size(), c.jobs, [&](std::size_t i) {
        SolutionRecord rec;
        rec.eps = eps;
        rec.kind = RecordKind::nodal;
        rec.seed_strategy = to_string(c.seeds.strategy);
        rec.seed_index = seeds[i].index;
        rec.seed_x = to_vec(seeds[i].x);
        rec.seed_y = to_vec(seeds[i].y);
        try {
          SeedPair sp = seed_pair(seeds[i].x, seeds[i].y, prof, man, params, r_cut);
          rec.seed_admissible = sp.admissible;
          runs[i] = run_seed(sp.field, c, params, alpha, rec);
        } catch (const Error& e) {
          runs[i].record = rec;
          runs[i].record.outcome = std::string("error:") + e.tag();
          runs[i].record.error = e.what();
        }
      });
      int ok = 0;
      for (auto& r : runs) {
        ok += r.record.converged && r.record.sign_changing;
        results.push_back(std::move(r));
      }
      say(opt, "eps " + std::to_string(eps) + ": " + std::to_string(ok) + " of " +
                   std::to_string(seeds.size()) + " seeds converged to nodal solutions");
    }

    for (auto& r : results) {
      r.record.id = static_cast<int>(a.records.size());
      if (c.write_snapshots && r.field.size() > 0) {
        const std::string name = "snapshots/rec_" + std::to_string(r.record.id) + ".f64";
        write_snapshot((dir / name).string(), r.field.values(),
                       SnapshotMeta{c.grid, c.lengths, eps, kSchemaVersion});
        r.record.snapshot = name;
      }
      if (c.write_traces)
        write_trace(dir / ("traces/rec_" + std::to_string(r.record.id) + ".jsonl"), r.samples);
      a.records.push_back(std::move(r.record));
      fields.push_back(std::move(r.field));
    }
  }

  if (kind == ExperimentKind::multiplicity)
    for (const auto& [eps, n] : cluster_by_eps(a, fields, c))
      say(opt, "eps " + std::to_string(eps) + ": " + std::to_string(n) +
                   " nodal classes modulo translations and sign");

  save_archive(a, c.output_dir);
  return a;
}

SolutionArchive diagnose(const std::string& dir, const RunOptions& opt) {
  SolutionArchive a = load_archive(dir);
  if (a.records.empty()) {
    save_archive(a, dir);
    say(opt, "empty archive; nothing to diagnose");
    return a;
  }
  const ExperimentConfig c = config_from_json(a.config);
  ManifoldPtr man = make_manifold(c);
  std::vector<Field> fields(a.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    SolutionRecord& r = a.records[i];
    if (r.snapshot.empty()) continue;
    fields[i] = Field(man, read_snapshot((fs::path(dir) / r.snapshot).string()));
    if (fields[i].size() != man->node_count())
      throw CorruptArchive("snapshot " + r.snapshot + " does not match the grid");
    double alpha = 0.0;
    for (const auto& [e, v] : a.alpha)
      if (e == r.eps) alpha = v;
    const EpsParams params(r.eps, c.dimension, c.fiber_dim, c.scalar_curvature);
    fill_diagnostics(r, fields[i], params, alpha, c);
  }
  if (a.kind == "multiplicity") cluster_by_eps(a, fields, c);
  save_archive(a, dir);
  say(opt, "diagnosed " + std::to_string(a.records.size()) + " records");
  return a;
}

}  // namespace yamabe
