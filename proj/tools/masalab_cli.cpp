// masalab: batch front end for the measure / rank-one / group-algebra lab.
// Every subcommand reads JSON inputs and emits JSON (or CSV where a table is
// the natural shape).  Exit codes: 0 success, 1 precondition violation,
// 2 budget exhaustion.

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "masalab/bimodule.hpp"
#include "masalab/circle_measures.hpp"
#include "masalab/common.hpp"
#include "masalab/group_masa.hpp"
#include "masalab/rank_one.hpp"

namespace {

using json = nlohmann::json;
using namespace masalab;

// 12 significant digits everywhere, reproducibly
double sig12(double x) {
  if (x == 0.0 || !std::isfinite(x)) return x;
  std::ostringstream os;
  os.precision(12);
  os << x;
  return std::stod(os.str());
}

json jnum(double x) { return json(sig12(x)); }

json jcomplex(const Complex& c) { return json::array({jnum(c.real()), jnum(c.imag())}); }

json measure_json(const bimodule::BivariateMeasure& eta) {
  json j;
  j["orders"] = eta.space.orders;
  json pts = json::array();
  for (const auto& [k, v] : eta.mass)
    pts.push_back({k.first, k.second, jnum(v.real()), jnum(v.imag())});
  j["points"] = pts;
  return j;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open input file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) throw PreconditionError("cannot open output file: " + out_path);
    out << text << "\n";
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) parts.push_back(cur);
  return parts;
}

std::vector<Complex> parse_function(const std::string& text) {
  // "re,im;re,im;..."
  std::vector<Complex> f;
  for (const std::string& pair : split(text, ';')) {
    const auto nums = split(pair, ',');
    if (nums.size() == 1)
      f.emplace_back(std::stod(nums[0]), 0.0);
    else if (nums.size() == 2)
      f.emplace_back(std::stod(nums[0]), std::stod(nums[1]));
    else
      throw PreconditionError("bad function entry: " + pair);
  }
  return f;
}

// ---------------------------------------------------------------------------

struct Options {
  std::string in_path, out_path, format = "json";
  long long horizon = 100;
  int radius = 4;
  double tol = 1e-10;
  unsigned seed = 0;
};

void add_common(CLI::App* cmd, Options& opt, bool needs_in = true) {
  auto* in = cmd->add_option("--in", opt.in_path, "input JSON file");
  if (needs_in) in->required();
  cmd->add_option("--out", opt.out_path, "write output to a file instead of stdout");
  cmd->add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--horizon", opt.horizon, "horizon N");
  cmd->add_option("--radius", opt.radius, "search radius R");
  cmd->add_option("--tol", opt.tol, "tolerance");
  cmd->add_option("--seed", opt.seed, "random seed (default 0)");
}

int run(int argc, char** argv) {
  CLI::App app{"finite laboratory for mixing diagnostics of masas"};
  app.require_subcommand(1);

  // ---- measure ----
  auto* measure = app.add_subcommand("measure", "circle-measure Fourier diagnostics");
  measure->require_subcommand(1);
  Options m_opt;
  long long n0 = 1;

  auto* m_fourier = measure->add_subcommand("fourier", "coefficients for |n| <= N");
  add_common(m_fourier, m_opt);
  m_fourier->callback([&] {
    const auto mu = circle::measure_from_json(slurp(m_opt.in_path));
    const auto coeffs = mu.fourier_range(m_opt.horizon);
    if (m_opt.format == "csv") {
      const auto profile = circle::profile_from_coefficients(coeffs, std::max<long long>(1, m_opt.horizon));
      emit(circle::profile_to_csv(profile), m_opt.out_path);
      return;
    }
    json j;
    j["N"] = m_opt.horizon;
    json arr = json::array();
    for (long long n = -m_opt.horizon; n <= m_opt.horizon; ++n) {
      const Complex c = coeffs[static_cast<std::size_t>(n + m_opt.horizon)];
      arr.push_back({n, jnum(c.real()), jnum(c.imag())});
    }
    j["coefficients"] = arr;
    emit(j.dump(), m_opt.out_path);
  });

  auto* m_wiener = measure->add_subcommand("wiener", "Cesaro of |mu^|^2 (atom energy)");
  add_common(m_wiener, m_opt);
  m_wiener->callback([&] {
    const auto mu = circle::measure_from_json(slurp(m_opt.in_path));
    const auto seq = circle::wiener_atom_energy(mu, m_opt.horizon);
    json j;
    j["N"] = m_opt.horizon;
    j["terminal"] = jnum(seq.back());
    emit(j.dump(), m_opt.out_path);
  });

  auto* m_rajchman = measure->add_subcommand("rajchman", "tail decay profile");
  add_common(m_rajchman, m_opt);
  m_rajchman->add_option("--n0", n0, "tail start N0");
  m_rajchman->callback([&] {
    const auto mu = circle::measure_from_json(slurp(m_opt.in_path));
    const auto profile = circle::rajchman_profile(mu, n0, m_opt.horizon);
    if (m_opt.format == "csv") {
      emit(circle::profile_to_csv(profile), m_opt.out_path);
      return;
    }
    json j;
    j["N"] = profile.N;
    j["N0"] = profile.N0;
    j["tail_sup"] = jnum(profile.tail_sup);
    j["cesaro_sq_terminal"] = jnum(profile.cesaro_sq.back());
    j["cesaro_abs_terminal"] = jnum(profile.cesaro_abs.back());
    emit(j.dump(), m_opt.out_path);
  });

  auto* m_weakmix = measure->add_subcommand("weakmix", "Cesaro of |mu^| (non-atomicity)");
  add_common(m_weakmix, m_opt);
  m_weakmix->callback([&] {
    const auto mu = circle::measure_from_json(slurp(m_opt.in_path));
    const auto seq = circle::weak_mixing_profile(mu, m_opt.horizon);
    json j;
    j["N"] = m_opt.horizon;
    j["terminal"] = jnum(seq.back());
    emit(j.dump(), m_opt.out_path);
  });

  // ---- rankone ----
  auto* rankone = app.add_subcommand("rankone", "cutting-and-stacking towers");
  rankone->require_subcommand(1);
  Options r_opt;
  std::string preset;
  int stages = 3, base_stage = 0;
  long long mc_samples = 0;

  auto* r_build = rankone->add_subcommand("build", "stack the tower and report its shape");
  add_common(r_build, r_opt, /*needs_in=*/false);
  r_build->add_option("--preset", preset, "construction preset (staircase)");
  r_build->add_option("-K,--stages", stages, "number of stages");
  r_build->callback([&] {
    rankone::CutSpacerSpec spec;
    if (!preset.empty())
      spec = rankone::spec_from_json("{\"preset\":\"" + preset + "\",\"stages\":" +
                                     std::to_string(stages) + "}");
    else if (!r_opt.in_path.empty())
      spec = rankone::spec_from_json(slurp(r_opt.in_path));
    else
      throw PreconditionError("rankone build: provide --preset or --in");
    const auto tower = rankone::build_tower(spec, stages);
    json j;
    j["stage"] = tower.stage;
    j["height"] = tower.height;
    std::ostringstream w;
    w << numerator(tower.width) << '/' << denominator(tower.width);
    j["width"] = w.str();
    std::ostringstream m;
    m << numerator(tower.raw_mass) << '/' << denominator(tower.raw_mass);
    j["raw_mass"] = m.str();
    emit(j.dump(), r_opt.out_path);
  });

  auto* r_corr = rankone->add_subcommand("correlate", "base-indicator correlations");
  add_common(r_corr, r_opt, /*needs_in=*/false);
  r_corr->add_option("--preset", preset, "construction preset (staircase)");
  r_corr->add_option("-K,--stages", stages, "number of stages");
  r_corr->add_option("--base-stage", base_stage, "stage whose base level is the indicator");
  r_corr->add_option("--mc", mc_samples, "Monte-Carlo cross-check sample count");
  r_corr->callback([&] {
    rankone::CutSpacerSpec spec;
    if (!preset.empty())
      spec = rankone::spec_from_json("{\"preset\":\"" + preset + "\",\"stages\":" +
                                     std::to_string(stages) + "}");
    else if (!r_opt.in_path.empty())
      spec = rankone::spec_from_json(slurp(r_opt.in_path));
    else
      throw PreconditionError("rankone correlate: provide --preset or --in");
    const auto tower = rankone::build_tower(spec, stages);
    const auto f = rankone::centered_base_indicator(tower, base_stage);
    const auto corr = rankone::correlation_sequence(tower, f, r_opt.horizon);
    if (r_opt.format == "csv") {
      emit(rankone::correlation_to_csv(corr), r_opt.out_path);
      return;
    }
    json j;
    j["height"] = tower.height;
    j["truncation_fraction"] = jnum(corr.truncation_fraction);
    json c = json::array();
    for (double v : corr.c) c.push_back(jnum(v));
    j["c"] = c;
    if (mc_samples > 0) {
      double stddev = 0.0;
      const double est = rankone::correlation_monte_carlo(
          tower, f, r_opt.horizon, static_cast<std::size_t>(mc_samples), r_opt.seed, &stddev);
      j["mc_estimate"] = jnum(est);
      j["mc_stddev"] = jnum(stddev);
    }
    emit(j.dump(), r_opt.out_path);
  });

  // ---- group ----
  auto* group = app.add_subcommand("group", "combinatorial subgroup conditions");
  group->require_subcommand(1);
  Options g_opt;
  std::string f_set, g_elem;
  long long ebound = -1, threshold = 0;

  auto* g_st = group->add_subcommand("st", "the (ST) condition g g0 h not in Gamma_0");
  add_common(g_st, g_opt);
  g_st->add_option("--F", f_set, "semicolon-separated elements of F")->required();
  g_st->add_option("--ebound", ebound, "max size of the exceptional set E");
  g_st->callback([&] {
    const auto model = groups::model_from_json(slurp(g_opt.in_path));
    std::vector<groups::Elem> F;
    for (const std::string& w : split(f_set, ';')) F.push_back(model.group->parse(w));
    const std::size_t bound =
        ebound >= 0 ? static_cast<std::size_t>(ebound) : static_cast<std::size_t>(g_opt.radius);
    const auto report = masa::st_condition(model, F, g_opt.radius, bound);
    emit(masa::st_report_to_json(model, report), g_opt.out_path);
  });

  auto* g_kg = group->add_subcommand("kg", "stabilizer K_g = {(h1,h2): h1 g h2 = g}");
  add_common(g_kg, g_opt);
  g_kg->add_option("--g", g_elem, "the element g")->required();
  g_kg->callback([&] {
    const auto model = groups::model_from_json(slurp(g_opt.in_path));
    const auto report = masa::stabilizer_kg(model, model.group->parse(g_elem), g_opt.radius);
    emit(masa::kg_report_to_json(model, report), g_opt.out_path);
  });

  auto* g_mal = group->add_subcommand("malnormal", "radius-R malnormality certificate");
  add_common(g_mal, g_opt);
  g_mal->callback([&] {
    const auto model = groups::model_from_json(slurp(g_opt.in_path));
    const auto report = masa::malnormality_check(model, g_opt.radius);
    json j;
    j["malnormal"] = report.malnormal;
    j["radius"] = report.radius;
    if (report.witness)
      j["witness"] = {model.group->format(report.witness->first),
                      model.group->format(report.witness->second)};
    emit(j.dump(), g_opt.out_path);
  });

  auto* g_icc = group->add_subcommand("icc", "conjugacy class growth evidence");
  add_common(g_icc, g_opt);
  g_icc->add_option("--threshold", threshold, "class size threshold (default 2R)");
  g_icc->callback([&] {
    const auto model = groups::model_from_json(slurp(g_opt.in_path));
    const auto report = masa::icc_check(model, g_opt.radius, threshold);
    json j;
    j["icc_evidence"] = report.evidence;
    j["radius"] = report.radius;
    j["threshold"] = report.threshold;
    j["min_class_size"] = report.min_class_size;
    if (report.worst) j["smallest_class_element"] = model.group->format(*report.worst);
    emit(j.dump(), g_opt.out_path);
  });

  // ---- masa ----
  auto* ms = app.add_subcommand("masa", "group-algebra diagnostics over a marked model");
  ms->require_subcommand(1);
  Options s_opt;
  std::string x_expr, v_expr, family_expr, xi1_expr, xi2_expr;
  int ahp_l = 5;
  long long kmax = 1000;

  auto* s_condexp = ms->add_subcommand("condexp", "conditional expectation onto the masa");
  add_common(s_condexp, s_opt);
  s_condexp->add_option("--x", x_expr, "algebra element")->required();
  s_condexp->callback([&] {
    const auto model = groups::model_from_json(slurp(s_opt.in_path));
    const auto x = masa::parse_element(*model.group, x_expr);
    const auto e = masa::conditional_expectation(model, x);
    json j;
    j["result"] = masa::format_element(*model.group, e);
    j["norm2"] = jnum(masa::norm2(e));
    emit(j.dump(), s_opt.out_path);
  });

  auto* s_cesaro = ms->add_subcommand("cesaro", "horizon-N Cesaro mixing diagnostics");
  add_common(s_cesaro, s_opt);
  s_cesaro->add_option("--x", x_expr, "algebra element with E_A(x) = 0")->required();
  s_cesaro->add_option("--v", v_expr, "infinite-order masa element")->required();
  s_cesaro->callback([&] {
    const auto model = groups::model_from_json(slurp(s_opt.in_path));
    const auto x = masa::parse_element(*model.group, x_expr);
    const auto d = masa::cesaro_diagnostics(model, x, model.group->parse(v_expr), s_opt.horizon);
    json j;
    j["N"] = d.N;
    j["avg_l2_sq"] = jnum(d.avg_l2_sq);
    j["avg_l2"] = jnum(d.avg_l2);
    j["avg_l1_sq"] = jnum(d.avg_l1_sq);
    j["avg_l1"] = jnum(d.avg_l1);
    j["all_vanish"] = d.all_vanish;
    emit(j.dump(), s_opt.out_path);
  });

  auto* s_ahp = ms->add_subcommand("ahp", "subsequence with vanishing norms");
  add_common(s_ahp, s_opt);
  s_ahp->add_option("--family", family_expr, "semicolon-separated algebra elements")->required();
  s_ahp->add_option("--v", v_expr, "infinite-order masa element")->required();
  s_ahp->add_option("-L", ahp_l, "subsequence length");
  s_ahp->add_option("--kmax", kmax, "search bound");
  s_ahp->callback([&] {
    const auto model = groups::model_from_json(slurp(s_opt.in_path));
    std::vector<masa::AlgebraElement> family;
    for (const std::string& t : split(family_expr, ';'))
      family.push_back(masa::parse_element(*model.group, t));
    const auto r = masa::ahp_subsequence(model, family, model.group->parse(v_expr), ahp_l, kmax);
    json j;
    j["conclusive"] = r.conclusive;
    j["indices"] = r.indices;
    emit(j.dump(), s_opt.out_path);
  });

  auto* s_wander = ms->add_subcommand("wandering", "wandering vector membership test");
  add_common(s_wander, s_opt);
  s_wander->add_option("--zeta", x_expr, "vector with E_A(zeta) = 0")->required();
  s_wander->add_option("--v", v_expr, "infinite-order masa element")->required();
  s_wander->callback([&] {
    const auto model = groups::model_from_json(slurp(s_opt.in_path));
    const auto zeta = masa::parse_element(*model.group, x_expr);
    const auto r = masa::wandering_test(model, zeta, model.group->parse(v_expr), s_opt.horizon);
    json j;
    j["wandering"] = r.wandering;
    j["max_defect"] = jnum(r.max_defect);
    j["worst_n"] = r.worst_n;
    emit(j.dump(), s_opt.out_path);
  });

  auto* s_summ = ms->add_subcommand("summability", "Parseval identity for the k-sum");
  add_common(s_summ, s_opt);
  s_summ->add_option("--xi1", xi1_expr, "first vector")->required();
  s_summ->add_option("--xi2", xi2_expr, "second vector")->required();
  s_summ->add_option("--v", v_expr, "generator of the marked subgroup")->required();
  s_summ->callback([&] {
    const auto model = groups::model_from_json(slurp(s_opt.in_path));
    const auto [lhs, rhs] = masa::summability_identity(
        model, masa::parse_element(*model.group, xi1_expr),
        masa::parse_element(*model.group, xi2_expr), model.group->parse(v_expr));
    json j;
    j["lhs"] = jnum(lhs);
    j["rhs"] = jnum(rhs);
    j["defect"] = jnum(std::abs(lhs - rhs));
    emit(j.dump(), s_opt.out_path);
  });

  // ---- bimodule ----
  auto* bi = app.add_subcommand("bimodule", "bivariate measures and finite Koopman models");
  bi->require_subcommand(1);
  Options b_opt;
  std::string zeta1_expr, zeta2_expr, f1_expr, f2_expr, weights_expr, compare_expr;
  int axis = 1, nmax = 32;
  long long sg1 = 0, sg2 = 0, sh1 = 0, sh2 = 0, trials = 0;
  long long b_n0 = 1;

  auto* b_eta = bi->add_subcommand("eta", "bivariate measure of a vector pair");
  add_common(b_eta, b_opt);
  b_eta->add_option("--zeta1", zeta1_expr, "first vector")->required();
  b_eta->add_option("--zeta2", zeta2_expr, "second vector (defaults to zeta1)");
  b_eta->callback([&] {
    const auto model = groups::model_from_json(slurp(b_opt.in_path));
    const auto z1 = masa::parse_element(*model.group, zeta1_expr);
    const auto z2 =
        zeta2_expr.empty() ? z1 : masa::parse_element(*model.group, zeta2_expr);
    emit(measure_json(bimodule::eta_from_vectors(model, z1, z2)).dump(), b_opt.out_path);
  });

  auto* b_dis = bi->add_subcommand("disintegrate", "fiberwise conditional decomposition");
  add_common(b_dis, b_opt);
  b_dis->add_option("--axis", axis, "projection axis (1 or 2)");
  b_dis->callback([&] {
    const auto beta = bimodule::measure_from_json(slurp(b_opt.in_path));
    const auto fibers = bimodule::disintegrate(beta, axis);
    json j;
    j["axis"] = fibers.axis;
    json base = json::array();
    for (const auto& [t, m] : fibers.base) base.push_back({t, jnum(m.real()), jnum(m.imag())});
    j["base"] = base;
    json fj = json::object();
    for (const auto& [t, row] : fibers.fibers) {
      json r = json::array();
      for (const auto& [s, m] : row) r.push_back({s, jnum(m.real()), jnum(m.imag())});
      fj[std::to_string(t)] = r;
    }
    j["fibers"] = fj;
    emit(j.dump(), b_opt.out_path);
  });

  auto* b_fib = bi->add_subcommand("fibers", "Rajchman profile of every fiber");
  add_common(b_fib, b_opt);
  b_fib->add_option("--axis", axis, "projection axis (1 or 2)");
  b_fib->add_option("--n0", b_n0, "tail start N0");
  b_fib->callback([&] {
    const auto beta = bimodule::measure_from_json(slurp(b_opt.in_path));
    const auto fibers = bimodule::disintegrate(beta, axis);
    const auto summary = bimodule::fiber_mixing_profile(fibers, b_n0, b_opt.horizon);
    json j;
    j["max_tail_sup"] = jnum(summary.max_tail_sup);
    json arr = json::array();
    for (const auto& [t, v] : summary.tail_sups) arr.push_back({t, jnum(v)});
    j["tail_sups"] = arr;
    emit(j.dump(), b_opt.out_path);
  });

  auto* b_snag = bi->add_subcommand("snag", "crossed-product vs SNAG character sum");
  add_common(b_snag, b_opt);
  b_snag->add_option("--f1", f1_expr, "first function, re,im;re,im;...");
  b_snag->add_option("--f2", f2_expr, "second function (defaults to f1)");
  b_snag->add_option("--g1", sg1, "flattened element of H");
  b_snag->add_option("--g2", sg2, "flattened element of H");
  b_snag->add_option("--h1", sh1, "flattened element of H");
  b_snag->add_option("--h2", sh2, "flattened element of H");
  b_snag->add_option("--trials", trials, "run seeded random trials instead");
  b_snag->callback([&] {
    const auto model = bimodule::koopman_from_json(slurp(b_opt.in_path));
    json j;
    if (trials > 0) {
      std::mt19937 rng(b_opt.seed);
      double maxdef = 0.0;
      const long long nh = model.h_space().size();
      for (long long t = 0; t < trials; ++t) {
        const auto f1 = bimodule::random_mean_zero(model, rng);
        const auto f2 = bimodule::random_mean_zero(model, rng);
        const auto r = bimodule::snag_identity_check(
            model, f1, f2, static_cast<long long>(rng() % nh), static_cast<long long>(rng() % nh),
            static_cast<long long>(rng() % nh), static_cast<long long>(rng() % nh));
        maxdef = std::max(maxdef, r.defect);
      }
      j["trials"] = trials;
      j["max_defect"] = jnum(maxdef);
    } else {
      if (f1_expr.empty()) throw PreconditionError("bimodule snag: provide --f1 or --trials");
      const auto f1 = parse_function(f1_expr);
      const auto f2 = f2_expr.empty() ? f1 : parse_function(f2_expr);
      const auto r = bimodule::snag_identity_check(model, f1, f2, sg1, sg2, sh1, sh2);
      j["lhs"] = jcomplex(r.lhs);
      j["rhs"] = jcomplex(r.rhs);
      j["defect"] = jnum(r.defect);
    }
    emit(j.dump(), b_opt.out_path);
  });

  auto* b_tp = bi->add_subcommand("transport", "S_*(mu x lambda) against eta_{f0 x 1}");
  add_common(b_tp, b_opt);
  b_tp->callback([&] {
    const auto model = bimodule::koopman_from_json(slurp(b_opt.in_path));
    const auto [f0, mu] = bimodule::maximal_spectral_type(model);
    const auto tp = bimodule::transport_S(model.h_space(), mu);
    const auto eta = bimodule::koopman_eta(model, f0);
    double defect = 0.0;
    for (const auto& [k, v] : eta.mass) {
      const auto it = tp.mass.find(k);
      defect = std::max(defect,
                        std::abs(v - (it == tp.mass.end() ? Complex(0.0, 0.0) : it->second)));
    }
    for (const auto& [k, v] : tp.mass)
      if (!eta.mass.count(k)) defect = std::max(defect, std::abs(v));
    json j = measure_json(tp);
    j["defect"] = jnum(defect);
    emit(j.dump(), b_opt.out_path);
  });

  auto* b_fp = bi->add_subcommand("fingerprint", "left-right measure-class fingerprint");
  add_common(b_fp, b_opt, /*needs_in=*/false);
  b_fp->add_option("--weights", weights_expr, "comma-separated weights")->required();
  b_fp->add_option("--nmax", nmax, "truncation");
  b_fp->add_option("--compare", compare_expr, "second weight list to compare against");
  b_fp->callback([&] {
    std::vector<double> w;
    for (const std::string& s : split(weights_expr, ',')) w.push_back(std::stod(s));
    const auto fp = bimodule::fingerprint(w, nmax);
    json j = json::parse(bimodule::fingerprint_to_json(fp));
    if (!compare_expr.empty()) {
      std::vector<double> w2;
      for (const std::string& s : split(compare_expr, ',')) w2.push_back(std::stod(s));
      j["equal"] = bimodule::compare(fp, bimodule::fingerprint(w2, nmax));
    }
    emit(j.dump(), b_opt.out_path);
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BudgetError& e) {
    std::cerr << "budget exhausted: " << e.what() << "\n";
    return 2;
  } catch (const PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "input parse error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
