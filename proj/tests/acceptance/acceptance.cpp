// Acceptance harness: one PASS/FAIL line per criterion, exit status 0 only if all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "bolax/bo_evolve.hpp"
#include "bolax/green_birman.hpp"
#include "bolax/lax_spectrum.hpp"

using namespace bolax;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& f) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = f();
  } catch (const std::exception& e) {
    o = {false, std::string("error: ") + e.what()};
  }
  const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), sec);
  std::fflush(stdout);
}

std::string num(double v) {
  char b[32];
  std::snprintf(b, sizeof b, "%.4g", v);
  return b;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Entry {
  const char* name;
  PotentialSpec s;
};

std::vector<Entry> corpus() {
  return {{"soliton(0.5)", PotentialSpec::soliton(0.5)},
          {"soliton(1)", PotentialSpec::soliton(1.0)},
          {"soliton(2)", PotentialSpec::soliton(2.0)},
          {"gaussian(1,2)", PotentialSpec::gaussian(1.0, 2.0)},
          {"two_soliton", PotentialSpec::multi_soliton({{1.0, -30.0}, {2.0, 30.0}})}};
}

ComplexField normalized_physical(const PotentialSpec& s, const DiscreteSpectrum& ds, std::size_t k,
                                 const PhysicalGrid& g, cplx* pairing = nullptr) {
  const double lambda = ds.eigenvalues[k];
  const NormalizedEigenfunction ne = normalize_eigenfunction(ds.eigenfunction(k), s, lambda);
  if (pairing) *pairing = ne.pairing_after;
  return to_physical(ne.phi, g, transport_taper(lambda));
}

}  // namespace

int main() {
  const PhysicalGrid g;

  // Residue oracle: L_u has the single eigenvalue -nu/2 for the soliton 2 nu / (1 + nu^2 x^2).
  criterion(1, "soliton eigenvalue", [] {
    Outcome o{true, ""};
    for (double nu : {0.5, 1.0, 2.0}) {
      const auto t0 = std::chrono::steady_clock::now();
      const DiscreteSpectrum ds = discrete_spectrum(PotentialSpec::soliton(nu));
      const double sec = seconds_since(t0);
      const double err = ds.size() == 1 ? std::abs(ds.eigenvalues[0] + nu / 2.0) / (nu / 2.0) : INFINITY;
      o.pass = o.pass && ds.size() == 1 && err <= 1e-3 && sec <= 60.0;
      o.detail += "nu=" + num(nu) + " count=" + std::to_string(ds.size()) + " rel=" + num(err) + " t=" + num(sec) + "s; ";
    }
    o.detail += "tol 1e-3, 60 s";
    return o;
  });

  criterion(2, "pairing identity", [] {
    double worst = 0.0;
    std::size_t pairs = 0;
    for (const auto& e : corpus()) {
      const DiscreteSpectrum ds = discrete_spectrum(e.s);
      for (std::size_t k = 0; k < ds.size(); ++k, ++pairs)
        worst = std::max(worst, identity_check(ds.eigenfunction(k), e.s, ds.eigenvalues[k]));
    }
    return Outcome{worst <= 1e-3, "max rel=" + num(worst) + " over " + std::to_string(pairs) + " eigenpairs; tol 1e-3"};
  });

  criterion(3, "spectrum lower bound", [] {
    double margin = INFINITY;
    for (const auto& e : corpus()) {
      const DiscreteSpectrum ds = discrete_spectrum(e.s);
      margin = std::min(margin, ds.min_eigenvalue + ds.sup_norm + 1e-6);
    }
    return Outcome{margin >= 0.0, "min(lambda_min + sup|u| + 1e-6)=" + num(margin) + " >= 0"};
  });

  criterion(4, "integral equation residual", [&] {
    double worst = 0.0;
    for (const auto& e : corpus()) {
      const DiscreteSpectrum ds = discrete_spectrum(e.s, transport_options(e.s, g, {}));
      for (std::size_t k = 0; k < ds.size(); ++k)
        worst = std::max(worst, integral_residual(normalized_physical(e.s, ds, k, g), e.s, ds.eigenvalues[k]));
    }
    return Outcome{worst <= 1e-3, "max=" + num(worst) + "; tol 1e-3"};
  });

  // ||u||_2^2 = 2 pi nu for the soliton (residue at x = i/nu), so the continuum value is sqrt(2).
  criterion(5, "resolvent HS norm", [] {
    const PhysicalGrid hg = PhysicalGrid::make(16384, -400.0, 400.0);
    const double hs = hs_norm_T(PotentialSpec::soliton(1.0), -0.5, hg);
    const double ref = std::sqrt(2.0);
    const double stated = std::sqrt(kTwoPi) / std::sqrt(0.5);
    const double rel = std::abs(hs - ref) / ref, rel_stated = std::abs(hs - stated) / stated;
    return Outcome{rel <= 1e-2 && rel_stated > 0.5,
                   "hs=" + num(hs) + " vs ||u||/sqrt(2 pi |l|)=" + num(ref) + " rel=" + num(rel) +
                       "; vs ||u||/sqrt|l|=" + num(stated) + " rel=" + num(rel_stated) + " (rejected)"};
  });

  criterion(6, "eigenfunction tail limit", [&] {
    Outcome o{true, ""};
    for (double nu : {1.0, 2.0}) {
      const PotentialSpec s = PotentialSpec::soliton(nu);
      const DiscreteSpectrum ds = discrete_spectrum(s, transport_options(s, g, {}));
      cplx pairing;
      const ComplexField phi = normalized_physical(s, ds, 0, g, &pairing);
      const TailLimit t = tail_limit(phi, pairing, ds.eigenvalues[0]);
      const double lim = std::abs(t.limit - 1.0);
      o.pass = o.pass && t.error <= 1e-2 && lim <= 1e-2;
      o.detail += "nu=" + num(nu) + " |limit-1|=" + num(lim) + " max side err=" + num(t.error) +
                  " extrapolated=" + num(std::abs(t.joint_extrapolated - 1.0)) + "; ";
    }
    o.detail += "tol 1e-2";
    return o;
  });

  criterion(7, "two-soliton simplicity", [] {
    const DiscreteSpectrum ds = discrete_spectrum(PotentialSpec::multi_soliton({{1.0, -30.0}, {2.0, 30.0}}));
    bool ok = ds.size() == 2;
    std::string d = "count=" + std::to_string(ds.size());
    if (ok) {
      const double e0 = std::abs(ds.eigenvalues[0] + 1.0), e1 = std::abs(ds.eigenvalues[1] + 0.5);
      const double gap = ds.eigenvalues[1] - ds.eigenvalues[0];
      const double tol = 10.0 * stability_tolerance(ds.eigenvalues[0], ds.sup_norm);
      std::size_t stable = 0;
      for (const auto& r : ds.rows) stable += r.stable;
      ok = e0 <= 5e-3 && e1 <= 5e-3 && stable == 2 && gap > tol;
      d += " lambda=" + num(ds.eigenvalues[0]) + "," + num(ds.eigenvalues[1]) + " err=" + num(e0) + "," + num(e1) +
           " stable=" + std::to_string(stable) + " gap/(10 tol)=" + num(gap / tol);
    }
    return Outcome{ok, d + "; tol 5e-3"};
  });

  criterion(8, "phase constant", [&] {
    const PotentialSpec a = PotentialSpec::soliton(1.0), b = PotentialSpec::soliton(1.0, 5.0);
    const PhaseConstant pa = phase_constant(a, discrete_spectrum(a), 0, g);
    const PhaseConstant pb = phase_constant(b, discrete_spectrum(b), 0, g);
    const double shift = std::abs((pb.gamma - pa.gamma) - cplx(-5.0));
    const bool ok = pa.flatness <= 1e-2 && pb.flatness <= 1e-2 && shift <= 1e-2;
    return Outcome{ok, "flatness=" + num(pa.flatness) + "," + num(pb.flatness) + " |shift+5|=" + num(shift) + "; tol 1e-2"};
  });

  criterion(9, "Birman-Schwinger correspondence", [&] {
    std::size_t bad = 0, cases = 0, marginal = 0;
    for (const auto& e : corpus()) {
      const DiscreteSpectrum ds = discrete_spectrum(e.s);
      for (double E : {0.1, 0.25, 0.75}) {
        const BSCount b = bs_count(e.s, E, g, ds);
        ++cases;
        bad += !b.agree;
        marginal += (b.marginal_K + b.marginal_L) > 0;
      }
    }
    const BSOperator K = assemble_K(PotentialSpec::soliton(1.0), g, 0.5);
    const double top = top_eigenvalues(K, 0.5, 1).values.front();
    const bool ok = bad == 0 && std::abs(top - 1.0) <= 2e-3;
    return Outcome{ok, std::to_string(cases - bad) + "/" + std::to_string(cases) + " agree (" +
                           std::to_string(marginal) + " marginal); top K_{-0.5}=" + num(top) + " tol 2e-3"};
  });

  const PotentialSpec weak = PotentialSpec::soliton(1.0).with_coupling(0.05);
  criterion(10, "secular equation", [&] {
    double worst = 0.0;
    for (double E : {1e-2, 1e-3}) worst = std::max(worst, secular_solve(weak, E, g).relative_mismatch);
    return Outcome{worst <= 1e-6, "max rel mismatch=" + num(worst) + "; tol 1e-6"};
  });

  criterion(11, "count bound scan", [&] {
    const CountBoundScan sc = count_bound_scan(weak, {1e-2, 1e-3, 1e-4}, g);
    const bool ok = sc.band_ratio <= 1.5 && sc.hs_growth >= 5.0 && sc.count_constant_in_tail;
    return Outcome{ok, "band ratio=" + num(sc.band_ratio) + " (<= 1.5), ||K||_HS^2 growth=" + num(sc.hs_growth) +
                           " (>= 5), count constant in tail=" + (sc.count_constant_in_tail ? "yes" : "no")};
  });

  criterion(12, "coupling monotonicity", [] {
    std::vector<double> c;
    for (int k = 1; k <= 10; ++k) c.push_back(0.2 * k);
    const CouplingBranch br = coupling_sweep(PotentialSpec::soliton(1.0), c);
    double worst = -INFINITY;
    for (std::size_t n = 0; n < br.branch_count(); ++n) worst = std::max(worst, br.max_increment(n));
    const bool ok = br.branch_count() > 0 && worst <= -1e-8;
    return Outcome{ok, std::to_string(br.branch_count()) + " branch(es), max increment=" + num(worst) + " <= -1e-8"};
  });

  criterion(13, "isospectral flow", [] {
    const auto t0 = std::chrono::steady_clock::now();
    EvolutionConfig cfg;
    cfg.t_final = 5.0;
    cfg.snapshot_stride = 500;
    const Trajectory tr = evolve(PotentialSpec::soliton(1.0), cfg);
    const DriftReport d = isospectral_drift(tr);
    const double speed = std::abs(peak_speed(tr) - 1.0);
    const double sec = seconds_since(t0);
    const bool ok = !d.drift.empty() && d.max_drift() <= 1e-3 && tr.mass_drift() <= 1e-8 &&
                    tr.energy_drift() <= 1e-8 && speed <= 1e-3 && sec <= 300.0;
    return Outcome{ok, "drift=" + num(d.max_drift()) + " mass=" + num(tr.mass_drift()) + " energy=" +
                           num(tr.energy_drift()) + " |c-nu|=" + num(speed) + " t=" + num(sec) + "s"};
  });

  criterion(14, "scaling covariance", [] {
    double worst = 0.0;
    bool counts = true;
    for (const auto& e : corpus()) {
      if (std::string(e.name) == "two_soliton") continue;
      const DiscreteSpectrum base = discrete_spectrum(e.s);
      for (double f : {0.5, 2.0}) {
        const DiscreteSpectrum sc = discrete_spectrum(e.s.scaled(f));
        counts = counts && sc.size() == base.size();
        for (std::size_t k = 0; k < std::min(sc.size(), base.size()); ++k)
          worst = std::max(worst, std::abs(sc.eigenvalues[k] - f * base.eigenvalues[k]) / std::abs(f * base.eigenvalues[k]));
      }
    }
    return Outcome{counts && worst <= 2e-3, "max rel=" + num(worst) + "; tol 2e-3"};
  });

  std::printf("%d of 14 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
