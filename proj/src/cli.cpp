#include "dwv/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "dwv/assumptions.hpp"
#include "dwv/bounds.hpp"
#include "dwv/wkb.hpp"

namespace dwv {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

// Artifact writer: every CSV opens with the config hash and a column row.
class Csv {
 public:
  Csv(const ExperimentConfig& cfg, const std::string& name,
      const std::string& columns)
      : path_(fs::path(cfg.out_dir) / name), out_(path_, std::ios::binary) {
    if (!out_) throw NumericError("cannot write artifact " + path_.string());
    out_ << "# config=" << hex64(config_hash(cfg))
         << " toolkit=" << kToolkitVersion << " experiment=" << cfg.name
         << "\n";
    out_ << columns << "\n";
  }
  template <class... Ts>
  void row(const Ts&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, out_ << cells), ...);
    out_ << "\n";
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::vector<std::string> verb_check_assumptions(const ExperimentConfig& cfg) {
  auto fam = cfg.family.build();
  GridSpec gs;
  gs.tol = std::min(cfg.tol, 1e-8);
  AssumptionReport rep = check_all(fam, cfg.horizon, gs);
  Csv csv(cfg, "assumptions.csv", "condition,pass,witness_t[time],constants,note");
  for (const auto& r : rep.records) {
    std::ostringstream ks;
    for (std::size_t i = 0; i < r.constants.size(); ++i) {
      if (i) ks << "|";
      ks << r.constants[i].first << "=" << fmt(r.constants[i].second);
    }
    csv.row(condition_name(r.id), r.pass ? 1 : 0, fmt(r.witness_t), ks.str(),
            r.note);
  }
  return {"assumptions.csv"};
}

std::vector<std::string> verb_zones(const ExperimentConfig& cfg) {
  auto fam = cfg.family.build();
  Csv csv(cfg, "zones.csv", "t[time],xi[frequency],tag,region");
  for (double t : cfg.times())
    for (double xi : cfg.radii()) {
      Zone z = classify(fam, cfg.zones, t, xi);
      const char* reg = z.region == Region::hyperbolic ? "hyperbolic"
                        : z.region == Region::elliptic ? "elliptic"
                                                       : "boundary";
      csv.row(fmt(t), fmt(xi), zone_tag_name(z.tag), reg);
    }
  Csv sep(cfg, "separating_times.csv",
          "xi[frequency],t_diss[time],t_ell[time],t_red[time],t_osc[time],"
          "t_xi[time]");
  auto opt = [](const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
  };
  for (double xi : cfg.radii()) {
    SeparatingTimes st =
        separating_times(fam, cfg.zones, xi, cfg.t_grid.hi, cfg.tol);
    sep.row(fmt(xi), opt(st.t_diss), opt(st.t_ell), opt(st.t_red),
            opt(st.t_osc), opt(st.t_xi));
  }
  return {"zones.csv", "separating_times.csv"};
}

KernelTable solve_table(const ExperimentConfig& cfg,
                        const CoefficientFamily& fam) {
  return kernel_table(fam, cfg.zones, cfg.times(), cfg.radii(), cfg.tol,
                      std::log(1e-70), cfg.jobs);
}

std::vector<std::string> verb_solve(const ExperimentConfig& cfg) {
  auto fam = cfg.family.build();
  KernelTable table = solve_table(cfg, fam);
  DataProfile d0 = cfg.profile(cfg.data0), d1 = cfg.profile(cfg.data1);
  Csv csv(cfg, "norms.csv", "t[time],norm_u[Hsigma],norm_ut[Hsigma]");
  for (std::size_t i = 0; i < table.ts.size(); ++i) {
    double nu = std::sqrt(norm_from_table(table, i, d0, d1, cfg.sigma, cfg.dim));
    double nut = std::sqrt(
        norm_from_table(table, i, d0, d1, cfg.sigma, cfg.dim, true));
    csv.row(fmt(table.ts[i]), fmt(nu), fmt(nut));
  }
  Csv kcsv(cfg, "kernels.csv",
           "t[time],xi[frequency],abs_K0,abs_dtK0,abs_K1,abs_dtK1");
  for (std::size_t i = 0; i < table.ts.size(); ++i)
    for (std::size_t j = 0; j < table.rs.size(); ++j) {
      const KernelValues& kv = table.at(i, j);
      kcsv.row(fmt(table.ts[i]), fmt(table.rs[j]), fmt(std::abs(kv.K0)),
               fmt(std::abs(kv.dtK0)), fmt(std::abs(kv.K1)),
               fmt(std::abs(kv.dtK1)));
    }
  return {"norms.csv", "kernels.csv"};
}

// decay-fit reuses norms.csv when the solve stage already produced it;
// otherwise the kernel table is computed here.
std::vector<std::string> verb_decay_fit(const ExperimentConfig& cfg) {
  std::vector<double> ts, nu, nut;
  fs::path norms = fs::path(cfg.out_dir) / "norms.csv";
  if (fs::exists(norms)) {
    std::ifstream in(norms);
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#' || line[0] == 't') continue;
      double a, b, c;
      if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &a, &b, &c) == 3) {
        ts.push_back(a);
        nu.push_back(b);
        nut.push_back(c);
      }
    }
  }
  if (ts.empty()) {
    auto fam = cfg.family.build();
    KernelTable table = solve_table(cfg, fam);
    DataProfile d0 = cfg.profile(cfg.data0), d1 = cfg.profile(cfg.data1);
    ts = table.ts;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      nu.push_back(
          std::sqrt(norm_from_table(table, i, d0, d1, cfg.sigma, cfg.dim)));
      nut.push_back(std::sqrt(
          norm_from_table(table, i, d0, d1, cfg.sigma, cfg.dim, true)));
    }
  }
  Csv csv(cfg, "decay.csv",
          "quantity,slope[dlog/dlog(1+t)],intercept,residual[rms],n_used");
  for (auto [name, vals] : {std::pair{"norm_u", &nu}, {"norm_ut", &nut}}) {
    DecayReport r =
        fit_decay(ts, *vals, FitAxes::LogLog, cfg.t_grid.lo, cfg.t_grid.hi);
    csv.row(name, fmt(r.slope), fmt(r.intercept), fmt(r.residual), r.n_used);
  }
  return {"decay.csv"};
}

std::vector<std::string> verb_verify_bounds(const ExperimentConfig& cfg) {
  auto fam = cfg.family.build();
  const BoundKind kinds[] = {
      BoundKind::HypZone,       BoundKind::OscZone,
      BoundKind::RedZone,       BoundKind::EllRefined,
      BoundKind::EllUnrefined,  BoundKind::DissZone,
      BoundKind::GluedCase11,   BoundKind::GluedCase12,
      BoundKind::GluedCase13Ell, BoundKind::GluedCase13Red,
      BoundKind::GluedCase2Large, BoundKind::GluedCase22,
      BoundKind::KernelLarge,   BoundKind::KernelSmall,
      BoundKind::KernelDiss,    BoundKind::TheoremRate};
  Csv csv(cfg, "bounds.csv",
          "kind,samples,sup_ratio,log_sup_half,log_sup_full,status,note");
  for (BoundKind k : kinds) {
    SampleSpec sp;
    sp.jobs = cfg.jobs;
    try {
      BoundReport rep = verify_bound(fam, cfg.zones, k, sp);
      csv.row(bound_kind_name(k), rep.samples.size(),
              fmt(rep.empirical_constant()), fmt(rep.log_sup_half),
              fmt(rep.log_sup_full), rep.pass ? "pass" : "fail", "");
    } catch (const ParamError& e) {
      csv.row(bound_kind_name(k), 0, "", "", "", "skipped", e.what());
    } catch (const NumericError& e) {
      csv.row(bound_kind_name(k), 0, "", "", "", "skipped", e.what());
    }
  }
  return {"bounds.csv"};
}

std::vector<std::string> verb_wkb_check(const ExperimentConfig& cfg) {
  auto fam = cfg.family.build();
  Csv csv(cfg, "wkb.csv", "check,zone,name,value,bound,pass");

  // operator identity residual over in-zone grid points
  for (auto z : {WkbZone::hyp, WkbZone::ell}) {
    double worst = 0.0;
    int used = 0;
    for (double t : cfg.times()) {
      if (used >= 40) break;
      for (double xi : cfg.radii()) {
        if (used >= 40) break;
        try {
          worst = std::max(worst, diag_step(fam, cfg.zones, z, t, xi).op_residual);
          ++used;
        } catch (const ParamError&) {
        }
      }
    }
    if (used > 0)
      csv.row("operator-identity", wkb_zone_name(z), "residual", fmt(worst),
              fmt(1e-8), worst <= 1e-8 ? 1 : 0);
  }

  // improvement decay along the smallest-frequency ray
  {
    double xi = cfg.radii().front();
    std::vector<double> n1;
    for (double t : cfg.times()) {
      try {
        n1.push_back(diag_step(fam, cfg.zones, WkbZone::ell, t, xi).n1_dist);
      } catch (const ParamError&) {
      }
    }
    if (n1.size() >= 2)
      csv.row("improvement-decay", "elliptic", "final_n1", fmt(n1.back()),
              fmt(0.1), (n1.back() < 0.1 && n1.back() <= n1.front()) ? 1 : 0);
  }

  // symbol class constants
  const SymbolName names[] = {SymbolName::Bracket, SymbolName::RhoOmega,
                              SymbolName::StepOneRemainder,
                              SymbolName::Improvement,
                              SymbolName::StepTwoRemainder,
                              SymbolName::SecondOrderProxy};
  for (auto z : {WkbZone::hyp, WkbZone::ell})
    for (SymbolName f : names) {
      try {
        SymbolCheck sc = symbol_check(fam, cfg.zones, f, z, SymbolSampleSpec{});
        csv.row("symbol-constant", wkb_zone_name(z), symbol_name(f),
                fmt(sc.constants[0]), "", sc.pass ? 1 : 0);
      } catch (const NumericError&) {
      }
    }

  // integrable catalog entries against their majorants
  std::vector<double> xi_hyp;
  for (int i = 0; i < 12; ++i)
    xi_hyp.push_back(0.5 * std::pow(10.0, 1.5 * i / 11.0));
  for (SymbolName f :
       {SymbolName::StepTwoRemainder, SymbolName::SecondOrderProxy}) {
    auto rep = integrability_check(fam, cfg.zones, f, WkbZone::hyp, xi_hyp,
                                   6.0 * cfg.horizon, 1e-9);
    csv.row("integrability", "hyperbolic", symbol_name(f), fmt(rep.sup),
            fmt(kIntegrabilityC * rep.majorant), rep.pass ? 1 : 0);
  }
  {
    std::vector<double> xi_ell;
    for (int i = 0; i < 5; ++i) xi_ell.push_back(0.002 * std::pow(3.0, i));
    auto rep = integrability_check(fam, cfg.zones, SymbolName::StepTwoRemainder,
                                   WkbZone::ell, xi_ell, 6.0 * cfg.horizon,
                                   1e-9);
    csv.row("integrability", "elliptic", symbol_name(SymbolName::StepTwoRemainder),
            fmt(rep.sup), fmt(kIntegrabilityC * rep.majorant), rep.pass ? 1 : 0);
  }

  // remainder propagator against the direct solve on hyperbolic samples
  {
    int done = 0;
    for (double xi : cfg.radii()) {
      if (done >= 3) break;
      std::vector<double> ts;
      for (double t : cfg.times())
        if (classify(fam, cfg.zones, t, xi).tag == ZoneTag::Hyp)
          ts.push_back(t);
      if (ts.size() < 2) continue;
      double s = ts.front(), t = std::min(ts.back(), 2.0 * s);
      if (!(t > s)) continue;
      try {
        auto pb = peano_baker(fam, cfg.zones, s, t, xi, 24, 1e-9);
        std::ostringstream nm;
        nm << "s=" << fmt(s) << ";t=" << fmt(t) << ";xi=" << fmt(xi);
        csv.row("peano-baker", "hyperbolic", nm.str(), fmt(pb.residual),
                fmt(1e-8), pb.residual <= 1e-8 ? 1 : 0);
        ++done;
      } catch (const ParamError&) {
      }
    }
  }
  return {"wkb.csv"};
}

// Aggregation of whatever artifacts a previous stage left in out_dir.
std::vector<std::string> verb_report(const ExperimentConfig& cfg) {
  Csv csv(cfg, "summary.csv", "artifact,metric,value");
  auto each_row = [&](const std::string& name,
                      const std::function<void(const std::vector<std::string>&)>&
                          body) {
    std::ifstream in(fs::path(cfg.out_dir) / name);
    if (!in) return false;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (!header_seen) {
        header_seen = true;
        continue;
      }
      std::vector<std::string> cells;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) cells.push_back(cell);
      body(cells);
    }
    return true;
  };

  {
    int pass = 0, total = 0;
    if (each_row("assumptions.csv", [&](const auto& c) {
          ++total;
          if (c.size() > 1 && c[1] == "1") ++pass;
        }))
      csv.row("assumptions", "conditions_passed",
              std::to_string(pass) + "/" + std::to_string(total));
  }
  {
    std::map<std::string, long> tags;
    long total = 0;
    if (each_row("zones.csv", [&](const auto& c) {
          if (c.size() > 2) ++tags[c[2]];
          ++total;
        })) {
      for (const auto& [tag, n] : tags)
        csv.row("zones", "count_" + tag, n);
      long unc = tags.count("uncovered") ? tags["uncovered"] : 0;
      csv.row("zones", "covered_fraction",
              fmt(total > 0 ? 1.0 - double(unc) / double(total) : 0.0));
    }
  }
  {
    long rows = 0;
    double first_u = 0.0, last_u = 0.0;
    if (each_row("norms.csv", [&](const auto& c) {
          if (c.size() > 1) {
            if (rows == 0) first_u = std::atof(c[1].c_str());
            last_u = std::atof(c[1].c_str());
          }
          ++rows;
        })) {
      csv.row("norms", "rows", rows);
      if (rows > 0 && last_u > 0.0)
        csv.row("norms", "total_log_drop_u", fmt(std::log(first_u / last_u)));
    }
  }
  each_row("decay.csv", [&](const auto& c) {
    if (c.size() > 1) csv.row("decay", "slope_" + c[0], c[1]);
  });
  {
    int pass = 0, total = 0;
    if (each_row("bounds.csv", [&](const auto& c) {
          if (c.size() > 5 && c[5] != "skipped") {
            ++total;
            if (c[5] == "pass") ++pass;
          }
        }))
      csv.row("bounds", "kinds_passed",
              std::to_string(pass) + "/" + std::to_string(total));
  }
  {
    int pass = 0, total = 0;
    if (each_row("wkb.csv", [&](const auto& c) {
          if (c.size() > 5) {
            ++total;
            if (c[5] == "1") ++pass;
          }
        }))
      csv.row("wkb", "checks_passed",
              std::to_string(pass) + "/" + std::to_string(total));
  }
  return {"summary.csv"};
}

}  // namespace

const std::vector<std::string>& cli_verbs() {
  static const std::vector<std::string> v = {
      "check-assumptions", "zones",     "solve",  "verify-bounds",
      "decay-fit",         "wkb-check", "report"};
  return v;
}

std::vector<std::string> run_verb(const std::string& verb,
                                  const ExperimentConfig& cfg) {
  fs::create_directories(cfg.out_dir);
  auto start = std::chrono::steady_clock::now();
  std::vector<std::string> outputs;
  if (verb == "check-assumptions") outputs = verb_check_assumptions(cfg);
  else if (verb == "zones") outputs = verb_zones(cfg);
  else if (verb == "solve") outputs = verb_solve(cfg);
  else if (verb == "verify-bounds") outputs = verb_verify_bounds(cfg);
  else if (verb == "decay-fit") outputs = verb_decay_fit(cfg);
  else if (verb == "wkb-check") outputs = verb_wkb_check(cfg);
  else if (verb == "report") outputs = verb_report(cfg);
  else throw ParamError("unknown verb \"" + verb + "\"");

  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                std::chrono::steady_clock::now() - start)
                .count();
  std::ofstream man(fs::path(cfg.out_dir) / "manifest.txt", std::ios::app);
  man << "verb=" << verb << " config=" << hex64(config_hash(cfg))
      << " toolkit=" << kToolkitVersion << " outputs=";
  for (std::size_t i = 0; i < outputs.size(); ++i)
    man << (i ? "," : "") << outputs[i];
  man << " wall_ms=" << ms << "\n";
  return outputs;
}

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"numerical verification toolkit for damped wave decay"};
  std::string verb, config_path, out_override;
  int jobs_override = 0;
  double tol_override = 0.0;
  app.add_option("verb", verb, "pipeline stage")
      ->required()
      ->check(CLI::IsMember(cli_verbs()));
  app.add_option("--config", config_path, "experiment configuration (JSON)")
      ->required();
  app.add_option("--out", out_override, "output directory override");
  app.add_option("--jobs", jobs_override, "parallel sweep width override");
  app.add_option("--tol", tol_override, "tolerance override");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    ExperimentConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (jobs_override > 0) cfg.jobs = jobs_override;
    if (tol_override > 0.0) cfg.tol = tol_override;
    if (const char* root = std::getenv("DWV_OUT_ROOT"))
      if (root[0] != '\0' && fs::path(cfg.out_dir).is_relative())
        cfg.out_dir = (fs::path(root) / cfg.out_dir).string();
    auto outputs = run_verb(verb, cfg);
    std::printf("%s: wrote", verb.c_str());
    for (const auto& f : outputs) std::printf(" %s/%s", cfg.out_dir.c_str(), f.c_str());
    std::printf("\n");
    return 0;
  } catch (const ParamError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "%s failed: %s\n", verb.c_str(), e.what());
    return 1;
  }
}

}  // namespace dwv
