#include "smoothridge/cli.hpp"

#include "smoothridge/basis.hpp"
#include "smoothridge/gic.hpp"
#include "smoothridge/parallel.hpp"
#include "smoothridge/ridge.hpp"
#include "smoothridge/serialize.hpp"
#include "smoothridge/simlab.hpp"
#include "smoothridge/svreg.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace smoothridge {

namespace fs = std::filesystem;

namespace {

constexpr const char* kDefaultGammaAxis = "1e-6:1:7";

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  std::string_view s = text;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError("invalid " + std::string(what) + " '" + std::string(text) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      parts.push_back(text.substr(start));
      return parts;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

fs::path prepare_dir(const std::string& flag) {
  fs::path dir = resolve_output_dir(flag);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (!fs::is_directory(dir)) throw DataError("output directory not writable: " + dir.string());
  return dir;
}

void write_curve(const fs::path& path, const Matrix& points, const Vector& values) {
  auto f = open_output(path);
  for (Eigen::Index k = 0; k < points.cols(); ++k) f << 'x' << k + 1 << ',';
  f << "yhat\n";
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    for (Eigen::Index k = 0; k < points.cols(); ++k) f << format_double(points(i, k)) << ',';
    f << format_double(values(i)) << '\n';
  }
}

struct BasisFlags {
  int m = 0;
  double width_scale = 1.0;
  std::string domain;
  void add(CLI::App* app) {
    app->add_option("--m", m, "Centers per dimension (0: 30 in 1D, 10 in 2D)")->capture_default_str();
    app->add_option("--width-scale", width_scale, "RBF width as a multiple of the center spacing")
        ->capture_default_str();
    app->add_option("--domain", domain, "Basis domain lo:hi[,lo:hi] (default: observed data range)");
  }
};

struct FitInputs {
  Dataset data;
  BasisSpec spec;
  DesignMatrix design;
  Vector ys;
  double offset = 0.0;
};

FitInputs prepare_fit(const std::string& path, const BasisFlags& bf, bool center) {
  std::optional<std::vector<Interval>> domain;
  if (!bf.domain.empty()) domain = parse_domain(bf.domain);
  Dataset data = load_dataset_file(path, std::nullopt, domain);
  const int m = bf.m > 0 ? bf.m : default_centers_per_dim(data.dims());
  BasisSpec spec = make_grid_basis(data.domain(), m, bf.width_scale);
  validate_compatibility(data, spec);
  DesignMatrix design = design_matrix(spec, data.xs());
  double offset = center ? data.ys().mean() : 0.0;
  Vector ys = data.ys().array() - offset;
  return FitInputs{std::move(data), std::move(spec), std::move(design), std::move(ys), offset};
}

std::vector<std::pair<double, double>> grid_from(const std::string& g1, const std::string& g2) {
  return gamma_grid(parse_grid_spec(g1), parse_grid_spec(g2));
}

void write_scan_csv(const fs::path& path, const GammaSelection& sel, const FitInputs& in,
                    const std::optional<Vector>& truth) {
  auto f = open_output(path);
  f << "gamma1,gamma2,gic,mse\n";
  for (const auto& p : sel.grid) {
    f << format_double(p.gamma1) << ',' << format_double(p.gamma2) << ',';
    f << (p.gic ? format_double(*p.gic) : std::string("nan")) << ',';
    if (truth && p.beta.size() > 0) {
      const Vector fitted = (in.design.phi * p.beta).array() + in.offset;
      f << format_double((fitted - *truth).squaredNorm() / static_cast<double>(truth->size()));
    }
    f << '\n';
  }
}

int run_fit(const std::string& path, const std::string& method, std::optional<double> lambda, bool select,
            std::optional<double> gamma1, std::optional<double> gamma2, const std::string& g1_grid,
            const std::string& g2_grid, const std::string& boundary, const std::string& gic_mode, bool center,
            const BasisFlags& bf, const std::string& out_flag, unsigned threads, std::ostream& out) {
  const GicMode mode = parse_gic_mode(gic_mode);
  const BoundaryMode bmode = parse_boundary_mode(boundary);
  if (method != "ridge" && method != "svr") throw ConfigError("unknown method '" + method + "' (ridge, svr)");
  if (method == "ridge" && lambda && select) throw ConfigError("--lambda and --select are mutually exclusive");
  if (gamma1.has_value() != gamma2.has_value()) throw ConfigError("--gamma1 and --gamma2 must be given together");
  const fs::path dir = prepare_dir(out_flag);
  FitInputs in = prepare_fit(path, bf, center);

  std::optional<FitResult> fit;
  nlohmann::ordered_json extra;
  extra["method"] = method;
  if (method == "ridge") {
    if (lambda) {
      fit = ridge_fit(in.design.phi, in.ys, RidgeConfig{*lambda});
    } else {
      fit = ridge_select(in.design.phi, in.ys, default_lambda_grid(), threads).fit;
      extra["selection"] = "ridge GIC over the default lambda grid";
    }
    fit->gic = ridge_gic(in.design.phi, in.ys, *fit, mode);
  } else {
    SvrOptions options;
    options.boundary = bmode;
    options.threads = threads;
    if (gamma1) {
      options.gamma1 = *gamma1;
      options.gamma2 = *gamma2;
      fit = svr_fit(in.design, in.ys, options);
    } else {
      const std::string note = "no --gamma1/--gamma2 given; selected by scan over the gamma grid";
      out << "note: " << note << '\n';
      auto sel = gamma_select(in.design, in.ys, grid_from(g1_grid, g2_grid), options, threads);
      write_scan_csv(dir / "scan.csv", sel, in, std::nullopt);
      fit = std::move(sel.fit);
      fit->warnings.push_back(note);
      extra["selection"] = note;
    }
    fit->gic = approx_gic(in.design, in.ys, *fit, mode);
  }
  fit->response_offset = in.offset;

  nlohmann::ordered_json j = to_json(*fit);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  j["basis"] = {{"m", in.spec.size()}, {"width", in.spec.width()}};
  {
    auto f = open_output(dir / "fit.json");
    write_json(f, j);
  }
  {
    auto f = open_output(dir / "gic.json");
    write_json(f, to_json(*fit->gic));
  }
  const Matrix grid = evaluation_grid(in.spec.domain());
  write_curve(dir / "curve.csv", grid, predict(in.spec, fit->params.beta(), grid).array() + in.offset);
  out << "wrote " << (dir / "fit.json").string() << ", " << (dir / "curve.csv").string() << ", "
      << (dir / "gic.json").string() << '\n';
  if (!fit->converged) out << "warning: fit did not converge\n";
  return exit_ok;
}

}  // namespace

std::vector<double> parse_grid_spec(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3) throw ConfigError("grid must be lo:hi:count, got '" + std::string(text) + "'");
  const double lo = parse_number(parts[0], "grid bound");
  const double hi = parse_number(parts[1], "grid bound");
  const double count = parse_number(parts[2], "grid count");
  if (count < 1 || count != std::floor(count)) throw ConfigError("grid count must be a positive integer");
  return log_grid(lo, hi, static_cast<int>(count));
}

std::vector<Interval> parse_domain(std::string_view text) {
  std::vector<Interval> out;
  for (auto part : split(text, ',')) {
    const auto ends = split(part, ':');
    if (ends.size() != 2) throw ConfigError("domain must be lo:hi[,lo:hi], got '" + std::string(text) + "'");
    Interval iv{parse_number(ends[0], "domain bound"), parse_number(ends[1], "domain bound")};
    if (!(iv.hi > iv.lo)) throw ConfigError("domain interval must have lo < hi");
    out.push_back(iv);
  }
  if (out.empty() || out.size() > 2) throw ConfigError("domain must be 1D or 2D");
  return out;
}

std::string resolve_output_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("SMOOTHRIDGE_OUT"); env && *env) return env;
  return ".";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ridge and smoothly varying ridge regression on radial basis expansions", "smoothridge"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Help for every subcommand");

  std::string out_dir;
  unsigned threads = 0;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", out_dir, "Output directory (default: $SMOOTHRIDGE_OUT or .)");
    sub->add_option("--threads", threads, "Worker threads (0: all cores)")->capture_default_str();
  };

  // fit
  auto* fit = app.add_subcommand("fit", "Fit a CSV dataset (columns x1[,x2],y)");
  std::string fit_path, method = "svr", boundary = "paper", gic_mode = "expected";
  std::string g1_grid = kDefaultGammaAxis, g2_grid = kDefaultGammaAxis;
  std::optional<double> lambda, gamma1, gamma2;
  bool select = false, center = false;
  BasisFlags fit_basis;
  fit->add_option("data", fit_path, "Input CSV")->required();
  fit->add_option("--method", method, "ridge or svr")->capture_default_str();
  fit->add_option("--lambda", lambda, "Ridge tuning parameter (default: select by GIC)");
  fit->add_flag("--select", select, "Select the ridge lambda by GIC over the default grid");
  fit->add_option("--gamma1", gamma1, "Smoothness weight (svr; omit both gammas to scan)");
  fit->add_option("--gamma2", gamma2, "Log-barrier weight (svr)");
  fit->add_option("--gamma1-grid", g1_grid, "gamma1 axis lo:hi:count when scanning")->capture_default_str();
  fit->add_option("--gamma2-grid", g2_grid, "gamma2 axis lo:hi:count when scanning")->capture_default_str();
  fit->add_option("--boundary", boundary, "paper or exact")->capture_default_str();
  fit->add_option("--gic-mode", gic_mode, "expected or empirical")->capture_default_str();
  fit->add_flag("--center", center, "Subtract the response mean before fitting");
  fit_basis.add(fit);
  common(fit);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo comparison on a built-in test function");
  SimConfig cfg;
  std::string function = "peak10", methods = "svr,ridge", sim_boundary = "paper";
  std::string sim_g1, sim_g2;
  int sim_m = 0;
  bool record_runtime = false;
  sim->add_option("--function", function, "peak10, chirp11 or surface13")->capture_default_str();
  sim->add_option("--n", cfg.n, "Sample size (a perfect square for surface13)")->capture_default_str();
  sim->add_option("--alpha", cfg.alpha, "Noise variance")->capture_default_str();
  sim->add_option("--trials", cfg.trials, "Monte-Carlo trials")->capture_default_str();
  sim->add_option("--seed", cfg.seed, "Base seed")->capture_default_str();
  sim->add_option("--methods", methods, "Comma-separated subset of svr,ridge")->capture_default_str();
  sim->add_option("--m", sim_m, "Centers per dimension (0: 30 in 1D, 10 in 2D)")->capture_default_str();
  sim->add_option("--width-scale", cfg.width_scale, "RBF width as a multiple of the center spacing")
      ->capture_default_str();
  sim->add_option("--boundary", sim_boundary, "paper or exact")->capture_default_str();
  sim->add_option("--gamma1-grid", sim_g1, "gamma1 axis lo:hi:count (default 1e-6:1:7)");
  sim->add_option("--gamma2-grid", sim_g2, "gamma2 axis lo:hi:count (default 1e-6:1:7)");
  sim->add_flag("--record-runtime", record_runtime, "Include wall-clock runtime in the report");
  common(sim);

  // scan
  auto* scan = app.add_subcommand("scan", "Approximate GIC over a gamma grid");
  std::string scan_path, scan_boundary = "paper", truth_fn;
  std::string scan_g1 = kDefaultGammaAxis, scan_g2 = kDefaultGammaAxis;
  BasisFlags scan_basis;
  scan->add_option("data", scan_path, "Input CSV")->required();
  scan->add_option("--gamma1-grid", scan_g1, "gamma1 axis lo:hi:count")->capture_default_str();
  scan->add_option("--gamma2-grid", scan_g2, "gamma2 axis lo:hi:count")->capture_default_str();
  scan->add_option("--boundary", scan_boundary, "paper or exact")->capture_default_str();
  scan->add_option("--truth", truth_fn, "Built-in function for the mse column (peak10, chirp11, surface13)");
  scan_basis.add(scan);
  common(scan);

  // basis-dump
  auto* dump = app.add_subcommand("basis-dump", "Write basis centers and width as CSV");
  BasisFlags dump_basis;
  dump_basis.domain = "-2:2";
  dump->add_option("--m", dump_basis.m, "Centers per dimension (0: 30 in 1D, 10 in 2D)")->capture_default_str();
  dump->add_option("--width-scale", dump_basis.width_scale, "RBF width as a multiple of the center spacing")
      ->capture_default_str();
  dump->add_option("--domain", dump_basis.domain, "lo:hi[,lo:hi]")->capture_default_str();
  dump->add_option("--out", out_dir, "Output directory (default: $SMOOTHRIDGE_OUT or .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  }

  try {
    const unsigned workers = resolve_threads(threads);
    if (fit->parsed()) {
      return run_fit(fit_path, method, lambda, select, gamma1, gamma2, g1_grid, g2_grid, boundary, gic_mode,
                     center, fit_basis, out_dir, workers, out);
    }
    if (sim->parsed()) {
      cfg.function = parse_function_id(function);
      cfg.methods.clear();
      for (auto part : split(methods, ',')) cfg.methods.push_back(parse_method(part));
      if (sim_m > 0) cfg.m_per_dim = sim_m;
      cfg.boundary = parse_boundary_mode(sim_boundary);
      if (!sim_g1.empty() || !sim_g2.empty())
        cfg.gamma_grid = grid_from(sim_g1.empty() ? kDefaultGammaAxis : sim_g1,
                                   sim_g2.empty() ? kDefaultGammaAxis : sim_g2);
      cfg.threads = workers;
      cfg.validate();
      const fs::path dir = prepare_dir(out_dir);
      const SimReport report = run_benchmark(cfg);
      {
        auto f = open_output(dir / "report.json");
        write_json(f, to_json(report, record_runtime));
      }
      {
        auto f = open_output(dir / "trials.csv");
        f << "method,trial,mse,gamma1,gamma2,lambda,converged,iterations,failed\n";
        for (const auto& m : report.methods)
          for (const auto& t : m.trials)
            f << to_string(m.method) << ',' << t.trial << ',' << (t.failed ? "nan" : format_double(t.mse)) << ','
              << format_double(t.gamma1) << ',' << format_double(t.gamma2) << ',' << format_double(t.lambda)
              << ',' << (t.converged ? 1 : 0) << ',' << t.iterations << ',' << (t.failed ? 1 : 0) << '\n';
      }
      for (const auto& m : report.methods) {
        if (m.first_curve)
          write_curve(dir / ("curve_" + std::string(to_string(m.method)) + ".csv"), m.first_curve->first,
                      m.first_curve->second);
        out << to_string(m.method) << ": mean mse " << format_double(m.mean_mse) << " sd "
            << format_double(m.sd_mse) << " (" << m.trials.size() - m.failed_trials.size() << " of "
            << m.trials.size() << " trials)\n";
      }
      for (const auto& w : report.warnings) out << "warning: " << w << '\n';
      if (!report.ok) {
        err << "error: more than 10% of trials failed\n";
        return exit_numerical;
      }
      return exit_ok;
    }
    if (scan->parsed()) {
      const fs::path dir = prepare_dir(out_dir);
      FitInputs in = prepare_fit(scan_path, scan_basis, false);
      SvrOptions options;
      options.boundary = parse_boundary_mode(scan_boundary);
      options.threads = workers;
      std::optional<Vector> truth;
      if (!truth_fn.empty()) {
        const FunctionId id = parse_function_id(truth_fn);
        truth = Vector(static_cast<Eigen::Index>(in.data.size()));
        for (Eigen::Index i = 0; i < truth->size(); ++i)
          (*truth)(i) = true_function(id, in.data.xs().row(i).transpose());
      }
      auto sel = gamma_select(in.design, in.ys, grid_from(scan_g1, scan_g2), options, workers);
      write_scan_csv(dir / "scan.csv", sel, in, truth);
      nlohmann::ordered_json j = to_json(sel.fit);
      j["method"] = "svr";
      j["basis"] = {{"m", in.spec.size()}, {"width", in.spec.width()}};
      auto f = open_output(dir / "fit.json");
      write_json(f, j);
      out << "selected gamma1 " << format_double(sel.gamma1) << " gamma2 " << format_double(sel.gamma2)
          << "; wrote " << (dir / "scan.csv").string() << ", " << (dir / "fit.json").string() << '\n';
      return exit_ok;
    }
    if (dump->parsed()) {
      const fs::path dir = prepare_dir(out_dir);
      const auto domain = parse_domain(dump_basis.domain);
      const int m = dump_basis.m > 0 ? dump_basis.m : default_centers_per_dim(domain.size());
      const BasisSpec spec = make_grid_basis(domain, m, dump_basis.width_scale);
      auto f = open_output(dir / "basis.csv");
      for (std::size_t k = 0; k < spec.dims(); ++k) f << 'c' << k + 1 << ',';
      f << "width\n";
      for (Eigen::Index i = 0; i < spec.centers().rows(); ++i) {
        for (Eigen::Index k = 0; k < spec.centers().cols(); ++k) f << format_double(spec.centers()(i, k)) << ',';
        f << format_double(spec.width()) << '\n';
      }
      out << "wrote " << (dir / "basis.csv").string() << '\n';
      return exit_ok;
    }
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return exit_numerical;
  }
  return exit_usage;
}

}  // namespace smoothridge
