#include "lipnet/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "lipnet/certification.hpp"
#include "lipnet/covering.hpp"
#include "lipnet/extension.hpp"
#include "lipnet/lattice.hpp"
#include "lipnet/pipeline.hpp"
#include "lipnet/serialization.hpp"
#include "lipnet/smoothing.hpp"
#include "lipnet/targets.hpp"

namespace lipnet {

std::string to_string(Command c) {
  switch (c) {
    case Command::Approximate:
      return "approximate";
    case Command::Certify:
      return "certify";
    case Command::UniformM:
      return "uniform-m";
    case Command::Sweep:
      return "sweep";
  }
  return "?";
}

Command parse_command(std::string_view name) {
  if (name == "approximate") return Command::Approximate;
  if (name == "certify") return Command::Certify;
  if (name == "uniform-m") return Command::UniformM;
  if (name == "sweep") return Command::Sweep;
  throw ArgumentError("unknown command '" + std::string(name) + "'");
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string join(const std::vector<double>& v, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += format_double(v[i]);
  }
  return out;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    std::istringstream words(token);
    std::string w;
    while (words >> w) out.push_back(parse_double(w));
  }
  return out;
}

template <typename T>
T parse_integer(const std::string& text, const std::string& key) {
  T value{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ArgumentError("invalid integer for '" + key + "': " + text);
  return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
  if (text == "true") return true;
  if (text == "false") return false;
  throw ArgumentError("invalid boolean for '" + key + "': " + text);
}

BoxDomain box_from(const std::vector<double>& v, int d, const char* what) {
  if (static_cast<int>(v.size()) != 2 * d) {
    throw ArgumentError(std::string(what) + " needs " + std::to_string(2 * d) + " numbers (lower corner, then upper)");
  }
  Vector lo(d), hi(d);
  for (int i = 0; i < d; ++i) {
    lo(i) = v[i];
    hi(i) = v[d + i];
  }
  return BoxDomain(lo, hi);
}

struct ResolvedTarget {
  ScalarFunction f;
  BoxDomain K;
  int dim;
};

// Builtins and McShane extensions are Lipschitz on all of R^d.
ApproximationProblem problem_for(const ResolvedTarget& t, const ExperimentConfig& cfg, double eps) {
  ApproximationProblem prob{t.f, cfg.L, t.K, eps, NormSpec(cfg.norm, t.dim), cfg.activation, cfg.seed};
  prob.global_target = true;
  return prob;
}

ResolvedTarget resolve_target(const ExperimentConfig& cfg) {
  const auto& names = builtin_target_names();
  if (std::find(names.begin(), names.end(), cfg.target) != names.end()) {
    const NormSpec norm(cfg.norm, cfg.dim);
    BoxDomain K = cfg.box.empty() ? BoxDomain::unit(cfg.dim) : box_from(cfg.box, cfg.dim, "box");
    return {make_target(cfg.target, norm, cfg.L, cfg.seed), K, cfg.dim};
  }
  std::ifstream in(cfg.target);
  if (!in) throw ArgumentError("target '" + cfg.target + "' is neither a builtin nor a readable file");
  std::string first;
  std::getline(in, first);
  in.seekg(0);
  ScatteredSamples samples;
  if (first.rfind("# lipnet-lattice", 0) == 0) {
    const SampledFunction lattice = read_lattice_csv(in);
    const Lattice& lat = lattice.lattice();
    samples.points.resize(lat.size(), lat.dim());
    for (Eigen::Index p = 0; p < lat.size(); ++p) samples.points.row(p) = lat.point(p).transpose();
    samples.values = lattice.values();
  } else {
    samples = read_scattered_csv(in);
  }
  const int d = static_cast<int>(samples.points.cols());
  const NormSpec norm(cfg.norm, d);
  auto ext = std::make_shared<ExtensionProblem>(samples.points, samples.values, cfg.L, norm);
  BoxDomain K = cfg.box.empty()
                    ? BoxDomain(samples.points.colwise().minCoeff().transpose(),
                                samples.points.colwise().maxCoeff().transpose())
                    : box_from(cfg.box, d, "box");
  return {[ext](const Vector& x) { return (*ext)(x); }, K, d};
}

int run_approximate(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const ResolvedTarget t = resolve_target(cfg);
  const PipelineReport rep = approximate(problem_for(t, cfg, cfg.epsilon), cfg.m_max);
  write_text_file(out / "report.json", dump(to_json(rep)));
  write_text_file(out / "net.json", dump(to_json(rep.net)));
  log << "approximate: width " << rep.net.width() << ", sup_error " << format_double(rep.sup_error) << ", verdict "
      << to_string(rep.certificate.verdict) << "\n";
  if (!rep.success) {
    log << "approximate failed at stage: " << rep.failure << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_certify(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  if (cfg.net_path.empty()) throw ArgumentError("certify needs a net file");
  const ShallowNet net = net_from_json(read_json_file(cfg.net_path));
  const int d = net.dim();
  const BoxDomain box = cfg.box.empty() ? BoxDomain::unit(d) : box_from(cfg.box, d, "box");
  CertifyOptions opt;
  opt.seed = cfg.seed;
  const LipschitzCertificate cert = certify(net, cfg.L, box, NormSpec(cfg.norm, d), opt);
  const std::string text = dump(to_json(cert));
  write_text_file(out / "certificate.json", text);
  log << text;
  if (cert.verdict != Verdict::Certified) {
    log << "certify failed at stage: verdict " << to_string(cert.verdict) << "\n";
    return kExitFailure;
  }
  return kExitOk;
}

int run_uniform(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  const int d = cfg.dim;
  const NormSpec norm(cfg.norm, d);
  const BoxDomain K = cfg.box.empty() ? BoxDomain::unit(d) : box_from(cfg.box, d, "box");
  const BoxDomain hat = cfg.hat_box.empty() ? K : box_from(cfg.hat_box, d, "hat_box");
  UniformWidthOptions opt;
  opt.m_max = cfg.m_max;
  opt.radius_trials = cfg.trials;
  const UniformWidthResult res = uniform_width_experiment(cfg.L, K, hat, cfg.epsilon, norm, cfg.activation, cfg.seed, opt);

  std::ostringstream csv;
  csv << "element,width,sup_error,success\n";
  for (const auto& r : res.runs) {
    csv << r.index << "," << r.width << "," << format_double(r.sup_error) << "," << (r.success ? 1 : 0) << "\n";
  }
  write_text_file(out / "uniform_m.csv", csv.str());
  Json summary = to_json(res);
  bool ok = res.success;
  if (res.success) {
    const ValidationOutcome v = validate_uniform_width(res, K, cfg.validation, cfg.validation_seed);
    summary["validation"] = {{"functions", v.functions}, {"max_error", v.max_error}, {"ok", v.ok}};
    ok = v.ok;
    if (!v.ok) log << "uniform-m failed at stage: validation (max error " << format_double(v.max_error) << ")\n";
  } else {
    log << "uniform-m failed at stage: " << res.failure << "\n";
  }
  write_text_file(out / "uniform_m.json", dump(summary));
  log << "uniform-m: net size " << res.net.elements.size() << ", m_uniform " << res.m_uniform << ", covering radius "
      << format_double(res.covering_radius) << "\n";
  return ok ? kExitOk : kExitFailure;
}

int run_sweep(const ExperimentConfig& cfg, const std::filesystem::path& out, std::ostream& log) {
  if (cfg.eps_list.empty()) throw ArgumentError("sweep needs a nonempty eps_list");
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i) {
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1])) throw ArgumentError("eps_list must be strictly decreasing");
  }
  const ResolvedTarget t = resolve_target(cfg);
  const NormSpec norm(cfg.norm, t.dim);
  std::ostringstream csv, err_dat, width_dat;
  csv << "epsilon,m,sup_error,certified_bound,success,failure\n";
  err_dat << "# epsilon sup_error\n";
  width_dat << "# epsilon m\n";
  bool all_ok = true;
  for (double eps : cfg.eps_list) {
    std::string failure;
    int m = 0;
    double sup = 0.0, bound = 0.0;
    bool ok = false;
    try {
      const PipelineReport rep = approximate(problem_for(t, cfg, eps), cfg.m_max);
      m = rep.net.width();
      sup = rep.sup_error;
      bound = rep.certificate.certified_bound;
      ok = rep.success;
      failure = rep.failure;
    } catch (const std::exception& e) {
      failure = e.what();
    }
    all_ok = all_ok && ok;
    std::replace(failure.begin(), failure.end(), ',', ';');
    csv << format_double(eps) << "," << m << "," << format_double(sup) << "," << format_double(bound) << ","
        << (ok ? 1 : 0) << "," << failure << "\n";
    err_dat << format_double(eps) << " " << format_double(sup) << "\n";
    width_dat << format_double(eps) << " " << m << "\n";
    log << "sweep: eps " << format_double(eps) << " width " << m << (ok ? "" : " failed: " + failure) << "\n";
  }
  write_text_file(out / "sweep.csv", csv.str());
  if (cfg.plots) {
    write_text_file(out / "eps_sup_error.dat", err_dat.str());
    write_text_file(out / "eps_width.dat", width_dat.str());
    std::ostringstream lam;
    lam << "# kappa lambda\n";
    const int res = t.dim == 1 ? 101 : 21;
    for (double kappa : {0.2, 0.1, 0.05, 0.025}) {
      const MollifierKernel k = build_kernel(kappa, t.dim, 19);
      lam << format_double(kappa) << " " << format_double(gradient_deviation(t.f, k, t.K, res, kappa / 10.0)) << "\n";
    }
    write_text_file(out / "kappa_lambda.dat", lam.str());
  }
  if (!all_ok) log << "sweep failed at stage: one or more rows did not succeed\n";
  return all_ok ? kExitOk : kExitFailure;
}

}  // namespace

std::string to_text(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "command = " << (c.command ? to_string(*c.command) : "") << "\n";
  os << "out = " << c.out_dir << "\n";
  os << "seed = " << c.seed << "\n";
  os << "target = " << c.target << "\n";
  os << "L = " << format_double(c.L) << "\n";
  os << "eps = " << format_double(c.epsilon) << "\n";
  os << "eps_list = " << join(c.eps_list, ",") << "\n";
  os << "norm = " << to_string(c.norm) << "\n";
  os << "dim = " << c.dim << "\n";
  os << "activation = " << to_string(c.activation) << "\n";
  os << "m_max = " << c.m_max << "\n";
  os << "box = " << join(c.box, " ") << "\n";
  os << "hat_box = " << join(c.hat_box, " ") << "\n";
  os << "net = " << c.net_path << "\n";
  os << "trials = " << c.trials << "\n";
  os << "validation = " << c.validation << "\n";
  os << "validation_seed = " << c.validation_seed << "\n";
  os << "plots = " << (c.plots ? "true" : "false") << "\n";
  return os.str();
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(line);
    if (body.empty() || body[0] == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ArgumentError("line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key == "command") {
      if (!value.empty()) c.command = parse_command(value);
    } else if (key == "out") {
      c.out_dir = value;
    } else if (key == "seed") {
      c.seed = parse_integer<std::uint64_t>(value, key);
    } else if (key == "target") {
      c.target = value;
    } else if (key == "L") {
      c.L = parse_double(value);
    } else if (key == "eps") {
      c.epsilon = parse_double(value);
    } else if (key == "eps_list") {
      c.eps_list = parse_list(value);
    } else if (key == "norm") {
      c.norm = parse_norm_kind(value);
    } else if (key == "dim") {
      c.dim = parse_integer<int>(value, key);
    } else if (key == "activation") {
      c.activation = parse_activation(value);
    } else if (key == "m_max") {
      c.m_max = parse_integer<int>(value, key);
    } else if (key == "box") {
      c.box = parse_list(value);
    } else if (key == "hat_box") {
      c.hat_box = parse_list(value);
    } else if (key == "net") {
      c.net_path = value;
    } else if (key == "trials") {
      c.trials = parse_integer<int>(value, key);
    } else if (key == "validation") {
      c.validation = parse_integer<int>(value, key);
    } else if (key == "validation_seed") {
      c.validation_seed = parse_integer<std::uint64_t>(value, key);
    } else if (key == "plots") {
      c.plots = parse_bool(value, key);
    } else {
      throw ArgumentError("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    }
  }
  if (!c.command) throw ArgumentError("config has no command");
  if (c.dim < 1) throw ArgumentError("dim must be positive");
  return c;
}

int run(const ExperimentConfig& config, std::ostream& log) {
  try {
    if (!config.command) throw ArgumentError("config has no command");
    const std::filesystem::path out(config.out_dir);
    switch (*config.command) {
      case Command::Approximate:
        return run_approximate(config, out, log);
      case Command::Certify:
        return run_certify(config, out, log);
      case Command::UniformM:
        return run_uniform(config, out, log);
      case Command::Sweep:
        return run_sweep(config, out, log);
    }
  } catch (const ArgumentError& e) {
    log << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace lipnet
