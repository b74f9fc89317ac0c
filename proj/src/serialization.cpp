#include "lipnet/serialization.hpp"

#include <fstream>
#include <sstream>

namespace lipnet {

namespace {

Json vector_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
  return arr;
}

Vector vector_from(const Json& arr, Eigen::Index expected, const char* field) {
  if (!arr.is_array() || static_cast<Eigen::Index>(arr.size()) != expected) {
    throw ArgumentError(std::string("net field '") + field + "' has the wrong length");
  }
  Vector v(expected);
  for (Eigen::Index i = 0; i < expected; ++i) v(i) = arr.at(static_cast<std::size_t>(i)).get<double>();
  return v;
}

}  // namespace

Json to_json(const ShallowNet& net) {
  Json j;
  j["activation"] = to_string(net.activation());
  j["d"] = net.dim();
  j["m"] = net.width();
  j["b"] = net.b();
  j["a"] = vector_json(net.a());
  Json W = Json::array();
  for (int i = 0; i < net.width(); ++i) {
    for (int k = 0; k < net.dim(); ++k) W.push_back(net.W()(i, k));
  }
  j["W"] = W;
  j["c"] = vector_json(net.c());
  return j;
}

ShallowNet net_from_json(const Json& j) {
  try {
    const int d = j.at("d").get<int>();
    const int m = j.at("m").get<int>();
    if (d < 1 || m < 0) throw ArgumentError("net has invalid d or m");
    const Vector flat = vector_from(j.at("W"), static_cast<Eigen::Index>(m) * d, "W");
    Matrix W(m, d);
    for (int i = 0; i < m; ++i) {
      for (int k = 0; k < d; ++k) W(i, k) = flat(static_cast<Eigen::Index>(i) * d + k);
    }
    return ShallowNet(parse_activation(j.at("activation").get<std::string>()), j.at("b").get<double>(),
                      vector_from(j.at("a"), m, "a"), std::move(W), vector_from(j.at("c"), m, "c"));
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed net JSON: ") + e.what());
  }
}

Json to_json(const LipschitzCertificate& cert) {
  Json j;
  j["target_L"] = cert.target_L;
  j["weight_bound"] = cert.weight_bound;
  j["grid_sup"] = cert.grid_sup;
  j["empirical_quotient"] = cert.empirical_quotient;
  j["region_exact"] = cert.region_exact ? Json(*cert.region_exact) : Json(nullptr);
  j["certified_bound"] = cert.certified_bound;
  j["verdict"] = to_string(cert.verdict);
  return j;
}

LipschitzCertificate certificate_from_json(const Json& j) {
  try {
    LipschitzCertificate c;
    c.target_L = j.at("target_L").get<double>();
    c.weight_bound = j.at("weight_bound").get<double>();
    c.grid_sup = j.at("grid_sup").get<double>();
    c.empirical_quotient = j.at("empirical_quotient").get<double>();
    if (!j.at("region_exact").is_null()) c.region_exact = j.at("region_exact").get<double>();
    c.certified_bound = j.at("certified_bound").get<double>();
    c.verdict = parse_verdict(j.at("verdict").get<std::string>());
    return c;
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError(std::string("malformed certificate JSON: ") + e.what());
  }
}

Json to_json(const FitReport& report) {
  Json j;
  j["achieved_value_err"] = report.achieved_value_err;
  j["achieved_grad_err"] = report.achieved_grad_err;
  j["width_used"] = report.width_used;
  j["converged"] = report.converged;
  j["iterations"] = report.iterations;
  j["net"] = to_json(report.net);
  return j;
}

Json to_json(const StageLog& log) {
  Json j;
  j["M"] = log.M;
  j["canonical_epsilon"] = log.canonical_epsilon;
  j["shrink"] = log.shrink;
  j["lip_budget"] = log.lip_budget;
  j["kappa"] = log.kappa;
  j["delta"] = log.delta;
  j["C"] = log.C;
  j["c_conv"] = log.c_conv;
  j["fit_resolution"] = log.fit_resolution;
  j["measure_resolution"] = log.measure_resolution;
  j["budget"] = {{"shrink", log.budget_shrink},
                 {"mollify", log.budget_mollify},
                 {"fit", log.budget_fit},
                 {"ok", log.budget_ok}};
  j["trivial"] = log.trivial;
  j["fit"] = {{"converged", log.fit_converged},
              {"value_err", log.fit_value_err},
              {"grad_err", log.fit_grad_err},
              {"iterations", log.fit_iterations}};
  j["width"] = log.width;
  return j;
}

Json to_json(const PipelineReport& report) {
  Json j;
  j["success"] = report.success;
  j["failure"] = report.failure;
  j["sup_error"] = report.sup_error;
  j["width"] = report.net.width();
  j["certificate"] = to_json(report.certificate);
  j["stages"] = to_json(report.log);
  return j;
}

Json to_json(const UniformWidthResult& result) {
  Json j;
  j["epsilon"] = result.net.epsilon;
  j["L"] = result.net.L;
  j["net_size"] = result.net.elements.size();
  j["cells"] = result.net.cells;
  j["spacing"] = result.net.spacing;
  j["quantum"] = result.net.quantum;
  j["covering_radius"] = result.covering_radius;
  j["m_uniform"] = result.m_uniform;
  j["success"] = result.success;
  j["failure"] = result.failure;
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ArgumentError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  out << text;
}

}  // namespace lipnet
