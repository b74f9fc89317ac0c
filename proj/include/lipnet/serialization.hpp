#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "lipnet/certification.hpp"
#include "lipnet/covering.hpp"
#include "lipnet/fitting.hpp"
#include "lipnet/network.hpp"
#include "lipnet/pipeline.hpp"

namespace lipnet {

using Json = nlohmann::ordered_json;

/// {activation, d, m, b, a, W (row-major), c}. Doubles are written in
/// shortest round-trip form, so reading back gives identical bits.
Json to_json(const ShallowNet& net);
ShallowNet net_from_json(const Json& j);

Json to_json(const LipschitzCertificate& cert);
LipschitzCertificate certificate_from_json(const Json& j);

Json to_json(const FitReport& report);
Json to_json(const StageLog& log);
Json to_json(const PipelineReport& report);

/// Summary of a uniform-width run: epsilon, net size, m_uniform, covering radius.
Json to_json(const UniformWidthResult& result);

/// Two-space indented dump with a trailing newline.
std::string dump(const Json& j);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace lipnet
