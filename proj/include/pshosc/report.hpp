#pragma once
// JSON views of module results and the defaults table echoed in every report.

#include <string>
#include <vector>

#include "json.hpp"
#include "pshosc/bergman.hpp"
#include "pshosc/gammaremez.hpp"
#include "pshosc/jn.hpp"
#include "pshosc/osc.hpp"

namespace pshosc {

using Json = nlohmann::ordered_json;

inline constexpr const char* kArtifactName = "pshosc";
inline constexpr const char* kArtifactVersion = "1.0.0";
inline constexpr int kDefaultsVersion = 1;
inline constexpr std::uint64_t kDefaultSeed = 7;

/// Every default used by the CLI and the acceptance suite.
Json defaults_table();

/// Hessian steps used unless overridden.
std::vector<double> default_hessian_steps();

Json to_json(const QuadratureSpec& s);
Json to_json(const Complex& z);
Json to_json(const std::vector<Complex>& v);
Json to_json(const SupResult& r);
Json to_json(const OscillationReport& r);
Json to_json(const DecompositionReport& r);
Json to_json(const LelongClassReport& r);
Json to_json(const CounterexampleRow& r);
Json to_json(const SlopeFit& r);
Json to_json(const GammaResult& r);
Json to_json(const RemezReport& r);
Json to_json(const RayAudit& r);
Json to_json(const BergmanResult& r);
Json to_json(const SandwichReport& r);
Json to_json(const OtReport& r);
Json to_json(const MonotonicityReport& r);
Json to_json(const Eigen::MatrixXcd& m);
Json to_json(const HessianCheckReport& r);
Json to_json(const LelongPreservationReport& r);
Json to_json(const DecayTable& r);
Json to_json(const EpsilonReport& r);

/// Non-finite doubles become the strings "inf", "-inf" and "nan" so tables
/// survive a JSON round trip.
Json number(double v);

}  // namespace pshosc
