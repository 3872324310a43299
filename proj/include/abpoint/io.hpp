#pragma once

// JSON and CSV encodings of parameter sets and results (double precision).

#include <iosfwd>
#include <string>
#include <variant>

#include <json.hpp>

#include "abpoint/params.hpp"
#include "abpoint/scattering.hpp"
#include "abpoint/spectrum.hpp"

namespace abpoint::io {

using nlohmann::json;

// Flux plus one of the two charts, as read from a flat JSON object.
struct ParameterSet {
  double alpha{0.5};
  std::variant<LambdaParams<double>, UParams<double>> chart{LambdaParams<double>{}};
};

// {"alpha", "u", "v", "w_re", "w_im"}
json to_json(const Flux<double>& flux, const LambdaParams<double>& lam);

// {"alpha", "omega", "a", "b", "q"}
json to_json(const Flux<double>& flux, const UParams<double>& up);

// {"count", "states": [{"p", "energy", "xi": [re, im], "eta": [re, im], "multiplicity"}]}
json to_json(const SpectrumReport<double>& report);

// {"k", "entries": [[re, im] x 4]} in row-major order.
json to_json(const ChannelMatrix<double>& sigma);

// Accepts either chart; throws ParameterError on missing keys or mixed charts.
ParameterSet parameters_from_json(const json& j);

// %.17g, enough to round-trip any double.
std::string format_number(double value);

}  // namespace abpoint::io
