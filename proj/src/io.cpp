#include "abpoint/io.hpp"

#include <cstdio>

namespace abpoint::io {

namespace {

json complex_pair(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

double required(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw ParameterError(std::string("parameter JSON is missing numeric key \"") + key + "\"");
  }
  return j.at(key).get<double>();
}

}  // namespace

json to_json(const Flux<double>& flux, const LambdaParams<double>& lam) {
  return {{"alpha", flux.alpha()}, {"u", lam.u}, {"v", lam.v}, {"w_re", lam.w.real()}, {"w_im", lam.w.imag()}};
}

json to_json(const Flux<double>& flux, const UParams<double>& up) {
  return {{"alpha", flux.alpha()}, {"omega", up.omega()}, {"a", up.a()}, {"b", up.b()}, {"q", up.q()}};
}

json to_json(const SpectrumReport<double>& report) {
  json states = json::array();
  for (const auto& st : report.states) {
    states.push_back({{"p", st.p},
                      {"energy", st.energy},
                      {"xi", complex_pair(st.xi)},
                      {"eta", complex_pair(st.eta)},
                      {"multiplicity", st.multiplicity}});
  }
  return {{"count", report.count}, {"states", states}};
}

json to_json(const ChannelMatrix<double>& sigma) {
  const auto& e = sigma.entries;
  return {{"k", sigma.k},
          {"entries", json::array({complex_pair(e(0, 0)), complex_pair(e(0, 1)), complex_pair(e(1, 0)),
                                   complex_pair(e(1, 1))})}};
}

ParameterSet parameters_from_json(const json& j) {
  if (!j.is_object()) throw ParameterError("parameter JSON must be an object");
  ParameterSet out;
  out.alpha = required(j, "alpha");
  const bool lambda_chart = j.contains("u") || j.contains("v") || j.contains("w_re") || j.contains("w_im");
  const bool unitary_chart = j.contains("omega") || j.contains("a") || j.contains("b") || j.contains("q");
  if (lambda_chart && unitary_chart) throw ParameterError("parameter JSON mixes the Lambda and U charts");
  if (unitary_chart) {
    out.chart = UParams<double>(required(j, "omega"), required(j, "a"), required(j, "b"), required(j, "q"));
  } else {
    LambdaParams<double> lam;
    lam.u = j.contains("u") ? required(j, "u") : 0.0;
    lam.v = j.contains("v") ? required(j, "v") : 0.0;
    lam.w = {j.contains("w_re") ? required(j, "w_re") : 0.0, j.contains("w_im") ? required(j, "w_im") : 0.0};
    out.chart = lam;
  }
  return out;
}

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace abpoint::io
