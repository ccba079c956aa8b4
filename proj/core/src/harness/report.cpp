// Copyright 2026 The svptta Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "svptta/harness/report.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "svptta/error.hpp"
#include "svptta/io.hpp"

namespace svptta {
namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json optional_number(const std::optional<double>& v) {
  return v ? number_or_null(*v) : Json(nullptr);
}

Json vector_json(const Vector& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number_or_null(x));
  return out;
}

Vector vector_from_json(const Json& j) {
  Vector out;
  for (const auto& x : j) out.push_back(x.get<double>());
  return out;
}

template <typename F>
auto wrap_format(const char* what, F&& f) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string(what) + ": " + e.what(), 0);
  }
}

}  // namespace

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (double x : m.row(r)) row.push_back(number_or_null(x));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_from_json(const Json& j) {
  const std::size_t rows = j.at("rows").get<std::size_t>();
  const std::size_t cols = j.at("cols").get<std::size_t>();
  std::vector<double> data;
  data.reserve(rows * cols);
  for (const auto& row : j.at("data"))
    for (const auto& x : row) data.push_back(x.get<double>());
  return Matrix(rows, cols, std::move(data));
}

Json to_json(const AdaptConfig& c) {
  return {
      {"method", method_name(c.method)},
      {"alpha1", c.alpha1},
      {"alpha2", c.alpha2},
      {"beta0", c.beta0},
      {"t_aug", c.t_aug},
      {"lr", c.lr},
      {"batch_size", c.batch_size},
      {"seed", c.seed},
      {"total_batches", c.total_batches ? Json(*c.total_batches) : Json(nullptr)},
      {"warmup", c.warmup},
      {"min_count", c.min_count},
      {"reset_policy", reset_policy_name(c.reset_policy)},
      {"adapt_set", adapt_set_name(c.adapt_set)},
      {"joint", c.joint},
  };
}

AdaptConfig adapt_config_from_json(const Json& j) {
  return wrap_format("adapt config", [&] {
    AdaptConfig c;
    c.method = parse_method(j.at("method").get<std::string>());
    c.alpha1 = j.at("alpha1").get<double>();
    c.alpha2 = j.at("alpha2").get<double>();
    c.beta0 = j.at("beta0").get<double>();
    c.t_aug = j.at("t_aug").get<std::size_t>();
    c.lr = j.at("lr").get<double>();
    c.batch_size = j.at("batch_size").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("total_batches").is_null())
      c.total_batches = j.at("total_batches").get<std::size_t>();
    c.warmup = j.at("warmup").get<std::size_t>();
    c.min_count = j.at("min_count").get<Count>();
    c.reset_policy = parse_reset_policy(j.at("reset_policy").get<std::string>());
    c.adapt_set = parse_adapt_set(j.at("adapt_set").get<std::string>());
    c.joint = j.at("joint").get<bool>();
    return c;
  });
}

Json to_json(const StreamReport& r) {
  Json batches = Json::array();
  for (const BatchTrace& t : r.batches) {
    batches.push_back({
        {"index", t.index},
        {"segment", t.segment},
        {"size", t.size},
        {"error", optional_number(t.error)},
        {"entropy", number_or_null(t.entropy)},
        {"svd_sum", number_or_null(t.svd_sum)},
        {"svd_var", number_or_null(t.svd_var)},
        {"sda", optional_number(t.sda)},
        {"entropy_second", optional_number(t.entropy_second)},
        {"beta", optional_number(t.beta)},
        {"singular_values", vector_json(t.singular_values)},
        {"fallback_classes", t.fallback_classes},
    });
  }
  Json segments = Json::array();
  for (const SegmentSummary& s : r.segments) {
    segments.push_back({{"name", s.name},
                        {"batches", s.batches},
                        {"samples", s.samples},
                        {"labeled", s.labeled},
                        {"mistakes", s.mistakes},
                        {"error", optional_number(s.error)}});
  }
  Json diagnostics = Json::object();
  for (const auto& [name, m] : r.diagnostics) diagnostics[name] = to_json(m);

  Json doc = {
      {"schema", kReportSchema},
      {"config", to_json(r.config)},
      {"num_classes", r.num_classes},
      {"aggregate",
       {{"samples", r.samples},
        {"labeled", r.labeled},
        {"mistakes", r.mistakes},
        {"error", optional_number(r.error)},
        {"per_class_error", vector_json(r.per_class_error)},
        {"confusion", r.confusion}}},
      {"segments", std::move(segments)},
      {"batches", std::move(batches)},
      {"diagnostics", std::move(diagnostics)},
  };
  if (r.wall_clock_seconds) doc["wall_clock_seconds"] = *r.wall_clock_seconds;
  return doc;
}

std::string dump_document(const Json& doc) { return doc.dump(2) + "\n"; }

void write_document(const std::filesystem::path& path, const Json& doc) {
  write_file_atomic(path, dump_document(doc));
}

Json read_document(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  try {
    return Json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("cannot parse " + path.string() + ": " + e.what(), 0);
  }
}

Json to_json(const ClassStats& s) {
  Json covs = Json::array();
  for (const Matrix& c : s.covariances) covs.push_back(to_json(c));
  return {{"num_classes", s.num_classes},
          {"dim", s.dim},
          {"counts", s.counts},
          {"means", to_json(s.means)},
          {"covariances", std::move(covs)}};
}

ClassStats class_stats_from_json(const Json& j) {
  return wrap_format("class stats", [&] {
    ClassStats s;
    s.num_classes = j.at("num_classes").get<std::size_t>();
    s.dim = j.at("dim").get<std::size_t>();
    s.counts = j.at("counts").get<std::vector<Count>>();
    s.means = matrix_from_json(j.at("means"));
    for (const auto& c : j.at("covariances")) s.covariances.push_back(matrix_from_json(c));
    if (s.counts.size() != s.num_classes || s.covariances.size() != s.num_classes ||
        s.means.rows() != s.num_classes || s.means.cols() != s.dim)
      throw FormatError("class stats: inconsistent shapes", 0);
    return s;
  });
}

namespace {

Json params_to_json(const ModelParams& p) {
  Json layers = Json::array();
  for (const HiddenLayer& l : p.layers) {
    layers.push_back({{"weight", to_json(l.weight)},
                      {"bias", l.bias},
                      {"gamma", l.gamma},
                      {"beta", l.beta},
                      {"running_mean", l.running_mean},
                      {"running_var", l.running_var}});
  }
  return {{"input_dim", p.arch.input_dim},
          {"hidden", p.arch.hidden},
          {"num_classes", p.arch.num_classes},
          {"bn_eps", p.arch.bn_eps},
          {"layers", std::move(layers)},
          {"head_weight", to_json(p.head_weight)},
          {"head_bias", p.head_bias}};
}

ModelParams params_from_json(const Json& j) {
  ModelParams p;
  p.arch.input_dim = j.at("input_dim").get<std::size_t>();
  p.arch.hidden = j.at("hidden").get<std::vector<std::size_t>>();
  p.arch.num_classes = j.at("num_classes").get<std::size_t>();
  p.arch.bn_eps = j.at("bn_eps").get<double>();
  for (const auto& l : j.at("layers")) {
    HiddenLayer layer;
    layer.weight = matrix_from_json(l.at("weight"));
    layer.bias = vector_from_json(l.at("bias"));
    layer.gamma = vector_from_json(l.at("gamma"));
    layer.beta = vector_from_json(l.at("beta"));
    layer.running_mean = vector_from_json(l.at("running_mean"));
    layer.running_var = vector_from_json(l.at("running_var"));
    p.layers.push_back(std::move(layer));
  }
  p.head_weight = matrix_from_json(j.at("head_weight"));
  p.head_bias = vector_from_json(j.at("head_bias"));
  p.validate();
  return p;
}

}  // namespace

Json checkpoint_to_json(const AdaptState& state, const AdaptConfig& config) {
  Json first = Json::array();
  Json second = Json::array();
  for (const Vector& m : state.opt.first_moment) first.push_back(m);
  for (const Vector& v : state.opt.second_moment) second.push_back(v);
  return {
      {"schema", kCheckpointSchema},
      {"config", to_json(config)},
      {"batch_counter", state.batch_counter},
      {"rng", {{"key", state.rng.key()}, {"counter", state.rng.counter()}}},
      {"params", params_to_json(state.params)},
      {"optimizer",
       {{"lr", state.opt.lr},
        {"beta1", state.opt.beta1},
        {"beta2", state.opt.beta2},
        {"eps", state.opt.eps},
        {"weight_decay", state.opt.weight_decay},
        {"adapt_set", adapt_set_name(state.opt.set)},
        {"step", state.opt.step},
        {"first_moment", std::move(first)},
        {"second_moment", std::move(second)}}},
      {"stats", to_json(state.stats)},
  };
}

AdaptState checkpoint_from_json(const Json& j, AdaptConfig* config) {
  return wrap_format("checkpoint", [&] {
    if (j.at("schema").get<std::string>() != kCheckpointSchema)
      throw FormatError("checkpoint: unexpected schema", 0);
    if (config) *config = adapt_config_from_json(j.at("config"));
    AdaptState s;
    s.batch_counter = j.at("batch_counter").get<std::size_t>();
    s.rng = RandomStream(j.at("rng").at("key").get<std::uint64_t>(),
                         j.at("rng").at("counter").get<std::uint64_t>());
    s.params = params_from_json(j.at("params"));
    const Json& o = j.at("optimizer");
    s.opt.lr = o.at("lr").get<double>();
    s.opt.beta1 = o.at("beta1").get<double>();
    s.opt.beta2 = o.at("beta2").get<double>();
    s.opt.eps = o.at("eps").get<double>();
    s.opt.weight_decay = o.at("weight_decay").get<double>();
    s.opt.set = parse_adapt_set(o.at("adapt_set").get<std::string>());
    s.opt.step = o.at("step").get<std::uint64_t>();
    for (const auto& m : o.at("first_moment")) s.opt.first_moment.push_back(vector_from_json(m));
    for (const auto& v : o.at("second_moment"))
      s.opt.second_moment.push_back(vector_from_json(v));
    s.stats = class_stats_from_json(j.at("stats"));
    return s;
  });
}

}  // namespace svptta
