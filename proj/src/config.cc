// Copyright 2026 The LDP-FL Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ldpfl/config.h"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ldpfl/error.h"
#include "ldpfl/mnist.h"

namespace ldpfl {
namespace {

[[noreturn]] void Bad(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::kConfig, key + ": " + why);
}

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double ToDouble(const std::string& key, const std::string& text) {
  const std::string t = Trim(text);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    Bad(key, "not a number: '" + text + "'");
  }
  return v;
}

std::uint64_t ToU64(const std::string& key, const std::string& text) {
  const std::string t = Trim(text);
  std::uint64_t v = 0;
  const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
    Bad(key, "not a non-negative integer: '" + text + "'");
  }
  return v;
}

bool ToBool(const std::string& key, const std::string& text) {
  const std::string t = Trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  Bad(key, "not a boolean: '" + text + "'");
}

template <typename T, typename Fn>
std::vector<T> ToList(const std::string& key, const std::string& text,
                      Fn&& one) {
  std::vector<T> out;
  const std::string t = Trim(text);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(one(key, item));
  return out;
}

std::string FromDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T, typename Fn>
std::string FromList(const std::vector<T>& v, Fn&& one) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += one(v[i]);
  }
  return out;
}

std::string FromBool(bool b) { return b ? "true" : "false"; }

Mechanism::Variant ToVariant(const std::string& key, const std::string& t) {
  const std::string s = Trim(t);
  for (auto v : {Mechanism::Variant::kExact,
                 Mechanism::Variant::kSwappedProbabilities,
                 Mechanism::Variant::kDoubledCoefficient}) {
    if (s == VariantName(v)) return v;
  }
  Bad(key, "unknown mechanism variant '" + t + "'");
}

RangeMode ToRangeMode(const std::string& key, const std::string& t) {
  const std::string s = Trim(t);
  for (auto m : {RangeMode::kFixed, RangeMode::kAdaptive}) {
    if (s == RangeModeName(m)) return m;
  }
  Bad(key, "unknown range mode '" + t + "'");
}

DatasetConfig::Kind ToKind(const std::string& key, const std::string& t) {
  const std::string s = Trim(t);
  for (auto k : {DatasetConfig::Kind::kBlobs, DatasetConfig::Kind::kMnist}) {
    if (s == DatasetKindName(k)) return k;
  }
  Bad(key, "unknown dataset kind '" + t + "'");
}

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string& name,
                     const std::string&)>
      set;
};

#define LDPFL_DOUBLE(sec, name, member)                                     \
  Field {                                                                   \
    sec, name, [](const ExperimentConfig& c) { return FromDouble(c.member); }, \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { \
          c.member = ToDouble(k, v);                                        \
        }                                                                   \
  }
#define LDPFL_SIZE(sec, name, member)                                       \
  Field {                                                                   \
    sec, name,                                                              \
        [](const ExperimentConfig& c) { return std::to_string(c.member); }, \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { \
          c.member = static_cast<decltype(c.member)>(ToU64(k, v));         \
        }                                                                   \
  }
#define LDPFL_BOOL(sec, name, member)                                       \
  Field {                                                                   \
    sec, name, [](const ExperimentConfig& c) { return FromBool(c.member); }, \
        [](ExperimentConfig& c, const std::string& k, const std::string& v) { \
          c.member = ToBool(k, v);                                          \
        }                                                                   \
  }
#define LDPFL_STRING(sec, name, member)                                     \
  Field {                                                                   \
    sec, name, [](const ExperimentConfig& c) { return c.member; },          \
        [](ExperimentConfig& c, const std::string&, const std::string& v) { \
          c.member = Trim(v);                                               \
        }                                                                   \
  }

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      LDPFL_SIZE("federation", "clients", federation.total_clients),
      LDPFL_SIZE("federation", "clients_per_round",
                 federation.clients_per_round),
      LDPFL_DOUBLE("federation", "client_fraction", federation.client_fraction),
      LDPFL_SIZE("federation", "rounds", federation.rounds),
      LDPFL_DOUBLE("federation", "epsilon", federation.epsilon),
      LDPFL_DOUBLE("federation", "epsilon_floor", federation.epsilon_floor),
      LDPFL_BOOL("federation", "privacy", federation.privacy),
      Field{"federation", "variant",
            [](const ExperimentConfig& c) {
              return std::string(VariantName(c.federation.variant));
            },
            [](ExperimentConfig& c, const std::string& k,
               const std::string& v) {
              c.federation.variant = ToVariant(k, v);
            }},
      Field{"federation", "hidden",
            [](const ExperimentConfig& c) {
              return FromList(c.federation.hidden, [](std::size_t h) {
                return std::to_string(h);
              });
            },
            [](ExperimentConfig& c, const std::string& k,
               const std::string& v) {
              c.federation.hidden = ToList<std::size_t>(
                  k, v, [](const std::string& kk, const std::string& s) {
                    return static_cast<std::size_t>(ToU64(kk, s));
                  });
            }},
      Field{"federation", "init_scales",
            [](const ExperimentConfig& c) {
              return FromList(c.federation.init_scales, FromDouble);
            },
            [](ExperimentConfig& c, const std::string& k,
               const std::string& v) {
              c.federation.init_scales = ToList<double>(k, v, ToDouble);
            }},
      LDPFL_SIZE("federation", "seed", federation.seed),
      LDPFL_SIZE("federation", "threads", federation.threads),
      LDPFL_DOUBLE("training", "learning_rate",
                   federation.sgd.learning_rate),
      LDPFL_SIZE("training", "batch_size", federation.sgd.batch_size),
      LDPFL_SIZE("training", "local_epochs", federation.sgd.local_epochs),
      Field{"range", "mode",
            [](const ExperimentConfig& c) {
              return std::string(RangeModeName(c.federation.range.mode));
            },
            [](ExperimentConfig& c, const std::string& k,
               const std::string& v) {
              c.federation.range.mode = ToRangeMode(k, v);
            }},
      LDPFL_DOUBLE("range", "center", federation.range.center),
      LDPFL_DOUBLE("range", "radius", federation.range.radius),
      LDPFL_DOUBLE("range", "radius_floor", federation.range.radius_floor),
      LDPFL_DOUBLE("shuffle", "window", federation.shuffle.window),
      LDPFL_BOOL("shuffle", "delays", federation.shuffle.delays),
      LDPFL_DOUBLE("shuffle", "jitter", federation.shuffle.jitter),
      LDPFL_DOUBLE("shuffle", "drop_probability",
                   federation.shuffle.drop_probability),
      LDPFL_DOUBLE("timing", "local_min", federation.timing.local_min),
      LDPFL_DOUBLE("timing", "local_max", federation.timing.local_max),
      LDPFL_DOUBLE("timing", "comm_min", federation.timing.comm_min),
      LDPFL_DOUBLE("timing", "comm_max", federation.timing.comm_max),
      Field{"dataset", "kind",
            [](const ExperimentConfig& c) {
              return std::string(DatasetKindName(c.dataset.kind));
            },
            [](ExperimentConfig& c, const std::string& k,
               const std::string& v) { c.dataset.kind = ToKind(k, v); }},
      LDPFL_SIZE("dataset", "samples", dataset.samples),
      LDPFL_SIZE("dataset", "test_samples", dataset.test_samples),
      LDPFL_SIZE("dataset", "dim", dataset.dim),
      LDPFL_SIZE("dataset", "classes", dataset.classes),
      LDPFL_DOUBLE("dataset", "separation", dataset.separation),
      LDPFL_SIZE("dataset", "seed", dataset.seed),
      LDPFL_STRING("dataset", "train_images", dataset.train_images),
      LDPFL_STRING("dataset", "train_labels", dataset.train_labels),
      LDPFL_STRING("dataset", "test_images", dataset.test_images),
      LDPFL_STRING("dataset", "test_labels", dataset.test_labels),
      LDPFL_SIZE("dataset", "subset", dataset.subset),
      LDPFL_SIZE("dataset", "test_subset", dataset.test_subset),
      LDPFL_STRING("output", "dir", output_dir),
      LDPFL_BOOL("verify", "mechanism", verify.mechanism),
      LDPFL_BOOL("verify", "concentration", verify.concentration),
      LDPFL_BOOL("verify", "shuffle", verify.shuffle),
      LDPFL_BOOL("verify", "adaptive", verify.adaptive),
      LDPFL_SIZE("verify", "seed", verify.seed),
      LDPFL_SIZE("verify", "threads", verify.threads),
      Field{"sweep", "epsilons",
            [](const ExperimentConfig& c) {
              return FromList(c.sweep_epsilons, FromDouble);
            },
            [](ExperimentConfig& c, const std::string& k,
               const std::string& v) {
              c.sweep_epsilons = ToList<double>(k, v, ToDouble);
            }},
  };
  return fields;
}

#undef LDPFL_DOUBLE
#undef LDPFL_SIZE
#undef LDPFL_BOOL
#undef LDPFL_STRING

}  // namespace

const char* DatasetKindName(DatasetConfig::Kind kind) {
  return kind == DatasetConfig::Kind::kBlobs ? "blobs" : "mnist";
}

void ExperimentConfig::Validate() const {
  try {
    federation.Validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  if (output_dir.empty()) Bad("output.dir", "must not be empty");
  if (dataset.kind == DatasetConfig::Kind::kBlobs) {
    if (dataset.samples < federation.total_clients) {
      Bad("dataset.samples", "fewer samples than clients");
    }
    if (dataset.test_samples == 0) Bad("dataset.test_samples", "must be > 0");
    if (dataset.dim == 0) Bad("dataset.dim", "must be > 0");
    if (dataset.classes < 2) Bad("dataset.classes", "need at least 2");
    if (!(dataset.separation > 0.0) || !std::isfinite(dataset.separation)) {
      Bad("dataset.separation", "must be finite and > 0");
    }
  } else {
    for (const auto* p : {&dataset.train_images, &dataset.train_labels,
                          &dataset.test_images, &dataset.test_labels}) {
      if (p->empty()) Bad("dataset", "mnist needs all four IDX paths");
    }
  }
  if (verify.threads == 0) Bad("verify.threads", "must be >= 1");
  for (double e : sweep_epsilons) {
    if (!(e >= federation.epsilon_floor) || !std::isfinite(e)) {
      Bad("sweep.epsilons", "every epsilon must be finite and >= the floor");
    }
  }
}

ExperimentConfig ParseConfig(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw Error(ErrorCode::kConfig, e.what());
  }
  ExperimentConfig cfg;
  std::set<std::string> known_sections;
  for (const auto& f : Fields()) known_sections.insert(f.section);
  for (const auto& [section, body] : tree) {
    if (!known_sections.count(section)) {
      if (body.empty()) Bad(section, "key outside any section");
      Bad(section, "unknown section");
    }
    for (const auto& [key, value] : body) {
      const std::string name = section + "." + key;
      const Field* field = nullptr;
      for (const auto& f : Fields()) {
        if (section == f.section && key == f.key) field = &f;
      }
      if (!field) Bad(name, "unknown key");
      field->set(cfg, name, value.data());
    }
  }
  cfg.Validate();
  return cfg;
}

ExperimentConfig LoadConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open config " + path);
  return ParseConfig(in);
}

std::string SerializeConfig(const ExperimentConfig& config) {
  std::ostringstream out;
  std::string section;
  for (const auto& f : Fields()) {
    if (section != f.section) {
      if (!section.empty()) out << "\n";
      section = f.section;
      out << "[" << section << "]\n";
    }
    out << f.key << " = " << f.get(config) << "\n";
  }
  return out.str();
}

bool SameConfig(const ExperimentConfig& a, const ExperimentConfig& b) {
  return SerializeConfig(a) == SerializeConfig(b);
}

DataSplit LoadDatasets(const DatasetConfig& config) {
  if (config.kind == DatasetConfig::Kind::kMnist) {
    return {LoadMnist(config.train_images, config.train_labels, config.subset,
                      DeriveSeed(config.seed, {1})),
            LoadMnist(config.test_images, config.test_labels,
                      config.test_subset, DeriveSeed(config.seed, {2}))};
  }
  return {MakeBlobs(config.samples, config.dim, config.classes,
                    config.separation, config.seed),
          MakeBlobsHeldOut(config.test_samples, config.dim, config.classes,
                           config.separation, config.seed)};
}

}  // namespace ldpfl
