// Copyright 2026 The synqa Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// synqa command line: assess, fixture, serve.

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "synqa/synqa.hpp"
#include "synqa/service/http.hpp"
#include "synqa/service/store.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

synqa::service::AssessmentService* g_service = nullptr;

std::string ReadOrThrow(const std::string& path) { return synqa::service::ReadFile(path); }

int RunAssess(const std::string& real_path, const std::string& synth_path,
              const std::optional<std::string>& holdout_path, const std::optional<std::string>& schema_path,
              const std::optional<std::string>& config_path, const std::string& out_path) {
  std::optional<synqa::Schema> schema;
  if (schema_path) schema = synqa::ParseSchemaJson(ReadOrThrow(*schema_path));
  synqa::AssessmentConfig cfg;
  if (config_path) {
    auto j = nlohmann::json::parse(ReadOrThrow(*config_path), nullptr, false);
    if (j.is_discarded()) throw synqa::Error(synqa::ErrorCode::kInvalidArgument, "config is not valid JSON");
    cfg = synqa::ConfigFromJson(j);
  }
  synqa::AssessmentInputs in{synqa::LoadCsv(ReadOrThrow(real_path), schema, real_path),
                             synqa::LoadCsv(ReadOrThrow(synth_path), schema, synth_path)};
  if (holdout_path) in.holdout = synqa::LoadCsv(ReadOrThrow(*holdout_path), schema, *holdout_path);
  std::string rendered = synqa::RenderReportJson(synqa::RunAssessment(in, cfg));
  synqa::service::WriteFileAtomic(out_path, rendered);
  return kExitOk;
}

int RunFixture(const std::string& kind, const std::string& real_path, std::size_t rows, double noise,
               std::uint64_t seed, const std::string& out_path) {
  synqa::DataTable real = synqa::LoadCsv(ReadOrThrow(real_path), std::nullopt, real_path);
  synqa::FixtureSpec spec{synqa::ParseFixtureKind(kind), rows, noise, seed};
  synqa::service::WriteFileAtomic(out_path, synqa::WriteCsv(synqa::GenerateFixture(real, spec)));
  return kExitOk;
}

int RunServe(std::optional<int> port, std::optional<std::string> data_dir, std::optional<std::string> static_dir,
             std::size_t workers) {
  int env_port = 0;
  synqa::service::ServiceOptions opts = synqa::service::OptionsFromEnvironment(&env_port);
  if (data_dir) opts.data_dir = *data_dir;
  if (static_dir) opts.static_dir = *static_dir;
  opts.workers = workers;
  synqa::service::AssessmentService service(opts);
  g_service = &service;
  std::signal(SIGINT, [](int) {
    if (g_service) g_service->Stop();
  });
  std::signal(SIGTERM, [](int) {
    if (g_service) g_service->Stop();
  });
  int p = port.value_or(env_port);
  std::cerr << "synqa: serving " << opts.data_dir << " on port " << p << "\n";
  bool ok = service.Listen("0.0.0.0", p);
  g_service = nullptr;
  if (!ok) {
    std::cerr << "synqa: cannot listen on port " << p << "\n";
    return kExitIo;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quality and privacy-risk assessment of synthetic tabular data"};
  app.require_subcommand(1);

  std::string real, synth, out, kind;
  std::optional<std::string> holdout, schema, config, data_dir, static_dir;
  std::optional<int> port;
  std::size_t rows = 0, workers = 2;
  double noise = 0.0;
  std::uint64_t seed = 0;

  auto* assess = app.add_subcommand("assess", "Assess a synthetic table against a real one");
  assess->add_option("--real", real, "Real data CSV")->required();
  assess->add_option("--synthetic", synth, "Synthetic data CSV")->required();
  assess->add_option("--holdout", holdout, "Real rows unseen by the generator (privacy control)");
  assess->add_option("--schema", schema, "Schema sidecar JSON applied to every table");
  assess->add_option("--config", config, "Assessment config JSON");
  assess->add_option("--out", out, "Report JSON output path")->required();

  auto* fixture = app.add_subcommand("fixture", "Generate a synthetic fixture from a real table");
  fixture->add_option("--kind", kind, "independent-marginals | noisy-copy")
      ->required()
      ->check(CLI::IsMember({"independent-marginals", "noisy-copy"}));
  fixture->add_option("--real", real, "Real data CSV")->required();
  fixture->add_option("--rows", rows, "Rows to generate")->required()->check(CLI::PositiveNumber);
  fixture->add_option("--noise", noise, "Noise level (noisy-copy)")->check(CLI::NonNegativeNumber);
  fixture->add_option("--seed", seed, "Random seed")->required();
  fixture->add_option("--out", out, "Output CSV path")->required();

  auto* serve = app.add_subcommand("serve", "Run the HTTP assessment service");
  serve->add_option("--port", port, "Port (default $SYNQA_PORT or 8080)");
  serve->add_option("--data-dir", data_dir, "Data directory (default $SYNQA_DATA_DIR)");
  serve->add_option("--static-dir", static_dir, "Dashboard assets served at /");
  serve->add_option("--workers", workers, "Concurrent assessments")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*assess) return RunAssess(real, synth, holdout, schema, config, out);
    if (*fixture) return RunFixture(kind, real, rows, noise, seed, out);
    if (*serve) return RunServe(port, data_dir, static_dir, workers);
  } catch (const synqa::Error& e) {
    std::cerr << "synqa: " << e.what() << "\n";
    return e.code() == synqa::ErrorCode::kIo ? kExitIo : kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "synqa: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "synqa: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitOk;
}
