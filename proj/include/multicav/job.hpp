#pragma once

#include "multicav/core_tmm.hpp"
#include "multicav/couplings.hpp"
#include "multicav/resonance.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace multicav::job {

using nlohmann::json;

/// Configuration problem; `line` is 0 when it cannot be attributed.
class ConfigError : public std::runtime_error
{
public:
    ConfigError(const std::string& message, int line = 0)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message),
          line_(line)
    {
    }
    [[nodiscard]] int line() const { return line_; }

private:
    int line_;
};

enum class OutputKind { Spectrum, Resonances, Fields, Couplings, Sweep };
enum class OutputFormat { Csv, Json };

struct StackSpec
{
    std::vector<OpticalElement> elements;
    Incidence incidence = Incidence::FromLeft;

    [[nodiscard]] CavityStack build() const { return CavityStack(elements, incidence); }
};

/// Second stack evaluated near the same wavenumber for ratio reporting.
struct ReferenceSpec
{
    std::string name;
    StackSpec stack;
    std::optional<std::size_t> movable_element;
};

/// Three-mirror common resonances at fixed total length, one per short-gap order.
struct SweepSpec
{
    double zeta = 0.0;
    std::vector<double> zeta_primes;
    double total_length = 0.0;
    double target_k = 0.0;
    std::vector<long long> orders;
};

struct JobConfig
{
    std::optional<StackSpec> stack;
    double k_min = 0.0;
    double k_max = 0.0;
    int samples_per_fsr = 64;
    double speed_of_light = 1.0;
    std::vector<OutputKind> outputs;
    std::optional<EmitterParams> emitter;
    std::optional<std::size_t> movable_element;
    std::vector<ReferenceSpec> references;
    std::optional<SweepSpec> sweep;
    OutputFormat format = OutputFormat::Csv;
    std::string output_path;

    json resolved; ///< fully resolved configuration, echoed into output headers

    [[nodiscard]] EngineOptions engine() const
    {
        return {speed_of_light, samples_per_fsr, 1e-12};
    }
};

/// Parses and validates a JSON job description; unknown keys are rejected.
[[nodiscard]] JobConfig parse_config(const std::string& text);
[[nodiscard]] JobConfig parse_config(const json& doc);

[[nodiscard]] std::vector<std::string> preset_names();
/// JSON document of a named preset; ConfigError listing the names otherwise.
[[nodiscard]] json preset_document(const std::string& name);
[[nodiscard]] JobConfig preset(const std::string& name);

/// Parses "100pi", "9.91*pi", "pi" or a plain number.
[[nodiscard]] double parse_length(const json& value);

struct ReferenceResult
{
    std::string name;
    Resonance resonance;
    double G = 0.0;
    double C_om = 0.0;
    double g_max = 0.0;
};

struct CouplingRow
{
    Resonance resonance;
    std::optional<CouplingReport> report;
    std::string status = "ok"; ///< error name when the coupling could not be formed
};

struct FieldRow
{
    double k0 = 0.0;
    std::vector<FieldSegment> segments;
};

struct SweepRow
{
    double zeta_prime = 0.0;
    long long order = 0;
    double L = 0.0;
    double l = 0.0;
    double k0 = 0.0;
    double kappa = 0.0;
    double G = 0.0;
    double G_m = 0.0;
    double kappa_m = 0.0;
    double prediction = 0.0; ///< closed-form G / G_m in the asymmetric limit
};

struct JobResult
{
    std::vector<SpectrumSample> spectrum;
    std::vector<Resonance> resonances;
    std::optional<AnalyticOverlapCriterion> overlap_criterion;
    std::vector<FieldRow> fields;
    std::vector<CouplingRow> couplings;
    std::vector<ReferenceResult> references;
    std::vector<SweepRow> sweep;
};

[[nodiscard]] JobResult run(const JobConfig& config);

[[nodiscard]] json to_json(const JobResult& result, const std::vector<OutputKind>& kinds);
/// CSV body (without header block) for one output kind.
[[nodiscard]] std::string to_csv(const JobResult& result, OutputKind kind);

/// Writes every requested output with its header block; returns the paths written.
std::vector<std::string> write_outputs(const JobConfig& config, const JobResult& result);

[[nodiscard]] const char* to_string(OutputKind kind);
[[nodiscard]] std::string version();

} // namespace multicav::job
