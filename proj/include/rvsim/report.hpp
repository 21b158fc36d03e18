#pragma once

// Telemetry CSV and summary writers. Numbers are printed in shortest
// round-trip form so that identical runs give identical bytes.

#include "rvsim/harness.hpp"
#include "rvsim/scenario.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rvsim {

inline constexpr int kTelemetrySchemaVersion = 1;

inline constexpr std::string_view kTelemetryColumns =
    "t,x,y,z,vx,vy,vz,qw,qx,qy,qz,wx,wy,wz,mass,sigma1,sigma2,sigma3,fbx,fby,fbz,"
    "thruster_word,phase,min_obstacle_distance,cone_margin";

/// Incremental SHA-256, hex digest.
class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1)
            throw std::runtime_error("sha256: initialisation failed");
    }

    void update(std::string_view data) {
        if (EVP_DigestUpdate(ctx_.get(), data.data(), data.size()) != 1)
            throw std::runtime_error("sha256: update failed");
    }

    /// Finishes the hash; further updates are not allowed.
    std::string hex() {
        unsigned char md[EVP_MAX_MD_SIZE];
        unsigned int len = 0;
        if (EVP_DigestFinal_ex(ctx_.get(), md, &len) != 1) throw std::runtime_error("sha256: final failed");
        static constexpr char digits[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += digits[md[i] >> 4];
            out += digits[md[i] & 0xF];
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

/// Streams telemetry rows as CSV (to `out`, if given) and hashes every byte.
class TelemetryWriter {
public:
    explicit TelemetryWriter(std::ostream* out) : out_(out) {
        put("# rvsim telemetry schema_version=" + std::to_string(kTelemetrySchemaVersion) + "\n");
        put(std::string(kTelemetryColumns) + "\n");
    }

    void row(const TelemetryRow& r) {
        line_.clear();
        num(r.t);
        vec(r.state.position);
        vec(r.state.velocity);
        num(r.state.attitude.w());
        num(r.state.attitude.x());
        num(r.state.attitude.y());
        num(r.state.attitude.z());
        vec(r.state.rate);
        num(r.state.mass);
        vec(r.sigma);
        vec(r.force_body);
        line_ += std::to_string(r.word);
        line_ += ',';
        line_ += std::to_string(r.phase);
        line_ += ',';
        num(r.min_obstacle_distance);
        num(r.cone_margin);
        line_.back() = '\n';
        put(line_);
        ++rows_;
    }

    TelemetrySink sink() {
        return [this](const TelemetryRow& r) { row(r); };
    }

    [[nodiscard]] std::int64_t rows() const { return rows_; }
    std::string digest() { return hash_.hex(); }

private:
    void put(const std::string& s) {
        hash_.update(s);
        if (out_) {
            out_->write(s.data(), static_cast<std::streamsize>(s.size()));
            if (!*out_) throw std::runtime_error("telemetry: write failed");
        }
    }
    // Not-applicable values (NaN) are left empty.
    void num(double v) {
        if (!std::isnan(v)) line_ += format_double(v);
        line_ += ',';
    }
    void vec(const Vec3& v) {
        num(v.x());
        num(v.y());
        num(v.z());
    }

    std::ostream* out_;
    Sha256 hash_;
    std::string line_;
    std::int64_t rows_ = 0;
};

namespace detail {

inline void summary_phase(std::ostream& os, const PhaseResult& p, const std::string& indent) {
    const auto f = [](double v) { return format_double(v); };
    os << indent << "- name: " << p.name << '\n'
       << indent << "  status: " << to_string(p.status) << '\n'
       << indent << "  elapsed_s: " << f(p.elapsed) << '\n'
       << indent << "  steps: " << p.steps << '\n'
       << indent << "  fuel_kg: " << f(p.fuel) << '\n'
       << indent << "  control_effort_Ns: " << f(p.control_effort) << '\n'
       << indent << "  final_position_m: [" << f(p.final_position.x()) << ", " << f(p.final_position.y()) << ", "
       << f(p.final_position.z()) << "]\n"
       << indent << "  final_error_m: [" << f(p.final_error.x()) << ", " << f(p.final_error.y()) << ", "
       << f(p.final_error.z()) << "]\n"
       << indent << "  min_clearance_m: " << f(p.min_clearance) << '\n'
       << indent << "  collision: " << (p.collision ? "true" : "false") << '\n'
       << indent << "  cone_breach: " << (p.cone_breach ? "true" : "false") << '\n'
       << indent << "  propellant_out: " << (p.propellant_out ? "true" : "false") << '\n'
       << indent << "  max_sliding_residual: " << f(p.max_sliding_residual) << '\n'
       << indent << "  reached_fraction: " << f(p.reached_fraction) << '\n'
       << indent << "  sensor_ticks: " << p.sensor_ticks << '\n'
       << indent << "  guidance_ticks: " << p.guidance_ticks << '\n'
       << indent << "  control_ticks: " << p.control_ticks << '\n'
       << indent << "  thruster_switches: " << p.thruster_switches << '\n';
}

inline void summary_run(std::ostream& os, const RunResult& r, const std::string& digest, const std::string& indent) {
    const auto f = [](double v) { return format_double(v); };
    os << indent << "controller: " << to_string(r.controller) << '\n'
       << indent << "telemetry_sha256: " << digest << '\n'
       << indent << "total_elapsed_s: " << f(r.elapsed()) << '\n'
       << indent << "total_fuel_kg: " << f(r.fuel()) << '\n'
       << indent << "total_control_effort_Ns: " << f(r.control_effort()) << '\n'
       << indent << "final_mass_kg: " << f(r.final_state.mass) << '\n'
       << indent << "phases:\n";
    for (const PhaseResult& p : r.phases) summary_phase(os, p, indent + "  ");
}

}  // namespace detail

/// Summary report for one run (YAML-compatible text).
inline void write_summary(std::ostream& os, const ScenarioFile& sc, const RunResult& r, const std::string& digest) {
    os << "schema_version: " << kTelemetrySchemaVersion << '\n'
       << "scenario: " << sc.name << '\n'
       << "seed: " << sc.seed << '\n';
    detail::summary_run(os, r, digest, "");
}

/// Joined summary for a controller comparison.
inline void write_comparison(std::ostream& os, const ScenarioFile& sc, const ComparisonReport& c,
                             const std::string& simplex_digest, const std::string& componentwise_digest) {
    const double ce_s = c.simplex.control_effort();
    const double ce_c = c.componentwise.control_effort();
    os << "schema_version: " << kTelemetrySchemaVersion << '\n'
       << "scenario: " << sc.name << '\n'
       << "seed: " << sc.seed << '\n'
       << "control_effort_ratio_simplex_to_componentwise: "
       << (ce_c > 0.0 ? format_double(ce_s / ce_c) : std::string("nan")) << '\n'
       << "simplex:\n";
    detail::summary_run(os, c.simplex, simplex_digest, "  ");
    os << "componentwise:\n";
    detail::summary_run(os, c.componentwise, componentwise_digest, "  ");
}

/// 0 ok, 3 collision or cone breach, 4 timeout or propellant exhausted.
inline int exit_code(const RunResult& r) {
    if (r.safety_violation()) return 3;
    if (r.aborted()) return 4;
    return 0;
}

}  // namespace rvsim
