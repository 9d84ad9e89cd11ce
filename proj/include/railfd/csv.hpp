#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "railfd/equilibrium.hpp"

namespace railfd {

// Shortest decimal form with 9 significant digits; used for every float in
// emitted files so reruns are byte-identical.
std::string format_sig9(double x);

std::string render_trains_csv(const std::vector<TrainState>& trains);
std::string render_curves_csv(const CurveSamples& curves);
std::string render_summary(const std::vector<std::pair<std::string, std::string>>& kv);

std::uint64_t fnv1a64(const std::string& data);

// Records every artifact written during a run together with a content
// checksum, plus free-form diagnostics (config echo, convergence info).
class RunManifest {
  public:
    void note(const std::string& key, const std::string& value);
    // Writes `name` under `dir` and appends a checksummed entry.
    void write_file(const std::string& dir, const std::string& name,
                    const std::string& contents);
    std::string render() const;
    // Emits manifest.txt itself into `dir`.
    void finalize(const std::string& dir) const;

  private:
    std::vector<std::pair<std::string, std::string>> notes_;
    std::vector<std::pair<std::string, std::uint64_t>> files_;
};

} // namespace railfd
