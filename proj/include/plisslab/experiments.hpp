#ifndef PLISSLAB_EXPERIMENTS_HPP
#define PLISSLAB_EXPERIMENTS_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>

namespace plisslab {

/// Raised on malformed configuration / unknown experiment names; the CLI maps
/// it to exit code 2.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
    std::string model_name = "cat2";
    std::map<std::string, double> model_params;
    std::string experiment;

    long n = 10000;               // orbit horizon for exponents / chi / appendix
    long ensemble_horizon = 20000; // N for the Folner ensemble
    int p_max = 8;
    int resolution = 64;
    int block_max = 8;
    long orbit_len = 10000000;    // entropy coding orbit
    long lyapunov_n = 10000;
    double eps = 0.05;            // epsilon of the Gibbs / distortion estimates
    double a = 0.05;
    double a_prime = 0.1;
    double a_pp = 0.3;
    double gamma = 0.8;           // Pesin-block gamma for the bi-Pliss sweep
    long fill_m = 50;
    double eps_boundary = 0.05;
    double eps_mass = 0.05;
    double eps_fill = 0.1;
    int levels = 5;
    long samples = 1000;          // disk samples of the Folner ensemble
    long gibbs_horizon = 10;
    long gibbs_samples = 40000;
    long density_anchors = 100;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int jobs = 1;
    bool self_test = false;

    void validate() const;
};

/// Parses the JSON config file into `cfg` (unknown keys rejected).
void load_config_file(const std::string& path, ExperimentConfig& cfg);

/// Runs one named experiment (or "all"); writes CSV/JSON artifacts and
/// manifest.json under out_dir. Returns 0 when every assertion passes, 1
/// otherwise. Throws UsageError for config problems.
int run(const ExperimentConfig& cfg);

} // namespace plisslab

#endif
