#pragma once

#include <filesystem>
#include <string>

namespace wsis::acceptance {

struct Context {
    std::filesystem::path cli;     // simulator binary, used by the repeatability check
    std::filesystem::path scratch; // fresh per-check working directory
};

struct Outcome {
    bool passed = false;
    std::string detail;
};

// Numbered checks, one per published gate.  Each is self-contained: it builds
// whatever it needs, runs, and reports a single pass/fail with measurements.
Outcome check_optimum_search(Context&);        // 1: grid search finds the yawed optimum
Outcome check_degradation_constant(Context&);  // 2: wear cost per kWh from cell economics
Outcome check_gradient_fidelity(Context&);     // 3: backprop vs central differences
Outcome check_scheduler_optimality(Context&);  // 4: battery schedule vs brute-force grid
Outcome check_residual_training(Context&);     // 5: physics loss alone drives |f| to zero
Outcome check_accounting_identities(Context&); // 6: power balance and metric identities
Outcome check_baseline_dominance(Context&);    // 7: learned control vs receding-horizon
Outcome check_residual_warmstart(Context&);    // 8: physics prior speeds early learning
Outcome check_penalty_sweep(Context&);         // 9: smoothing penalty moves FS and VO
Outcome check_model_ablations(Context&);       // 10: wake/wear ablations hurt smoothness
Outcome check_bitwise_repeatability(Context&); // 11: identical runs, identical bytes

// Empty (re)created directory under the system temp root.
std::filesystem::path fresh_dir(const std::string& tag);

std::string fmt(double v);

} // namespace wsis::acceptance
