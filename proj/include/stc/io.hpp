#ifndef STC_IO_HPP
#define STC_IO_HPP

#include <string>

#include "stc/certificates.hpp"
#include "stc/hybrid_sim.hpp"

// Bank JSON persistence (exact decimal round-trip), trajectory CSV export and
// run summaries.
namespace stc {

// Doubles are printed with 17 significant digits so that parsing recovers the
// exact bit pattern.
std::string format_double(double v);

std::string bank_to_json(const CertificateBank& bank);
CertificateBank bank_from_json(const std::string& text);

void save_bank(const CertificateBank& bank, const std::string& path);
CertificateBank load_bank(const std::string& path);

// CSV header: t,j,x1..xn,V,interval,event_flag,level,fallback_flag.
std::string trajectory_to_csv(const HybridTrajectory& traj);
void save_trajectory_csv(const HybridTrajectory& traj, const std::string& path);

// JSON summary {num_events, min_interval, max_interval, final_V} with the
// bound-oracle report embedded.
std::string summary_to_json(const HybridTrajectory& traj, const BoundReport& report);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace stc

#endif  // STC_IO_HPP
