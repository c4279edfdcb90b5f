#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "ousparse/ou.hpp"

namespace ousparse::io {

/// Formats a double with 17 significant digits (round-trips exactly).
std::string format_double(double v);
/// Parses a full token as a double; accepts inf/nan spellings. Throws DomainError.
double parse_double(std::string_view token);

std::vector<std::string> split_csv_line(std::string_view line);

/// States CSV: header "t,x_1,...,x_d", one row per fine-grid time k*dt.
/// Ledger CSV: header "t,j_1,...,j_d", row k carries the jump of step k and
/// is stamped with the step's end time (k+1)*dt.
void write_trajectory_csv(const Trajectory& traj, std::ostream& states, std::ostream& ledger);
Trajectory read_trajectory_csv(std::istream& states, std::istream& ledger);

/// Observation CSV: header "t,x_1,...,x_d", rows t_i = i * delta_n.
/// Optional continuous-part CSV: header "t,xc_1,...", row i-1 stamped t_i.
void write_observations_csv(const ObservationSet& obs, std::ostream& states,
                            std::ostream* cont_increments = nullptr);
ObservationSet read_observations_csv(std::istream& states, std::istream* cont_increments = nullptr);

}  // namespace ousparse::io
