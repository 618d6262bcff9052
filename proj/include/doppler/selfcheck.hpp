#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "doppler/atom_physics.hpp"
#include "doppler/trap_model.hpp"

namespace doppler {

struct SelfcheckItem {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double lower = 0.0;  // accepted interval
    double upper = 0.0;
    std::string unit;
    bool passed = false;
};

struct SelfcheckInputs {
    AtomSpecies species = chromium52();
    TrapConfig trap = stuttgart_cloverleaf();
};

/// Recomputes the published chromium numbers and compares each one with its
/// accepted interval.
std::vector<SelfcheckItem> run_selfcheck(const SelfcheckInputs& inputs = {});

bool all_passed(const std::vector<SelfcheckItem>& items);

void print_selfcheck(std::ostream& out, const std::vector<SelfcheckItem>& items);

}  // namespace doppler
