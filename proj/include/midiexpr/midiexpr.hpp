// Umbrella header.
#ifndef MIDIEXPR_MIDIEXPR_HPP
#define MIDIEXPR_MIDIEXPR_HPP

#include "midiexpr/rational.hpp"
#include "midiexpr/smf.hpp"
#include "midiexpr/heuristics.hpp"
#include "midiexpr/classify.hpp"
#include "midiexpr/calibrate.hpp"
#include "midiexpr/corpus.hpp"

#endif  // MIDIEXPR_MIDIEXPR_HPP
