#ifndef PTLAME_PTLAME_HPP
#define PTLAME_PTLAME_HPP

#include "ptlame/elliptic.hpp"
#include "ptlame/errors.hpp"
#include "ptlame/floquet.hpp"
#include "ptlame/potentials.hpp"
#include "ptlame/spectra.hpp"

#endif  // PTLAME_PTLAME_HPP
