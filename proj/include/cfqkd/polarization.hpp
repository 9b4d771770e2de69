#pragma once

namespace cfqkd {

// Photon polarization. H encodes bit 0, V encodes bit 1.
enum class Polarization : int { H = 0, V = 1 };

constexpr Polarization flip(Polarization p) {
  return p == Polarization::H ? Polarization::V : Polarization::H;
}

constexpr int bit_value(Polarization p) { return static_cast<int>(p); }

constexpr Polarization pol_from_bit(int bit) {
  return bit == 0 ? Polarization::H : Polarization::V;
}

constexpr char pol_char(Polarization p) {
  return p == Polarization::H ? 'H' : 'V';
}

}  // namespace cfqkd
