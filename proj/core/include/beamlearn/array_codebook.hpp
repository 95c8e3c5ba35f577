// Uniform planar array patterns and the half-power-tiled beam codebook.
#pragma once

#include <complex>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace beamlearn {

using cplx = std::complex<double>;

enum class ElementPattern {
  front_hemisphere,  // unit gain for elevation < 90 deg, zero behind the array plane
  cosine,            // cos(elevation) in front, zero behind; a crude patch-element stand-in
};

struct ArrayGeometry {
  int n_x = 16;
  int n_y = 16;
  double spacing_x = 0.5;  // wavelengths
  double spacing_y = 0.5;
  ElementPattern element = ElementPattern::front_hemisphere;

  int element_count() const { return n_x * n_y; }
  void validate() const;

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

// Elevation is measured from the array normal (+z), azimuth in the array plane from +x.
struct PointingDirection {
  double azimuth_deg = 0.0;
  double elevation_deg = 0.0;

  friend bool operator==(const PointingDirection&, const PointingDirection&) = default;
};

// Folds a negative elevation through the normal and wraps azimuth into (-180, 180].
PointingDirection normalized(PointingDirection d);

// Great-circle angle between two directions, degrees.
double angular_distance_deg(const PointingDirection& a, const PointingDirection& b);

struct Beam {
  PointingDirection direction;
  double az_beamwidth_deg = 0.0;
  double el_beamwidth_deg = 0.0;
  int tier = 0;  // 0 is the boresight beam
};

struct Codebook {
  ArrayGeometry geometry;
  std::vector<Beam> beams;

  std::size_t size() const { return beams.size(); }
  const Beam& operator[](std::size_t i) const { return beams[i]; }
};

class BeamwidthError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class CutAxis { azimuth, elevation };

double element_gain(ElementPattern pattern, const PointingDirection& dir);

std::vector<cplx> steering_vector(const ArrayGeometry& geom, const PointingDirection& dir);

// w(beam)^H a(eval) for unit-norm steering vectors, evaluated in separable form.
cplx array_response(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                    const PointingDirection& eval_dir);

// |w(beam)^H a(eval)|^2 * n_x * n_y; equals n_x * n_y on the main direction.
double beam_power_gain(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                       const PointingDirection& eval_dir);

// Direction reached by moving offset_deg away from dir along the cut. The elevation
// cut keeps azimuth fixed and passes through the normal; the azimuth cut keeps
// elevation fixed. At boresight the azimuth cut is undefined, so the elevation cut
// in the orthogonal plane (azimuth + 90) is used instead.
PointingDirection along_cut(const PointingDirection& dir, CutAxis axis, double offset_deg);

struct HalfPowerOffsets {
  double lower_deg = 0.0;  // magnitude of the crossing on the negative side
  double upper_deg = 0.0;
  bool lower_truncated = false;  // crossing replaced by the visible-region edge
  bool upper_truncated = false;

  double width() const { return lower_deg + upper_deg; }
};

HalfPowerOffsets half_power_offsets(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                                    CutAxis axis);

double half_power_beamwidth(const ArrayGeometry& geom, const PointingDirection& beam_dir,
                            CutAxis axis);

Codebook generate_codebook(const ArrayGeometry& geom);

// Tab-separated table: index, azimuth, elevation, az beamwidth, el beamwidth, tier.
void write_codebook(std::ostream& os, const Codebook& cb);
Codebook read_codebook(std::istream& is, const ArrayGeometry& geom);

using PairIndex = std::size_t;

// Linear pair index convention: i = t * |rx| + r.
inline PairIndex pair_index(std::size_t tx, std::size_t rx, std::size_t rx_size) {
  return tx * rx_size + rx;
}

}  // namespace beamlearn
