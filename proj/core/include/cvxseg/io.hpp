#pragma once

#include <string>
#include <vector>

#include "cvxseg/admm.hpp"
#include "cvxseg/convexity.hpp"
#include "cvxseg/forces.hpp"
#include "cvxseg/sdf.hpp"

namespace cvxseg {

/// Binary PGM (P5) / PPM (P6), 8-bit, maxval 255.  Gray files load as one
/// channel, color files as three; sample values are scaled to [0, 1].
/// Throws ParseError on malformed headers or truncated payloads.
Image read_image(const std::string& path);
void write_image(const std::string& path, const Image& img);

/// Mask files are 8-bit PGM: object = 0 (black), background = 255 (white).
/// On read, any value < 128 counts as object.
BinaryMask read_mask(const std::string& path);
void write_mask(const std::string& path, const BinaryMask& mask);

/// Scribble files are 8-bit PGM aligned with the image: 255 marks object
/// scribbles, 128 background scribbles, 0 unlabeled.  Other values are
/// rejected.  Fills labels.object / labels.background.
void read_scribbles(const std::string& path, LabelSet& labels);

/// Landmark files are plain text, one "m n" pair per line (1-based column
/// row, matching the coordinate convention printed in reports); blank lines
/// and lines starting with '#' are skipped.  Fills labels.landmarks with
/// zero-based coordinates.
void read_landmarks(const std::string& path, LabelSet& labels);

/// Level-set dump: 16-byte header ("PHI0", int32 width, int32 height, 4 zero
/// bytes), then width*height little-endian float64 in row-major order.
/// Round-trips bit-exactly.
ScalarField read_phi(const std::string& path);
void write_phi(const std::string& path, const ScalarField& phi);

/// Per-iteration diagnostics table with header
/// "iter,energy,res_zeta,res_xi,convexity_violation,dice"; the dice column
/// is left blank when no reference mask was given.
void write_diagnostics_csv(const std::string& path,
                           const std::vector<IterationStats>& history);

/// Human-readable serialization of a ConvexityReport (used by the check
/// command); pixel coordinates print 1-based.
std::string format_report(const ConvexityReport& report);

/// Input image with the mask contour painted red (gray inputs are expanded
/// to RGB first).  The contour is the set of object pixels with at least one
/// 4-neighbor in the background.
Image render_overlay(const Image& img, const BinaryMask& mask);

}  // namespace cvxseg
