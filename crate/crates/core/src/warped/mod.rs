//! Rotationally symmetric metrics g = ds² + φ(s)² g_{S^{m-1}}: curvature, the
//! potential's Hessian, geodesics in the 2D slice, and ball volumes.

pub mod geodesic;
pub mod profile;
pub mod slice;
pub mod volume;

pub use geodesic::{geodesic_between, slice_distance, GeodesicPath, PathKind, PathOptions, SlicePoint};
pub use profile::{Potential, PotentialShape, Shape, WarpedProfile};
pub use slice::{curvature_at, potential_hessian, CurvatureData, SliceCoeffs, SliceMetric};
pub use volume::{ball_integral, ball_volume};
