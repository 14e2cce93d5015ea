//! Obstacle geometry: analytic shapes, surface meshes, strip hulls and
//! characteristic-function transforms.

pub mod fourier;
pub mod mesh;
pub mod shape;
pub mod strip;
pub mod vector;

pub use fourier::{fourier_characteristic, unit_ball_profile};
pub use mesh::{illuminated, mesh_shape, TriangleMesh};
pub use shape::Shape;
pub use strip::Strip;
pub use vector::{CVec3, Mat3, UnitVec, Vec3};
