//! Quadrature, polynomial transforms of diagonal encodings, and assembly with variable
//! coefficients and force vectors.

pub mod force;
pub mod gauss;
pub mod poly;
pub mod qsp;
pub mod transform;
pub mod varcoef;

pub use force::{assemble_force_vector, ForceAssembly};
pub use gauss::{gauss_legendre, QuadratureRule};
pub use poly::PolySpec;
pub use qsp::{qsp_apply, qsp_phases, QSPPhases};
pub use transform::{mqet_transform, poly_transform_diagonal};
pub use varcoef::{assemble_variable_coeff, gauss_point_position_be, BilinearKind};
