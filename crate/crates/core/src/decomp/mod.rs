//! Matrix decompositions of covariance matrices, symplectic maps, joint
//! two-photon matrices and coherency matrices.

mod counting;
mod modes;
mod symplectic;
mod takagi;

pub use counting::{biphoton_coherency, m2_mode_count, m2_mode_count_numeric, schmidt_mode_count, M2Count, SchmidtModeCount};
pub use modes::{effective_mode_number, is_intrinsic_single_mode, numerical_rank, principal_modes, PrincipalModes, SingleModeTest};
pub use symplectic::{
    bloch_messiah, intrinsic_separation, separation_monte_carlo, williamson, BlochMessiahFactors,
    IntrinsicSeparation, MonteCarloReport, WilliamsonFactors,
};
pub use takagi::{schmidt, schmidt_number, takagi, SchmidtFactors, TakagiFactors};
