//! `Z^n`-graded modules over polynomial rings and the Rees construction.

mod module;
mod projective;
mod rees;

pub use module::{Fiber, GradedModule};
pub use projective::{p1_sections, p1_splitting_type, projective_charts, ProjectiveCharts};
pub use rees::{
    graded_tensor_dims, invariant_sections, is_vector_bundle, line_bundle_sum, recover_multifiltration, rees_cokernel,
    rees_kernel, rees_map, rees_module, rees_window, restrict_to_subtorus, split_iso, GradedMap, ReesCokernel,
    ReesHandle, SplitIso, TorsionReport,
};
