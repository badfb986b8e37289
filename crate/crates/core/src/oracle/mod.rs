//! Independent oracles: volume quadrature of the indicator, cone and segment
//! closed forms, and the onset-slab band check.

mod band;
mod cone;
mod segment;
mod volume;

pub use band::{onset_band, BandReport, BandSample};
pub use cone::{
    cone_moment, kd_closed_form, kd_limit_sample, kd_quadrature, ConeSpec, KdMethod, KdValue,
};
pub use segment::{segment_b, segment_integrals, SegmentParams};
pub use volume::{final_time_bound, source_term, volume_indicator, FinalTimeBound};

#[cfg(test)]
mod tests;
