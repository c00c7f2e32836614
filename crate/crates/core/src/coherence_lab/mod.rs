//! Geometric experiments: center curves, invariant circles, and curve growth
//! against the rectangle bound.

mod annulus;
mod curve;
mod growth;
mod tube;

pub use annulus::{
    circle_restriction_report, hunt_invariant_circles, lifted_diameter_growth,
    restriction_report_for_iterate, torus_hausdorff, CircleRestrictionReport, HuntOptions,
    HuntReport, InvariantCircle, DEFAULT_INVARIANCE_TOL, DEFAULT_PERIOD_MAX, DEFAULT_SEEDS,
    HAUSDORFF_CAP,
};
pub use curve::{
    integrate_center_curve, CenterCurve, IntegrationOptions, DEFAULT_CLOSURE_ANGLE,
    DEFAULT_CLOSURE_TOL, DEFAULT_MAX_LEN, DEFAULT_STEP, DEFAULT_TANGENCY_TOL,
};
pub use growth::{
    bound_sequences, contradiction_bounds, fit_rate, grow_unstable_curve, BoundInputs,
    ContradictionBounds, GrowthOptions, GrowthReport, DEFAULT_N_MAX, DEFAULT_RESAMPLE_STEP,
    DEFAULT_TANGENCY_SLACK,
};
pub use tube::{tube_area, DEFAULT_CELL};

use std::io::Write;

/// Polylines as `curve,x,y` rows.
pub fn write_curves_csv<W: Write>(curves: &[&CenterCurve], mut w: W) -> std::io::Result<()> {
    writeln!(w, "curve,x,y")?;
    for (k, c) in curves.iter().enumerate() {
        for p in &c.points {
            writeln!(
                w,
                "{k},{},{}",
                crate::report::fmt_f64(p[0]),
                crate::report::fmt_f64(p[1])
            )?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests;
